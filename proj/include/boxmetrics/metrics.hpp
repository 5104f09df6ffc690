#pragma once

// Bounding Box Disparity and the auxiliary pairwise box metrics.

#include "boxmetrics/core.hpp"
#include "boxmetrics/distance.hpp"
#include "boxmetrics/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxmetrics {

/// Raised by point_based_iou when no cloud point lies in either box.
class UndefinedRatio : public std::domain_error {
public:
  UndefinedRatio() : std::domain_error("no cloud point lies in either box") {}
};

struct PointCloud {
  std::vector<Vec3> points;
};

struct DifferencePair {
  double abs = 0.0;
  double squared = 0.0;
};

/// Intrinsic X-Y-Z angles (rx, ry, rz) with R = Rx(rx) Ry(ry) Rz(rz).
/// When |ry| is within 1e-6 of pi/2 the split between rx and rz is not
/// unique; rz is then set to 0 and gimbal_lock is raised.
struct EulerXYZ {
  Vec3 angles;
  bool gimbal_lock = false;
};

inline EulerXYZ euler_xyz_from_rotation(const Mat3& r) {
  EulerXYZ e;
  const double sy = std::clamp(r(0, 2), -1.0, 1.0);
  const double ry = std::asin(sy);
  if (std::abs(std::abs(ry) - std::numbers::pi / 2) <= 1e-6) {
    e.gimbal_lock = true;
    e.angles = {std::atan2(r(2, 1), r(1, 1)), ry, 0.0};
  } else {
    e.angles = {std::atan2(-r(1, 2), r(2, 2)), ry, std::atan2(-r(0, 1), r(0, 0))};
  }
  return e;
}

/// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

struct EulerDifference {
  Vec3 angles;  // wrapped (B - A) per axis
  bool gimbal_lock = false;
};

inline EulerDifference euler_angle_difference(const OrientedBox& a, const OrientedBox& b) {
  const EulerXYZ ea = euler_xyz_from_rotation(a.rotation());
  const EulerXYZ eb = euler_xyz_from_rotation(b.rotation());
  EulerDifference d;
  for (int k = 0; k < 3; ++k) d.angles[k] = wrap_angle(eb.angles[k] - ea.angles[k]);
  d.gimbal_lock = ea.gimbal_lock || eb.gimbal_lock;
  return d;
}

/// Geodesic angle 2 acos|qA . qB|, insensitive to quaternion sign.
/// Evaluated as 2 atan2(|vec(r)|, |w(r)|) with r = conj(qA) qB, which is the
/// same angle without the loss of precision of acos near 1.
inline double quaternion_distance(const OrientedBox& a, const OrientedBox& b) {
  const Eigen::Quaterniond qa = Eigen::Quaterniond(a.rotation()).normalized();
  const Eigen::Quaterniond qb = Eigen::Quaterniond(b.rotation()).normalized();
  const Eigen::Quaterniond rel = qa.conjugate() * qb;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

/// Geodesic angle acos((trace(RA^T RB) - 1) / 2), evaluated through atan2 of
/// the sine (from the skew part of RA^T RB) and the cosine.
inline double matrix_geodesic_distance(const OrientedBox& a, const OrientedBox& b) {
  const Mat3 m = a.rotation().transpose() * b.rotation();
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 skew{m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
  return std::atan2(0.5 * skew.norm(), c);
}

/// Euclidean (L2) center offset and its square.
inline DifferencePair position_difference(const OrientedBox& a, const OrientedBox& b) {
  const double sq = (a.center() - b.center()).squaredNorm();
  return {std::sqrt(sq), sq};
}

/// L1 and squared-L2 differences of the dimension vectors.
inline DifferencePair size_difference(const OrientedBox& a, const OrientedBox& b) {
  const Vec3 diff = a.dimensions() - b.dimensions();
  return {diff.cwiseAbs().sum(), diff.squaredNorm()};
}

/// Bounding Box Disparity: 1 - IoU + v2v.
inline double bbd(const OrientedBox& a, const OrientedBox& b, double tol = kDefaultTol) {
  return 1.0 - iou(a, b, tol) + v2v(a, b, tol);
}

/// Fraction of cloud points in both boxes among those in either box (closed
/// boxes with tolerance tol). Unweighted count ratio.
inline double point_based_iou(const PointCloud& cloud, const OrientedBox& a, const OrientedBox& b,
                              double tol = kDefaultTol) {
  if (cloud.points.empty()) throw std::invalid_argument("point cloud is empty");
  std::size_t both = 0, either = 0;
  for (const auto& p : cloud.points) {
    const bool in_a = contains_point(a, p, tol);
    const bool in_b = contains_point(b, p, tol);
    both += (in_a && in_b) ? 1 : 0;
    either += (in_a || in_b) ? 1 : 0;
  }
  if (either == 0) throw UndefinedRatio();
  return static_cast<double>(both) / static_cast<double>(either);
}

struct RotationDistances {
  Vec3 euler_diff = Vec3::Zero();
  double quaternion_dist = 0.0;
  double matrix_geodesic = 0.0;
};

struct MetricReport {
  double iou = 0.0;
  double v2v = 0.0;
  double bbd = 0.0;
  DifferencePair position_diff;
  DifferencePair size_diff;
  RotationDistances rotation;
  std::optional<double> point_iou;
  std::vector<std::string> warnings;
};

inline constexpr const char* kWarnUndefinedRatio = "UndefinedRatio";
inline constexpr const char* kWarnGimbalLock = "GimbalLockWarning";
inline constexpr const char* kWarnEmptyCloud = "EmptyCloud";

/// Every metric for one box pair. Point IoU is present only when a cloud is
/// given and the ratio is defined; otherwise a warning is recorded.
inline MetricReport full_report(const OrientedBox& a, const OrientedBox& b,
                                const PointCloud* cloud = nullptr, double tol = kDefaultTol) {
  MetricReport r;
  r.iou = iou(a, b, tol);
  r.v2v = v2v(a, b, tol);
  r.bbd = 1.0 - r.iou + r.v2v;
  r.position_diff = position_difference(a, b);
  r.size_diff = size_difference(a, b);
  const EulerDifference ed = euler_angle_difference(a, b);
  r.rotation.euler_diff = ed.angles;
  if (ed.gimbal_lock) r.warnings.emplace_back(kWarnGimbalLock);
  r.rotation.quaternion_dist = quaternion_distance(a, b);
  r.rotation.matrix_geodesic = matrix_geodesic_distance(a, b);
  if (cloud != nullptr) {
    if (cloud->points.empty()) {
      r.warnings.emplace_back(kWarnEmptyCloud);
    } else {
      try {
        r.point_iou = point_based_iou(*cloud, a, b, tol);
      } catch (const UndefinedRatio&) {
        r.warnings.emplace_back(kWarnUndefinedRatio);
      }
    }
  }
  return r;
}

}  // namespace boxmetrics
