#pragma once

// Oriented box representation, homogeneous transforms, unit-cube topology
// tables and containment tests.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace boxmetrics {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Default closed-interval tolerance for containment and parameter windows,
/// measured in the unit frame of a box.
inline constexpr double kDefaultTol = 1e-9;

/// Tolerance for accepting a rotation or quaternion that is not quite unit.
inline constexpr double kRotationAcceptTol = 1e-6;

class InvalidBox : public std::invalid_argument {
public:
  explicit InvalidBox(const std::string& reason) : std::invalid_argument(reason) {}
};

// ---------------------------------------------------------------------------
// Rotation helpers
// ---------------------------------------------------------------------------

inline Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }
inline Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }
inline Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }

/// Intrinsic X-Y-Z Euler angles: R = Rx(rx) * Ry(ry) * Rz(rz).
inline Mat3 rotation_from_euler_xyz(const Vec3& angles) {
  return rot_x(angles.x()) * rot_y(angles.y()) * rot_z(angles.z());
}

/// Projects a nearly orthonormal matrix onto SO(3) by polar decomposition.
/// Throws InvalidBox if the input is farther than kRotationAcceptTol (max-abs
/// entry difference) from its projection or is a reflection.
inline Mat3 normalize_rotation(const Mat3& m) {
  if (!m.allFinite()) throw InvalidBox("rotation has non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) throw InvalidBox("rotation is a reflection (det < 0)");
  if ((r - m).cwiseAbs().maxCoeff() > kRotationAcceptTol)
    throw InvalidBox("rotation is not orthonormal within 1e-6");
  return r;
}

/// Quaternion given as (w, x, y, z). Must have unit norm within
/// kRotationAcceptTol; it is renormalized before conversion.
inline Mat3 rotation_from_quaternion(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  if (!q.coeffs().allFinite()) throw InvalidBox("quaternion has non-finite entries");
  if (std::abs(q.norm() - 1.0) > kRotationAcceptTol)
    throw InvalidBox("quaternion is not unit within 1e-6");
  q.normalize();
  return q.toRotationMatrix();
}

// ---------------------------------------------------------------------------
// OrientedBox
// ---------------------------------------------------------------------------

/// A cuboid with center, body rotation and strictly positive extents.
/// Column j of the rotation is the body axis along which dimension j lies.
/// Immutable after construction.
class OrientedBox {
public:
  /// Validates dimensions and re-projects the rotation onto SO(3).
  OrientedBox(const Vec3& center, const Mat3& rotation, const Vec3& dimensions)
      : center_(center), rotation_(normalize_rotation(rotation)), dimensions_(dimensions) {
    if (!center.allFinite()) throw InvalidBox("center has non-finite entries");
    if (!dimensions.allFinite()) throw InvalidBox("dimensions have non-finite entries");
    if ((dimensions.array() <= 0.0).any()) throw InvalidBox("non-positive dimension");
  }

  static OrientedBox from_quaternion(const Vec3& center, const Eigen::Vector4d& wxyz,
                                     const Vec3& dimensions) {
    return {center, rotation_from_quaternion(wxyz[0], wxyz[1], wxyz[2], wxyz[3]), dimensions};
  }

  static OrientedBox from_euler_xyz(const Vec3& center, const Vec3& angles,
                                    const Vec3& dimensions) {
    return {center, rotation_from_euler_xyz(angles), dimensions};
  }

  /// Axis-aligned box.
  static OrientedBox axis_aligned(const Vec3& center, const Vec3& dimensions) {
    return {center, Mat3::Identity(), dimensions};
  }

  static OrientedBox unit_cube(const Vec3& center = Vec3::Zero()) {
    return axis_aligned(center, Vec3::Ones());
  }

  const Vec3& center() const { return center_; }
  const Mat3& rotation() const { return rotation_; }
  const Vec3& dimensions() const { return dimensions_; }
  Vec3 axis(int j) const { return rotation_.col(j); }
  double volume() const { return dimensions_.prod(); }
  double diagonal() const { return dimensions_.norm(); }

  /// Applies x -> q*x + t to the box.
  OrientedBox moved(const Mat3& q, const Vec3& t) const {
    return {q * center_ + t, q * rotation_, dimensions_};
  }

  /// Scales center and dimensions by s > 0.
  OrientedBox scaled(double s) const { return {center_ * s, rotation_, dimensions_ * s}; }

private:
  Vec3 center_;
  Mat3 rotation_;
  Vec3 dimensions_;
};

// ---------------------------------------------------------------------------
// Unit-cube topology
// ---------------------------------------------------------------------------

namespace topology {

/// Unit-cube corners, one per column.
inline const Eigen::Matrix<double, 3, 8>& unit_corners() {
  static const Eigen::Matrix<double, 3, 8> u = [] {
    Eigen::Matrix<double, 3, 8> m;
    m << -0.5, 0.5, -0.5, -0.5, 0.5, -0.5, 0.5, 0.5,
         -0.5, -0.5, 0.5, -0.5, 0.5, 0.5, -0.5, 0.5,
         -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 0.5, -0.5;
    return m;
  }();
  return u;
}

/// Edges as zero-based corner index pairs; the first index is the edge origin.
inline constexpr std::array<std::array<int, 2>, 12> kEdges{{
    {0, 1}, {1, 7}, {2, 7}, {0, 2}, {3, 6}, {6, 4},
    {5, 4}, {3, 5}, {0, 3}, {1, 6}, {7, 4}, {2, 5},
}};

/// Faces as zero-based corner index triples (origin, origin+span1, origin+span2).
inline constexpr std::array<std::array<int, 3>, 6> kFaces{{
    {0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {4, 5, 6}, {4, 5, 7}, {4, 6, 7},
}};

/// Outward normal of face k is normal_sign[k] * rotation.col(normal_axis[k]).
inline constexpr std::array<int, 6> kNormalAxis{2, 1, 0, 2, 1, 0};
inline constexpr std::array<int, 6> kNormalSign{-1, -1, -1, +1, +1, +1};

}  // namespace topology

// ---------------------------------------------------------------------------
// Transforms and features
// ---------------------------------------------------------------------------

/// 4x4 homogeneous transform with upper-left block R*diag(d) and translation p.
inline Mat4 box_to_transform(const OrientedBox& box) {
  Mat4 t = Mat4::Identity();
  t.topLeftCorner<3, 3>() = box.rotation() * box.dimensions().asDiagonal();
  t.topRightCorner<3, 1>() = box.center();
  return t;
}

/// Maps a unit-frame point into world coordinates.
inline Vec3 unit_to_world(const OrientedBox& box, const Vec3& u) {
  return box.center() + box.rotation() * box.dimensions().cwiseProduct(u);
}

/// diag(d)^-1 * R^T * (point - center).
inline Vec3 world_to_unit(const OrientedBox& box, const Vec3& point) {
  return (box.rotation().transpose() * (point - box.center())).cwiseQuotient(box.dimensions());
}

using Corners = std::array<Vec3, 8>;

inline Corners box_corners(const OrientedBox& box) {
  Corners c;
  const auto& u = topology::unit_corners();
  for (int j = 0; j < 8; ++j) c[j] = unit_to_world(box, u.col(j));
  return c;
}

/// Closed containment in the unit frame: each coordinate in [-0.5-tol, 0.5+tol].
inline bool contains_point(const OrientedBox& box, const Vec3& point, double tol = kDefaultTol) {
  const Vec3 u = world_to_unit(box, point);
  return (u.array().abs() <= 0.5 + tol).all();
}

inline Vec3 face_normal(const OrientedBox& box, int face) {
  return topology::kNormalSign[face] * box.axis(topology::kNormalAxis[face]);
}

/// Parametric line origin + slope * t, t in [0, 1] on the segment.
struct LineParam {
  Vec3 origin;
  Vec3 slope;

  Vec3 at(double t) const { return origin + slope * t; }
};

/// Parametric plane origin + span * (t1, t2), [0,1]^2 on the face.
struct PlaneParam {
  Vec3 origin;
  Eigen::Matrix<double, 3, 2> span;

  Vec3 at(const Eigen::Vector2d& t) const { return origin + span * t; }
};

inline LineParam edge_line(const Corners& corners, int edge) {
  const auto [a, b] = topology::kEdges[edge];
  return {corners[a], corners[b] - corners[a]};
}

inline PlaneParam face_plane(const Corners& corners, int face) {
  const auto [a, b, c] = topology::kFaces[face];
  PlaneParam p;
  p.origin = corners[a];
  p.span.col(0) = corners[b] - corners[a];
  p.span.col(1) = corners[c] - corners[a];
  return p;
}

}  // namespace boxmetrics
