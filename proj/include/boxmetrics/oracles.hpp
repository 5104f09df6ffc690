#pragma once

// Slow, independent reference computations used for differential testing:
// Monte-Carlo IoU, surface-lattice distance and grid-search segment distance.
// None of these reuse the intersection or distance pipelines.

#include "boxmetrics/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace boxmetrics {

struct OracleConfig {
  std::uint64_t sample_count = 1'000'000;
  std::uint64_t seed = 42;
  int grid_res = 32;  // lattice points per face edge

  void validate() const {
    if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    if (grid_res < 2) throw std::invalid_argument("grid_res must be >= 2");
  }
};

/// Portable random source: std::mt19937_64 (whose output sequence is fixed by
/// the standard) with hand-rolled uniform and normal transforms, so that
/// seeded results do not depend on the standard library's distributions.
///   uniform01: top 53 bits of the engine output times 2^-53, in [0, 1).
///   normal:    Box-Muller cosine branch, one engine pair per variate.
class OracleRng {
public:
  explicit OracleRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform on SO(3) via a normalized 4D Gaussian quaternion.
  Mat3 rotation() {
    Eigen::Quaterniond q;
    do {
      q = Eigen::Quaterniond(normal(), normal(), normal(), normal());
    } while (q.norm() < 1e-12);
    return q.normalized().toRotationMatrix();
  }

  /// Center in [-2,2]^3, dimensions in [0.2,2], uniform rotation.
  OrientedBox box(double center_range = 2.0, double dim_lo = 0.2, double dim_hi = 2.0) {
    const Vec3 c{uniform(-center_range, center_range), uniform(-center_range, center_range),
                 uniform(-center_range, center_range)};
    const Vec3 d{uniform(dim_lo, dim_hi), uniform(dim_lo, dim_hi), uniform(dim_lo, dim_hi)};
    return {c, rotation(), d};
  }

  Vec3 vec(double range) { return {uniform(-range, range), uniform(-range, range), uniform(-range, range)}; }

private:
  std::mt19937_64 engine_;
};

struct McEstimate {
  double estimate;
  double std_error;
};

namespace oracle_detail {

inline bool inside_closed(const OrientedBox& box, const Vec3& p) {
  const Vec3 local = box.rotation().transpose() * (p - box.center());
  return (local.array().abs() <= 0.5 * box.dimensions().array()).all();
}

}  // namespace oracle_detail

/// Monte-Carlo IoU: uniform samples in A, hit fraction f in B gives
/// V_I = f vol(A). Standard error propagates the binomial variance of f
/// through V_I / (vol(A) + vol(B) - V_I).
inline McEstimate mc_iou(const OrientedBox& a, const OrientedBox& b, const OracleConfig& cfg) {
  cfg.validate();
  OracleRng rng(cfg.seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < cfg.sample_count; ++i) {
    const Vec3 u{rng.uniform01() - 0.5, rng.uniform01() - 0.5, rng.uniform01() - 0.5};
    const Vec3 p = a.center() + a.rotation() * a.dimensions().cwiseProduct(u);
    hits += oracle_detail::inside_closed(b, p) ? 1 : 0;
  }
  const double n = static_cast<double>(cfg.sample_count);
  const double f = static_cast<double>(hits) / n;
  const double va = a.volume();
  const double sum = va + b.volume();
  const double vi = f * va;
  const double est = vi / (sum - vi);
  const double d_est_d_f = va * sum / ((sum - vi) * (sum - vi));
  return {est, d_est_d_f * std::sqrt(f * (1.0 - f) / n)};
}

/// grid_res x grid_res lattice on each face of the box, corners included.
inline std::vector<Vec3> surface_lattice(const OrientedBox& box, int grid_res) {
  std::vector<Vec3> pts;
  pts.reserve(6 * grid_res * grid_res);
  const double step = 1.0 / (grid_res - 1);
  for (int axis = 0; axis < 3; ++axis) {
    const int i1 = (axis + 1) % 3, i2 = (axis + 2) % 3;
    for (double side : {-0.5, 0.5}) {
      for (int p = 0; p < grid_res; ++p) {
        for (int q = 0; q < grid_res; ++q) {
          Vec3 u;
          u[axis] = side;
          u[i1] = p == grid_res - 1 ? 0.5 : -0.5 + p * step;
          u[i2] = q == grid_res - 1 ? 0.5 : -0.5 + q * step;
          pts.push_back(box.center() + box.rotation() * box.dimensions().cwiseProduct(u));
        }
      }
    }
  }
  return pts;
}

/// Largest lattice cell diagonal over the faces of both boxes.
inline double lattice_cell_diagonal(const OrientedBox& a, const OrientedBox& b, int grid_res) {
  double worst = 0.0;
  for (const OrientedBox* box : {&a, &b}) {
    const Vec3& d = box->dimensions();
    worst = std::max({worst, std::hypot(d[0], d[1]), std::hypot(d[1], d[2]), std::hypot(d[0], d[2])});
  }
  return worst / (grid_res - 1);
}

/// Minimum pairwise distance between the two surface lattices, or 0 if any
/// lattice point of one box lies inside the other. An upper bound on the
/// true surface distance.
inline double sampled_v2v(const OrientedBox& a, const OrientedBox& b, const OracleConfig& cfg) {
  cfg.validate();
  const std::vector<Vec3> pa = surface_lattice(a, cfg.grid_res);
  const std::vector<Vec3> pb = surface_lattice(b, cfg.grid_res);
  for (const auto& p : pa)
    if (oracle_detail::inside_closed(b, p)) return 0.0;
  for (const auto& p : pb)
    if (oracle_detail::inside_closed(a, p)) return 0.0;

  const std::size_t m = pb.size();
  std::vector<double> bx(m), by(m), bz(m);
  for (std::size_t j = 0; j < m; ++j) bx[j] = pb[j].x(), by[j] = pb[j].y(), bz[j] = pb[j].z();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pa) {
    const double x = p.x(), y = p.y(), z = p.z();
    double local = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = x - bx[j], dy = y - by[j], dz = z - bz[j];
      local = std::min(local, dx * dx + dy * dy + dz * dz);
    }
    best = std::min(best, local);
  }
  return std::sqrt(best);
}

/// Segment given by its two endpoints.
struct Segment {
  Vec3 start;
  Vec3 end;
};

/// Minimum of |A(s) - B(t)| over a steps x steps parameter grid on [0,1]^2.
inline double brute_segment_distance(const Segment& a, const Segment& b, int steps) {
  if (steps < 2) throw std::invalid_argument("steps must be >= 2");
  std::vector<Vec3> pb(steps);
  for (int j = 0; j < steps; ++j) {
    const double t = static_cast<double>(j) / (steps - 1);
    pb[j] = b.start + (b.end - b.start) * t;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i) {
    const double s = static_cast<double>(i) / (steps - 1);
    const Vec3 p = a.start + (a.end - a.start) * s;
    for (const auto& q : pb) best = std::min(best, (p - q).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace boxmetrics
