#pragma once

// Incremental 3D convex hull and signed-tetrahedron polytope volume.

#include "boxmetrics/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace boxmetrics {

/// Closed convex polytope with outward-oriented triangular faces.
struct ConvexPolytope {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  double volume = 0.0;
};

/// Sum over faces of the signed volume of the tetrahedron (face, reference),
/// returned as an absolute value. Independent of the reference point for a
/// closed, consistently oriented surface.
inline double polytope_volume(const ConvexPolytope& hull, const Vec3& reference) {
  double six_v = 0.0;
  for (const auto& f : hull.faces) {
    const Vec3 a = hull.vertices[f[0]] - reference;
    const Vec3 b = hull.vertices[f[1]] - reference;
    const Vec3 c = hull.vertices[f[2]] - reference;
    six_v += a.dot(b.cross(c));
  }
  return std::abs(six_v) / 6.0;
}

inline double polytope_volume(const ConvexPolytope& hull) {
  Vec3 centroid = Vec3::Zero();
  for (const auto& v : hull.vertices) centroid += v;
  if (!hull.vertices.empty()) centroid /= static_cast<double>(hull.vertices.size());
  return polytope_volume(hull, centroid);
}

namespace detail {

struct HullFace {
  std::array<int, 3> v;
  Vec3 normal;  // unit, outward
  double offset;
  bool alive = true;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

inline std::int64_t edge_key(int a, int b) {
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace detail

/// Convex hull of a point set. Returns nullopt (degenerate) when the set has
/// no four affinely independent points, judged with a coplanarity epsilon of
/// rel_eps times the bounding-box diagonal of the input.
inline std::optional<ConvexPolytope> convex_hull(std::span<const Vec3> points,
                                                 double rel_eps = 1e-10) {
  using detail::HullFace;
  const int n = static_cast<int>(points.size());
  if (n < 4) return std::nullopt;

  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diameter = (hi - lo).norm();
  if (!(diameter > 0.0)) return std::nullopt;
  const double eps = rel_eps * diameter;

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (points[i].x() < points[i0].x()) i0 = i;
  int i1 = -1;
  double best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = (points[i] - points[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (i1 < 0) return std::nullopt;
  const Vec3 dir01 = (points[i1] - points[i0]).normalized();
  int i2 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = (points[i] - points[i0]).cross(dir01).norm();
    if (d > best) best = d, i2 = i;
  }
  if (i2 < 0) return std::nullopt;
  const Vec3 n012 = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(n012.dot(points[i] - points[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (i3 < 0) return std::nullopt;

  std::vector<HullFace> faces;
  std::unordered_map<std::int64_t, int> edge_owner;  // directed edge -> face
  const Vec3 interior = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;

  auto add_face = [&](int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    f.normal = (points[b] - points[a]).cross(points[c] - points[a]).normalized();
    f.offset = f.normal.dot(points[a]);
    const int idx = static_cast<int>(faces.size());
    faces.push_back(f);
    edge_owner[detail::edge_key(a, b)] = idx;
    edge_owner[detail::edge_key(b, c)] = idx;
    edge_owner[detail::edge_key(c, a)] = idx;
  };
  auto add_oriented = [&](int a, int b, int c) {
    const Vec3 nrm = (points[b] - points[a]).cross(points[c] - points[a]);
    if (nrm.dot(interior - points[a]) > 0.0)
      add_face(a, c, b);
    else
      add_face(a, b, c);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  std::vector<int> visible;
  std::vector<std::array<int, 2>> horizon;
  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && faces[f].signed_distance(points[p]) > eps) visible.push_back(f);
    if (visible.empty()) continue;

    for (int f : visible) faces[f].alive = false;
    horizon.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        const auto it = edge_owner.find(detail::edge_key(b, a));
        if (it != edge_owner.end() && faces[it->second].alive) horizon.push_back({a, b});
      }
    }
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        const auto it = edge_owner.find(detail::edge_key(v[k], v[(k + 1) % 3]));
        if (it != edge_owner.end() && it->second == f) edge_owner.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  ConvexPolytope hull;
  std::vector<int> remap(n, -1);
  for (const auto& f : faces) {
    if (!f.alive) continue;
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      int& r = remap[f.v[k]];
      if (r < 0) {
        r = static_cast<int>(hull.vertices.size());
        hull.vertices.push_back(points[f.v[k]]);
      }
      tri[k] = r;
    }
    hull.faces.push_back(tri);
  }
  hull.volume = polytope_volume(hull);
  return hull;
}

}  // namespace boxmetrics
