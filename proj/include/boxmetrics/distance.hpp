#pragma once

// Volume-to-volume distance between two oriented boxes.
//
// The closest pair of surface points is one of a finite set of point-pairs
// of interest: corner/face projections, corner/edge projections, edge/edge
// closest points and corner/corner pairs. Every candidate is a pair of real
// surface points, so the minimum over candidates is exact.

#include "boxmetrics/core.hpp"
#include "boxmetrics/intersection.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace boxmetrics {

enum class PairSource { CornerAFaceB, CornerBFaceA, CornerAEdgeB, CornerBEdgeA, EdgeAEdgeB,
                        CornerACornerB };

struct PointPair {
  Vec3 on_a;
  Vec3 on_b;
  double distance;
  PairSource source;
  int feature_a;  // index of the corner, edge or face on A
  int feature_b;  // index of the corner, edge or face on B
};

struct FaceProjection {
  double distance;  // unsigned distance to the face plane
  Vec3 projected;
  Eigen::Vector2d params;
};

struct EdgeProjection {
  double t;
  Vec3 projected;
};

struct SegmentClosest {
  double t_a;
  double t_b;
  Vec3 on_a;
  Vec3 on_b;

  double distance() const { return (on_a - on_b).norm(); }
};

namespace detail {

inline bool in_unit_window(double t, double tol) { return t >= -tol && t <= 1.0 + tol; }

inline std::optional<FaceProjection> project_onto_face(const Vec3& point, const PlaneParam& plane,
                                                       const Vec3& normal, double tol) {
  const Vec3 v = point - plane.origin;
  const double d = normal.dot(v);
  // Box face spans are orthogonal, so the pseudo-inverse is a per-column
  // projection. General form: (N^T N)^-1 N^T v.
  const Eigen::Matrix2d gram = plane.span.transpose() * plane.span;
  const Eigen::Vector2d params = gram.ldlt().solve(plane.span.transpose() * v);
  if (!in_unit_window(params[0], tol) || !in_unit_window(params[1], tol)) return std::nullopt;
  return FaceProjection{std::abs(d), point - normal * d, params};
}

inline std::optional<EdgeProjection> project_onto_line(const Vec3& point, const LineParam& line,
                                                       double tol) {
  const double t = (point - line.origin).dot(line.slope) / line.slope.squaredNorm();
  if (!in_unit_window(t, tol)) return std::nullopt;
  return EdgeProjection{t, line.at(t)};
}

}  // namespace detail

/// Orthogonal projection of a point onto face `face` (0..5) of `box`. Absent
/// when the projection falls outside the face rectangle.
inline std::optional<FaceProjection> project_point_onto_face(const Vec3& point,
                                                             const OrientedBox& box, int face,
                                                             double tol = kDefaultTol) {
  return detail::project_onto_face(point, face_plane(box_corners(box), face),
                                   face_normal(box, face), tol);
}

/// Orthogonal projection of a point onto edge `edge` (0..11) of `box`. Absent
/// when the foot parameter is outside [0, 1].
inline std::optional<EdgeProjection> project_point_onto_edge(const Vec3& point,
                                                             const OrientedBox& box, int edge,
                                                             double tol = kDefaultTol) {
  return detail::project_onto_line(point, edge_line(box_corners(box), edge), tol);
}

/// Closest points of two non-parallel segments from the normal equations of
///   min_{s,t} |a.origin + a.slope s - b.origin - b.slope t|^2.
/// Absent for (near-)parallel segments or when the unconstrained minimizer
/// lies outside the two segments.
inline std::optional<SegmentClosest> closest_points_between_edges(const LineParam& a,
                                                                  const LineParam& b,
                                                                  double tol = kDefaultTol) {
  const Vec3 w = a.origin - b.origin;
  const double aa = a.slope.squaredNorm();
  const double bb = b.slope.squaredNorm();
  const double ab = a.slope.dot(b.slope);
  const double aw = a.slope.dot(w);
  const double bw = b.slope.dot(w);
  const double gram = aa * bb - ab * ab;
  if (std::abs(gram) <= 1e-12 * aa * bb) return std::nullopt;
  const double s = (ab * bw - bb * aw) / gram;
  const double t = (aa * bw - ab * aw) / gram;
  if (!detail::in_unit_window(s, tol) || !detail::in_unit_window(t, tol)) return std::nullopt;
  return SegmentClosest{s, t, a.at(s), b.at(t)};
}

/// Exact distance between two segments using the same candidate cases as
/// the box distance: interior/interior, endpoint/segment, endpoint/endpoint.
inline double segment_distance(const LineParam& a, const LineParam& b, double tol = kDefaultTol) {
  double best = std::numeric_limits<double>::infinity();
  if (auto c = closest_points_between_edges(a, b, tol)) best = c->distance();
  const std::array<Vec3, 2> ends_a{a.origin, a.at(1.0)};
  const std::array<Vec3, 2> ends_b{b.origin, b.at(1.0)};
  for (const auto& p : ends_a) {
    if (auto q = detail::project_onto_line(p, b, tol)) best = std::min(best, (p - q->projected).norm());
    for (const auto& r : ends_b) best = std::min(best, (p - r).norm());
  }
  for (const auto& p : ends_b)
    if (auto q = detail::project_onto_line(p, a, tol)) best = std::min(best, (p - q->projected).norm());
  return best;
}

/// Every valid point-pair of interest between the hulls of A and B
/// (at most 496 entries; exactly 64 corner/corner pairs).
inline std::vector<PointPair> enumerate_ppois(const OrientedBox& a, const OrientedBox& b,
                                              double tol = kDefaultTol) {
  const Corners ca = box_corners(a);
  const Corners cb = box_corners(b);
  std::vector<PointPair> out;
  out.reserve(496);

  auto corner_face = [&](const Corners& corners, const Corners& other, const OrientedBox& box,
                         bool corner_on_a) {
    for (int f = 0; f < 6; ++f) {
      const PlaneParam plane = face_plane(other, f);
      const Vec3 n = face_normal(box, f);
      for (int c = 0; c < 8; ++c) {
        const auto proj = detail::project_onto_face(corners[c], plane, n, tol);
        if (!proj) continue;
        if (corner_on_a)
          out.push_back({corners[c], proj->projected, (corners[c] - proj->projected).norm(),
                         PairSource::CornerAFaceB, c, f});
        else
          out.push_back({proj->projected, corners[c], (corners[c] - proj->projected).norm(),
                         PairSource::CornerBFaceA, f, c});
      }
    }
  };
  auto corner_edge = [&](const Corners& corners, const Corners& other, bool corner_on_a) {
    for (int e = 0; e < 12; ++e) {
      const LineParam line = edge_line(other, e);
      for (int c = 0; c < 8; ++c) {
        const auto proj = detail::project_onto_line(corners[c], line, tol);
        if (!proj) continue;
        if (corner_on_a)
          out.push_back({corners[c], proj->projected, (corners[c] - proj->projected).norm(),
                         PairSource::CornerAEdgeB, c, e});
        else
          out.push_back({proj->projected, corners[c], (corners[c] - proj->projected).norm(),
                         PairSource::CornerBEdgeA, e, c});
      }
    }
  };

  corner_face(ca, cb, b, true);
  corner_face(cb, ca, a, false);
  corner_edge(ca, cb, true);
  corner_edge(cb, ca, false);
  for (int i = 0; i < 12; ++i) {
    const LineParam la = edge_line(ca, i);
    for (int j = 0; j < 12; ++j) {
      if (auto c = closest_points_between_edges(la, edge_line(cb, j), tol))
        out.push_back({c->on_a, c->on_b, c->distance(), PairSource::EdgeAEdgeB, i, j});
    }
  }
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      out.push_back({ca[i], cb[j], (ca[i] - cb[j]).norm(), PairSource::CornerACornerB, i, j});
  return out;
}

/// Shortest surface-to-surface distance; 0 whenever the intersection has
/// positive volume.
inline double v2v(const OrientedBox& a, const OrientedBox& b, double tol = kDefaultTol) {
  if (intersection_volume(a, b, tol) > 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : enumerate_ppois(a, b, tol)) best = std::min(best, p.distance);
  return best;
}

}  // namespace boxmetrics
