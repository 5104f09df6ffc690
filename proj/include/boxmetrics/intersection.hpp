#pragma once

// Exact volumetric intersection and IoU of two oriented boxes.
//
// The intersection of two boxes is a convex polytope whose vertices are
// drawn from four candidate sets: corners of A inside B, corners of B inside
// A, and the crossings of each box's edges with the other box's face planes.
// Candidates surviving the dual containment test are hulled and the hull's
// volume is the intersection volume.

#include "boxmetrics/core.hpp"
#include "boxmetrics/hull.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace boxmetrics {

enum class CandidateSource { CornerOfA, CornerOfB, EdgeAFaceB, EdgeBFaceA };

struct CandidatePoint {
  Vec3 position;
  CandidateSource source;
  int corner = -1;  // for CornerOf*
  int edge = -1;    // for Edge*Face*
  int face = -1;
  double t = 0.0;  // edge parameter for Edge*Face*
};

struct EdgeFaceResult {
  std::vector<CandidatePoint> points;
  int singular = 0;  // systems skipped as edge parallel to / inside the plane
};

namespace detail {

/// Crossings of every edge of `edges_of` with every face plane of `faces_of`.
inline void edge_plane_crossings(const Corners& edges_of, const Corners& faces_of,
                                 CandidateSource source, double tol, EdgeFaceResult& out) {
  for (int f = 0; f < 6; ++f) {
    const PlaneParam plane = face_plane(faces_of, f);
    const Vec3 plane_normal = plane.span.col(0).cross(plane.span.col(1));
    const double span_scale = plane_normal.norm();
    for (int e = 0; e < 12; ++e) {
      const LineParam line = edge_line(edges_of, e);
      // origin + m t = f0 + N tp  =>  [m | -N] (t, tp) = f0 - origin.
      // Only t is needed; by Cramer's rule with the plane normal N1 x N2:
      //   t = n.(f0 - origin) / n.m
      const double denom = plane_normal.dot(line.slope);
      if (std::abs(denom) <= 1e-12 * span_scale * line.slope.norm()) {
        ++out.singular;
        continue;
      }
      const double t = plane_normal.dot(plane.origin - line.origin) / denom;
      if (t < -tol || t > 1.0 + tol) continue;
      out.points.push_back({line.at(t), source, -1, e, f, t});
    }
  }
}

}  // namespace detail

/// Solves the 144 edge/face-plane systems in both directions. Face-parameter
/// bounds are not enforced; the dual containment filter removes those points.
inline EdgeFaceResult edge_face_intersections(const OrientedBox& a, const OrientedBox& b,
                                              double tol = kDefaultTol) {
  EdgeFaceResult out;
  out.points.reserve(48);
  const Corners ca = box_corners(a);
  const Corners cb = box_corners(b);
  detail::edge_plane_crossings(ca, cb, CandidateSource::EdgeAFaceB, tol, out);
  detail::edge_plane_crossings(cb, ca, CandidateSource::EdgeBFaceA, tol, out);
  return out;
}

/// All 16 corners plus the edge/face-plane crossings, unfiltered.
inline std::vector<CandidatePoint> candidate_points(const OrientedBox& a, const OrientedBox& b,
                                                    double tol = kDefaultTol) {
  EdgeFaceResult ef = edge_face_intersections(a, b, tol);
  std::vector<CandidatePoint> out;
  out.reserve(16 + ef.points.size());
  const Corners ca = box_corners(a);
  const Corners cb = box_corners(b);
  for (int j = 0; j < 8; ++j) out.push_back({ca[j], CandidateSource::CornerOfA, j});
  for (int j = 0; j < 8; ++j) out.push_back({cb[j], CandidateSource::CornerOfB, j});
  out.insert(out.end(), ef.points.begin(), ef.points.end());
  return out;
}

/// Radius below which two candidate points are treated as one vertex.
inline double dedupe_radius(const OrientedBox& a, const OrientedBox& b) {
  return 1e-9 * std::max(a.diagonal(), b.diagonal());
}

/// Keeps the candidates contained in both boxes (closed, tolerance tol) and
/// merges points closer than dedupe_radius(a, b). First occurrence wins.
inline std::vector<Vec3> filter_valid(const std::vector<CandidatePoint>& points,
                                      const OrientedBox& a, const OrientedBox& b,
                                      double tol = kDefaultTol) {
  const double r2 = std::pow(dedupe_radius(a, b), 2);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& c : points) {
    if (!contains_point(a, c.position, tol) || !contains_point(b, c.position, tol)) continue;
    bool duplicate = false;
    for (const auto& q : out) {
      if ((q - c.position).squaredNorm() <= r2) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(c.position);
  }
  return out;
}

/// Hull of the intersection region, or nullopt when it has no volume.
inline std::optional<ConvexPolytope> intersection_polytope(const OrientedBox& a,
                                                           const OrientedBox& b,
                                                           double tol = kDefaultTol) {
  const std::vector<Vec3> valid = filter_valid(candidate_points(a, b, tol), a, b, tol);
  return convex_hull(valid);
}

/// Volume of the intersection; 0 when the valid points are degenerate.
inline double intersection_volume(const OrientedBox& a, const OrientedBox& b,
                                  double tol = kDefaultTol) {
  const auto hull = intersection_polytope(a, b, tol);
  return hull ? hull->volume : 0.0;
}

/// Volumetric intersection over union, in [0, 1].
inline double iou(const OrientedBox& a, const OrientedBox& b, double tol = kDefaultTol) {
  const double va = a.volume();
  const double vb = b.volume();
  const double vi = std::min(intersection_volume(a, b, tol), std::min(va, vb));
  return vi / (va + vb - vi);
}

}  // namespace boxmetrics
