#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace boxmetrics;
using namespace boxmetrics::testing;

namespace {

const OrientedBox kUnit = OrientedBox::unit_cube();
const OrientedBox kShifted = OrientedBox::unit_cube({0.5, 0, 0});
const OrientedBox kFar = OrientedBox::unit_cube({10, 0, 0});

OrientedBox with_rotation(const Mat3& r) { return {Vec3::Zero(), r, Vec3::Ones()}; }

TEST(Bbd, GoldenCases) {
  EXPECT_NEAR(bbd(kUnit, kUnit), 0.0, 1e-12);
  EXPECT_NEAR(bbd(kUnit, kShifted), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(bbd(kUnit, kFar), 10.0, 1e-12);
}

TEST(Bbd, ContinuousAcrossContact) {
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double overlap = bbd(kUnit, OrientedBox::unit_cube({1 - delta, 0, 0}));
    const double gap = bbd(kUnit, OrientedBox::unit_cube({1 + delta, 0, 0}));
    EXPECT_NEAR(overlap, 1 - delta / (2 - delta), 1e-9);
    EXPECT_NEAR(gap, 1 + delta, 1e-9);
    EXPECT_LE(std::abs(gap - overlap), 3 * delta);
  }
}

TEST(Bbd, DefinitionHoldsOnRandomPairs) {
  for (const auto& [a, b] : random_pairs(200, 41)) {
    const MetricReport r = full_report(a, b);
    EXPECT_NEAR(r.bbd, 1 - r.iou + r.v2v, 1e-12);
    EXPECT_GE(r.bbd, 0.0);
    EXPECT_NEAR(bbd(a, a), 0.0, 1e-9);
  }
}

TEST(PositionDifference, Examples) {
  auto p = position_difference(kUnit, kUnit);
  EXPECT_EQ(p.abs, 0.0);
  EXPECT_EQ(p.squared, 0.0);
  p = position_difference(kUnit, OrientedBox::unit_cube({3, 4, 0}));
  EXPECT_DOUBLE_EQ(p.abs, 5.0);
  EXPECT_DOUBLE_EQ(p.squared, 25.0);
  p = position_difference(OrientedBox::unit_cube({1, 1, 1}), OrientedBox::unit_cube({1, 1, 2}));
  EXPECT_DOUBLE_EQ(p.abs, 1.0);
  EXPECT_DOUBLE_EQ(p.squared, 1.0);
}

TEST(SizeDifference, Examples) {
  auto s = size_difference(kUnit, kUnit);
  EXPECT_EQ(s.abs, 0.0);
  EXPECT_EQ(s.squared, 0.0);
  s = size_difference(kUnit, OrientedBox::axis_aligned(Vec3::Zero(), {2, 3, 1}));
  EXPECT_DOUBLE_EQ(s.abs, 3.0);
  EXPECT_DOUBLE_EQ(s.squared, 5.0);
  s = size_difference(OrientedBox::axis_aligned(Vec3::Zero(), {2, 2, 2}), kUnit);
  EXPECT_DOUBLE_EQ(s.abs, 3.0);
  EXPECT_DOUBLE_EQ(s.squared, 3.0);
}

TEST(QuaternionDistance, Examples) {
  OracleRng rng(42);
  const OrientedBox r = with_rotation(rng.rotation());
  EXPECT_EQ(quaternion_distance(r, r), 0.0);
  EXPECT_NEAR(quaternion_distance(kUnit, with_rotation(rot_z(kPi / 2))), kPi / 2, 1e-12);
  // q and -q describe the same rotation.
  const auto pos = OrientedBox::from_quaternion(Vec3::Zero(), {0.5, 0.5, 0.5, 0.5}, Vec3::Ones());
  const auto neg = OrientedBox::from_quaternion(Vec3::Zero(), {-0.5, -0.5, -0.5, -0.5}, Vec3::Ones());
  EXPECT_NEAR(quaternion_distance(pos, neg), 0.0, 1e-12);
}

TEST(MatrixGeodesicDistance, Examples) {
  EXPECT_EQ(matrix_geodesic_distance(kUnit, kUnit), 0.0);
  EXPECT_NEAR(matrix_geodesic_distance(kUnit, with_rotation(rot_z(kPi))), kPi, 1e-12);
  EXPECT_NEAR(matrix_geodesic_distance(kUnit, with_rotation(rot_z(kPi / 2))), kPi / 2, 1e-12);
}

TEST(RotationDistances, AgreeSymmetricAndLeftInvariant) {
  OracleRng rng(43);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 ra = rng.rotation(), rb = rng.rotation(), q = rng.rotation();
    const auto a = with_rotation(ra), b = with_rotation(rb);
    const double dq = quaternion_distance(a, b);
    const double dm = matrix_geodesic_distance(a, b);
    EXPECT_NEAR(dq, dm, 1e-9);
    EXPECT_NEAR(quaternion_distance(b, a), dq, 1e-9);
    EXPECT_NEAR(matrix_geodesic_distance(b, a), dm, 1e-9);
    EXPECT_NEAR(quaternion_distance(with_rotation(q * ra), with_rotation(q * rb)), dq, 1e-9);
    EXPECT_NEAR(matrix_geodesic_distance(with_rotation(q * ra), with_rotation(q * rb)), dm, 1e-9);
  }
}

TEST(EulerAngleDifference, Examples) {
  auto d = euler_angle_difference(kUnit, kUnit);
  EXPECT_EQ(d.angles, Vec3::Zero());
  EXPECT_FALSE(d.gimbal_lock);

  d = euler_angle_difference(kUnit, with_rotation(rot_z(kPi / 2)));
  EXPECT_LT((d.angles - Vec3(0, 0, kPi / 2)).norm(), 1e-12);

  const double deg = kPi / 180;
  d = euler_angle_difference(with_rotation(rot_z(350 * deg)), with_rotation(rot_z(10 * deg)));
  EXPECT_LT((d.angles - Vec3(0, 0, 20 * deg)).norm(), 1e-12);
}

TEST(EulerAngleDifference, DecompositionRoundTripAndGimbalFlag) {
  OracleRng rng(44);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r = rng.rotation();
    const EulerXYZ e = euler_xyz_from_rotation(r);
    EXPECT_LT((rotation_from_euler_xyz(e.angles) - r).cwiseAbs().maxCoeff(), 1e-9);
  }
  const EulerXYZ locked = euler_xyz_from_rotation(rotation_from_euler_xyz({0.3, kPi / 2, 0.2}));
  EXPECT_TRUE(locked.gimbal_lock);
  EXPECT_LT((rotation_from_euler_xyz(locked.angles) -
             rotation_from_euler_xyz({0.3, kPi / 2, 0.2})).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
}

TEST(PointBasedIou, Examples) {
  PointCloud inside{{{0, 0, 0}, {0.1, 0.1, 0.1}}};
  EXPECT_EQ(point_based_iou(inside, kUnit, kUnit), 1.0);

  PointCloud mixed{{{-0.4, 0, 0}, {0.4, 0, 0}, {2, 0, 0}}};
  EXPECT_EQ(point_based_iou(mixed, kUnit, kShifted), 0.5);

  PointCloud outside{{{5, 5, 5}}};
  EXPECT_THROW(point_based_iou(outside, kUnit, kShifted), UndefinedRatio);
  EXPECT_THROW(point_based_iou(PointCloud{}, kUnit, kShifted), std::invalid_argument);
}

TEST(PointBasedIou, BoundaryCountsAndRigidInvariance) {
  PointCloud face{{{0.5, 0, 0}}};
  EXPECT_EQ(point_based_iou(face, kUnit, kUnit), 1.0);

  OracleRng rng(45);
  for (const auto& [a, b] : overlapping_pairs(50, 46)) {
    PointCloud cloud;
    for (int i = 0; i < 300; ++i) cloud.points.push_back(a.center() + rng.vec(1.5));
    double v = 0;
    try {
      v = point_based_iou(cloud, a, b);
    } catch (const UndefinedRatio&) {
      continue;
    }
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    const Mat3 q = rng.rotation();
    const Vec3 t = rng.vec(10.0);
    PointCloud moved;
    for (const auto& p : cloud.points) moved.points.push_back(q * p + t);
    EXPECT_EQ(point_based_iou(moved, a.moved(q, t), b.moved(q, t)), v);
  }
}

TEST(FullReport, Examples) {
  MetricReport r = full_report(kUnit, kUnit);
  EXPECT_NEAR(r.iou, 1.0, 1e-12);
  EXPECT_EQ(r.v2v, 0.0);
  EXPECT_NEAR(r.bbd, 0.0, 1e-12);
  EXPECT_EQ(r.position_diff.abs, 0.0);
  EXPECT_EQ(r.size_diff.abs, 0.0);
  EXPECT_EQ(r.rotation.quaternion_dist, 0.0);
  EXPECT_FALSE(r.point_iou);
  EXPECT_TRUE(r.warnings.empty());

  r = full_report(kUnit, kShifted);
  EXPECT_NEAR(r.iou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.bbd, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.position_diff.abs, 0.5);

  r = full_report(kUnit, kFar);
  EXPECT_EQ(r.iou, 0.0);
  EXPECT_NEAR(r.v2v, 9.0, 1e-12);
  EXPECT_NEAR(r.bbd, 10.0, 1e-12);
}

TEST(FullReport, CloudWarnings) {
  PointCloud outside{{{5, 5, 5}}};
  MetricReport r = full_report(kUnit, kShifted, &outside);
  EXPECT_FALSE(r.point_iou);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0], kWarnUndefinedRatio);

  PointCloud mixed{{{-0.4, 0, 0}, {0.4, 0, 0}, {2, 0, 0}}};
  r = full_report(kUnit, kShifted, &mixed);
  ASSERT_TRUE(r.point_iou);
  EXPECT_EQ(*r.point_iou, 0.5);

  const OrientedBox locked = OrientedBox::from_euler_xyz(Vec3::Zero(), {0, kPi / 2, 0}, Vec3::Ones());
  r = full_report(kUnit, locked);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0], kWarnGimbalLock);
}

}  // namespace
