#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace boxmetrics;
using namespace boxmetrics::testing;

namespace {

TEST(BoxToTransform, UnitCubeIsIdentity) {
  EXPECT_TRUE(box_to_transform(OrientedBox::unit_cube()).isApprox(Mat4::Identity(), 0.0));
}

TEST(BoxToTransform, PureScaling) {
  const Mat4 t = box_to_transform(OrientedBox::axis_aligned(Vec3::Zero(), {2, 1, 1}));
  Mat4 expected = Mat4::Identity();
  expected(0, 0) = 2;
  EXPECT_EQ(t, expected);
}

TEST(BoxToTransform, RotatedTranslatedCornersMatchDirectMultiplication) {
  const OrientedBox box({1, 2, 3}, rot_z(kPi / 2), Vec3::Ones());
  const Mat4 t = box_to_transform(box);
  EXPECT_LT((t.topLeftCorner<3, 3>() - rot_z(kPi / 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(t.col(3), Eigen::Vector4d(1, 2, 3, 1));
  EXPECT_EQ(t.row(3), Eigen::RowVector4d(0, 0, 0, 1));
  const auto corners = box_corners(box);
  for (int j = 0; j < 8; ++j) {
    const Vec3 u = topology::unit_corners().col(j);
    const Vec3 direct = rot_z(kPi / 2) * u + Vec3(1, 2, 3);
    const Eigen::Vector4d hom = t * u.homogeneous();
    EXPECT_LT((corners[j] - direct).norm(), 1e-15);
    EXPECT_LT((hom.head<3>() - direct).norm(), 1e-15);
  }
}

TEST(BoxToTransform, InverseRoundTrip) {
  OracleRng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Mat4 t = box_to_transform(rng.box());
    EXPECT_LT((t * t.inverse() - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(BoxCorners, UnitCubeCornersAreUnitTable) {
  const auto c = box_corners(OrientedBox::unit_cube());
  for (int j = 0; j < 8; ++j) EXPECT_EQ(c[j], Vec3(topology::unit_corners().col(j)));
}

TEST(BoxCorners, UniformScaleFollowsSignPattern) {
  const auto c = box_corners(OrientedBox::axis_aligned(Vec3::Zero(), {2, 2, 2}));
  for (int j = 0; j < 8; ++j) EXPECT_EQ(c[j], Vec3(2.0 * topology::unit_corners().col(j)));
}

TEST(BoxCorners, RotatedFirstCorner) {
  const auto c = box_corners(OrientedBox(Vec3::Zero(), rot_z(kPi / 4), Vec3::Ones()));
  EXPECT_NEAR(c[0].x(), 0.0, 1e-15);
  EXPECT_NEAR(c[0].y(), -kSqrt2 / 2, 1e-15);
  EXPECT_NEAR(c[0].z(), -0.5, 1e-15);
}

TEST(WorldToUnit, Examples) {
  OracleRng rng(3);
  const OrientedBox any = rng.box();
  EXPECT_LT(world_to_unit(any, any.center()).norm(), 1e-15);
  EXPECT_EQ(world_to_unit(OrientedBox::unit_cube(), {0.5, 0, 0}), Vec3(0.5, 0, 0));
  EXPECT_EQ(world_to_unit(OrientedBox::axis_aligned(Vec3::Zero(), {2, 1, 1}), {1, 0, 0}),
            Vec3(0.5, 0, 0));
}

TEST(WorldToUnit, RoundTripThousandRandom) {
  OracleRng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox box = rng.box();
    const Vec3 p = rng.vec(5.0);
    const Vec3 back = unit_to_world(box, world_to_unit(box, p));
    const Eigen::Vector4d hom = box_to_transform(box) * world_to_unit(box, p).homogeneous();
    EXPECT_LE((back - p).norm(), 1e-9 * std::max(1.0, p.norm()));
    EXPECT_LE((hom.head<3>() - p).norm(), 1e-9 * std::max(1.0, p.norm()));
  }
}

TEST(ContainsPoint, ClosedWithTolerance) {
  const auto cube = OrientedBox::unit_cube();
  EXPECT_TRUE(contains_point(cube, {0, 0, 0}, 1e-9));
  EXPECT_TRUE(contains_point(cube, {0.5, 0, 0}, 1e-9));
  EXPECT_FALSE(contains_point(cube, {0.5 + 1e-6, 0, 0}, 1e-9));
}

TEST(ContainsPoint, EveryCornerIsContained) {
  OracleRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const OrientedBox box = rng.box();
    for (const auto& c : box_corners(box)) EXPECT_TRUE(contains_point(box, c, 1e-9));
  }
}

TEST(ContainsPoint, RigidEquivariance) {
  OracleRng rng(9);
  for (int i = 0; i < 500; ++i) {
    const OrientedBox box = rng.box();
    // Points near the boundary are the interesting ones.
    const Vec3 u = Vec3(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
    const Vec3 p = unit_to_world(box, u);
    const Mat3 q = rng.rotation();
    const Vec3 t = rng.vec(10.0);
    if (std::abs(u.cwiseAbs().maxCoeff() - 0.5) < 1e-6) continue;
    EXPECT_EQ(contains_point(box, p), contains_point(box.moved(q, t), q * p + t));
  }
}

TEST(Topology, CornersAreHalfUnits) {
  EXPECT_TRUE((topology::unit_corners().array().abs() == 0.5).all());
}

TEST(Topology, EdgesJoinCornersDifferingInOneCoordinate) {
  const auto& u = topology::unit_corners();
  for (const auto& [a, b] : topology::kEdges) {
    const Vec3 diff = u.col(a) - u.col(b);
    EXPECT_EQ((diff.array() != 0.0).count(), 1);
  }
}

TEST(Topology, FacesLieOnAxisPlanesWithOutwardNormals) {
  const auto& u = topology::unit_corners();
  const OrientedBox cube = OrientedBox::unit_cube();
  for (int f = 0; f < 6; ++f) {
    const int axis = topology::kNormalAxis[f];
    const auto& tri = topology::kFaces[f];
    const double coord = u(axis, tri[0]);
    for (int k : tri) EXPECT_EQ(u(axis, k), coord);
    EXPECT_EQ(std::abs(coord), 0.5);
    EXPECT_GT(face_normal(cube, f)[axis] * coord, 0.0);
    // The spans cover the whole face rectangle.
    const PlaneParam plane = face_plane(box_corners(cube), f);
    EXPECT_NEAR(plane.span.col(0).norm(), 1.0, 0.0);
    EXPECT_NEAR(plane.span.col(1).norm(), 1.0, 0.0);
    EXPECT_EQ(plane.span.col(0).dot(plane.span.col(1)), 0.0);
  }
}

TEST(OrientedBox, RejectsDegenerateDimensions) {
  EXPECT_THROW(OrientedBox::axis_aligned(Vec3::Zero(), {0, 1, 1}), InvalidBox);
  EXPECT_THROW(OrientedBox::axis_aligned(Vec3::Zero(), {1, -1, 1}), InvalidBox);
}

TEST(OrientedBox, RotationNormalization) {
  Mat3 near = rot_z(0.3);
  near(0, 1) += 5e-7;
  const OrientedBox ok(Vec3::Zero(), near, Vec3::Ones());
  EXPECT_LT((ok.rotation().transpose() * ok.rotation() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(ok.rotation().determinant(), 1.0, 1e-9);

  Mat3 far = rot_z(0.3);
  far(0, 1) += 1e-4;
  EXPECT_THROW(OrientedBox(Vec3::Zero(), far, Vec3::Ones()), InvalidBox);
  EXPECT_THROW(OrientedBox(Vec3::Zero(), Mat3(Vec3(1, 1, -1).asDiagonal()), Vec3::Ones()), InvalidBox);
}

TEST(OrientedBox, QuaternionAndEulerInputs) {
  const auto q = OrientedBox::from_quaternion(Vec3::Zero(), {1, 0, 0, 0}, Vec3::Ones());
  EXPECT_EQ(q.rotation(), Mat3::Identity());
  const double h = std::sqrt(0.5);
  const auto qz = OrientedBox::from_quaternion(Vec3::Zero(), {h, 0, 0, h}, Vec3::Ones());
  EXPECT_LT((qz.rotation() - rot_z(kPi / 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(OrientedBox::from_quaternion(Vec3::Zero(), {1.1, 0, 0, 0}, Vec3::Ones()), InvalidBox);
  const auto e = OrientedBox::from_euler_xyz(Vec3::Zero(), {0.1, 0.2, 0.3}, Vec3::Ones());
  EXPECT_LT((e.rotation() - rot_x(0.1) * rot_y(0.2) * rot_z(0.3)).cwiseAbs().maxCoeff(), 1e-15);
}

}  // namespace
