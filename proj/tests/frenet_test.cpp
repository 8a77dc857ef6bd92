#include "ssm/frenet.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ssm/models.hpp"

namespace ssm {
namespace {

RoadGeometry straight_road() {
  RoadGeometry road;
  road.path = ArcPath{{0.0, 0.0}, 0.0, 0.0, 100.0};
  road.width = 6.0;
  road.validate();
  return road;
}

RoadGeometry arc_road(double kappa, double length = 200.0) {
  RoadGeometry road;
  road.path = ArcPath{{0.0, 0.0}, 0.0, kappa, length};
  road.width = 6.0;
  road.validate();
  return road;
}

RoadGeometry gentle_polyline_road() {
  RoadGeometry road;
  PolylinePath poly;
  double x = 0.0, y = 0.0, heading = 0.0;
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> turn(-0.08, 0.08);
  poly.points.push_back({x, y});
  for (int i = 0; i < 12; ++i) {
    heading += turn(rng);
    x += 25.0 * std::cos(heading);
    y += 25.0 * std::sin(heading);
    poly.points.push_back({x, y});
  }
  road.path = poly;
  road.width = 7.0;
  road.validate();
  return road;
}

TEST(CartesianToPath, StraightRoadIsIdentityFrame) {
  const auto pc = cartesian_to_path({3.0, 0.5, 0.1}, straight_road());
  EXPECT_NEAR(pc.s, 3.0, 1e-12);
  EXPECT_NEAR(pc.e_cg, 0.5, 1e-12);
  EXPECT_NEAR(pc.theta_e, 0.1, 1e-12);
}

TEST(CartesianToPath, OnCenterlineArcPose) {
  const double radius = 50.0;
  const auto road = arc_road(1.0 / radius);
  const double phi = 0.6;  // angle along the arc
  // centerline point with tangent heading
  const CartesianPose pose = path_to_cartesian({radius * phi, 0.0, 0.0}, road);
  const auto pc = cartesian_to_path(pose, road);
  EXPECT_NEAR(pc.s, radius * phi, 1e-9);
  EXPECT_NEAR(pc.e_cg, 0.0, 1e-9);
  EXPECT_NEAR(pc.theta_e, 0.0, 1e-12);
}

TEST(CartesianToPath, LeftOfTravelIsPositive) {
  // straight road heading +x: a point at y > 0 lies to the left
  EXPECT_GT(cartesian_to_path({10.0, 1.0, 0.0}, straight_road()).e_cg, 0.0);
  // left-turning arc: a point nearer the center is on the left
  const auto road = arc_road(0.02);
  const CartesianPose inner = path_to_cartesian({30.0, 2.0, 0.0}, road);
  EXPECT_GT(cartesian_to_path(inner, road).e_cg, 0.0);
  // right-turning arc mirror image
  const auto right = arc_road(-0.02);
  const CartesianPose outer = path_to_cartesian({30.0, 2.0, 0.0}, right);
  EXPECT_GT(cartesian_to_path(outer, right).e_cg, 0.0);
}

TEST(CartesianToPath, ArcCenterIsAmbiguous) {
  const auto road = arc_road(0.1);  // radius 10, center at (0, 10)
  EXPECT_THROW(cartesian_to_path({0.0, 10.0, 0.0}, road), std::domain_error);
}

TEST(RoundTrip, RandomPosesOnAllRoadKinds) {
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<RoadGeometry> roads = {
      straight_road(), arc_road(0.01), arc_road(-0.02), gentle_polyline_road()};
  for (const auto& road : roads) {
    const double length = road.length();
    const double kappa_max = std::holds_alternative<ArcPath>(road.path)
                                 ? std::abs(std::get<ArcPath>(road.path).curvature)
                                 : 0.0;
    // vertex arc lengths: unique projection requires staying away from the
    // corner wedges of a polyline
    std::vector<double> vertex_s;
    if (const auto* poly = std::get_if<PolylinePath>(&road.path)) {
      double acc = 0.0;
      for (std::size_t i = 1; i + 1 < poly->points.size(); ++i) {
        acc += (poly->points[i] - poly->points[i - 1]).norm();
        vertex_s.push_back(acc);
      }
    }
    for (int trial = 0; trial < 250; ++trial) {
      PathCoordinates pc;
      do {
        pc.s = (0.05 + 0.9 * unit(rng)) * length;
      } while (std::any_of(vertex_s.begin(), vertex_s.end(), [&](double vs) {
        return std::abs(pc.s - vs) < 1.0;
      }));
      const double e_bound =
          kappa_max > 0.0 ? std::min(3.0, 0.5 / kappa_max) : 3.0;
      pc.e_cg = (2.0 * unit(rng) - 1.0) * e_bound;
      pc.theta_e = (2.0 * unit(rng) - 1.0) * 1.2;
      const CartesianPose pose = path_to_cartesian(pc, road);
      const PathCoordinates back = cartesian_to_path(pose, road);
      EXPECT_NEAR(back.s, pc.s, 1e-9);
      EXPECT_NEAR(back.e_cg, pc.e_cg, 1e-9);
      EXPECT_NEAR(back.theta_e, pc.theta_e, 1e-9);
      const CartesianPose again = path_to_cartesian(back, road);
      EXPECT_NEAR(again.x, pose.x, 1e-9);
      EXPECT_NEAR(again.y, pose.y, 1e-9);
      EXPECT_NEAR(again.theta, pose.theta, 1e-9);
    }
  }
}

// Following the lateral path model from an on-centerline pose matches the
// planar bicycle model mapped through the transform.
TEST(PathModelConsistency, OnCenterlineRhsReduction) {
  const double kappa = 0.02;
  const double v = 8.0;
  const double wheelbase = 2.0;
  const double delta = 0.05;
  const Vector d = rhs_lateral_path((Vector(3) << 12.0, 0.0, 0.0).finished(),
                                    (Vector(3) << delta, v, kappa).finished(),
                                    wheelbase);
  EXPECT_NEAR(d(0), v, 1e-12);
  EXPECT_NEAR(d(1), 0.0, 1e-12);
  EXPECT_NEAR(d(2), v * (std::tan(delta) / wheelbase - kappa), 1e-12);
}

TEST(BoundaryPolylines, StraightRoadGivesParallelLines) {
  const auto [left, right] = boundary_polylines(straight_road(), 10.0);
  for (const auto& p : left) EXPECT_NEAR(p.y(), 3.0, 1e-12);
  for (const auto& p : right) EXPECT_NEAR(p.y(), -3.0, 1e-12);
}

TEST(BoundaryPolylines, ArcGivesConcentricArcs) {
  const double kappa = 0.02;  // left turn, radius 50, center (0, 50)
  const auto [left, right] = boundary_polylines(arc_road(kappa, 100.0), 2.0);
  const Point2 center{0.0, 50.0};
  for (const auto& p : left) EXPECT_NEAR((p - center).norm(), 47.0, 1e-9);
  for (const auto& p : right) EXPECT_NEAR((p - center).norm(), 53.0, 1e-9);
}

TEST(BoundaryPolylines, OffsetDistanceEqualsHalfWidth) {
  const auto road = gentle_polyline_road();
  const auto [left, right] = boundary_polylines(road, 5.0);
  // samples away from the corner wedges sit half a width from the path
  std::vector<double> vertex_s;
  const auto& poly = std::get<PolylinePath>(road.path);
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < poly.points.size(); ++i) {
    acc += (poly.points[i] - poly.points[i - 1]).norm();
    vertex_s.push_back(acc);
  }
  auto near_vertex = [&](double s) {
    return std::any_of(vertex_s.begin(), vertex_s.end(),
                       [&](double vs) { return std::abs(s - vs) < 2.0; });
  };
  int checked = 0;
  for (const auto& side : {left, right}) {
    for (std::size_t i = 2; i + 2 < side.size(); i += 3) {
      const auto pc = cartesian_to_path({side[i].x(), side[i].y(), 0.0}, road);
      if (near_vertex(pc.s)) continue;
      EXPECT_NEAR(std::abs(pc.e_cg), road.width / 2.0, 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(RoadGeometry, ValidationCatchesIllDefinedBoundaries) {
  RoadGeometry road;
  road.path = ArcPath{{0, 0}, 0.0, 0.5, 10.0};  // radius 2 under width 6
  road.width = 6.0;
  EXPECT_THROW(road.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace ssm
