#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ssm {

using Point2 = Eigen::Vector2d;

/// Constant-curvature reference path; curvature 0 is a straight line.
struct ArcPath {
  Point2 origin{0.0, 0.0};
  double heading = 0.0;    // tangent angle at s = 0
  double curvature = 0.0;  // 1/m, positive turns left
  double length = 0.0;     // m
};

struct PolylinePath {
  std::vector<Point2> points;
};

/// Reference path plus road width and grade. The grade feeds only the
/// longitudinal force balance; planar coordinates are the horizontal
/// projection.
struct RoadGeometry {
  std::variant<ArcPath, PolylinePath> path = ArcPath{};
  double width = 6.0;
  double grade = 0.0;

  void validate() const {
    if (width <= 0.0) throw std::invalid_argument("road width must be positive");
    if (const auto* arc = std::get_if<ArcPath>(&path)) {
      if (arc->length <= 0.0) {
        throw std::invalid_argument("arc length must be positive");
      }
      if (std::abs(arc->curvature) * width / 2.0 >= 1.0) {
        throw std::invalid_argument("road boundaries are not well-defined");
      }
    } else {
      const auto& poly = std::get<PolylinePath>(path);
      if (poly.points.size() < 2) {
        throw std::invalid_argument("polyline needs at least two vertices");
      }
      for (std::size_t i = 1; i < poly.points.size(); ++i) {
        if ((poly.points[i] - poly.points[i - 1]).norm() <= 0.0) {
          throw std::invalid_argument("polyline vertices must be distinct");
        }
      }
    }
  }

  double length() const {
    if (const auto* arc = std::get_if<ArcPath>(&path)) return arc->length;
    const auto& poly = std::get<PolylinePath>(path);
    double total = 0.0;
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
      total += (poly.points[i] - poly.points[i - 1]).norm();
    }
    return total;
  }
};

/// (s, e_cg, theta_e): arc length of the nearest path point, signed lateral
/// offset (left of travel positive), and heading error theta - theta_p(s).
struct PathCoordinates {
  double s = 0.0;
  double e_cg = 0.0;
  double theta_e = 0.0;
};

struct CartesianPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

namespace frenet_detail {

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

inline Point2 tangent_of(double heading) {
  return {std::cos(heading), std::sin(heading)};
}

inline Point2 left_normal_of(double heading) {
  return {-std::sin(heading), std::cos(heading)};
}

}  // namespace frenet_detail

inline double path_heading_at(const RoadGeometry& road, double s) {
  if (const auto* arc = std::get_if<ArcPath>(&road.path)) {
    return arc->heading + arc->curvature * s;
  }
  const auto& poly = std::get<PolylinePath>(road.path);
  double acc = 0.0;
  for (std::size_t i = 1; i < poly.points.size(); ++i) {
    const Point2 d = poly.points[i] - poly.points[i - 1];
    const double len = d.norm();
    if (s <= acc + len || i + 1 == poly.points.size()) {
      return std::atan2(d.y(), d.x());
    }
    acc += len;
  }
  throw std::logic_error("path_heading_at: unreachable");
}

inline double path_curvature_at(const RoadGeometry& road, double /*s*/) {
  if (const auto* arc = std::get_if<ArcPath>(&road.path)) return arc->curvature;
  return 0.0;  // polyline segments are straight
}

inline Point2 path_point_at(const RoadGeometry& road, double s) {
  if (const auto* arc = std::get_if<ArcPath>(&road.path)) {
    if (arc->curvature == 0.0) {
      return arc->origin + s * frenet_detail::tangent_of(arc->heading);
    }
    const double r = 1.0 / arc->curvature;
    const Point2 center = arc->origin + r * frenet_detail::left_normal_of(arc->heading);
    const double phi = arc->heading + arc->curvature * s;
    // radial direction from center to the path point is -left_normal(phi) * sign
    return center - r * frenet_detail::left_normal_of(phi);
  }
  const auto& poly = std::get<PolylinePath>(road.path);
  double acc = 0.0;
  for (std::size_t i = 1; i < poly.points.size(); ++i) {
    const Point2 d = poly.points[i] - poly.points[i - 1];
    const double len = d.norm();
    if (s <= acc + len || i + 1 == poly.points.size()) {
      return poly.points[i - 1] + (s - acc) / len * d;
    }
    acc += len;
  }
  throw std::logic_error("path_point_at: unreachable");
}

/// Inverse map: p_ref(s) + e_cg * n(s), theta = theta_p(s) + theta_e.
inline CartesianPose path_to_cartesian(const PathCoordinates& pc,
                                       const RoadGeometry& road) {
  const double heading = path_heading_at(road, pc.s);
  if (std::abs(pc.e_cg * path_curvature_at(road, pc.s)) >= 1.0) {
    throw std::domain_error("path_to_cartesian: offset reaches the arc center");
  }
  const Point2 p =
      path_point_at(road, pc.s) + pc.e_cg * frenet_detail::left_normal_of(heading);
  return {p.x(), p.y(), heading + pc.theta_e};
}

/// Projection onto the reference path. Arcs project radially (ambiguous at
/// the center, which is an error); polylines scan every segment for the
/// nearest foot point, ties toward smaller s.
inline PathCoordinates cartesian_to_path(const CartesianPose& pose,
                                         const RoadGeometry& road) {
  const Point2 p{pose.x, pose.y};
  if (const auto* arc = std::get_if<ArcPath>(&road.path)) {
    if (arc->curvature == 0.0) {
      const Point2 t = frenet_detail::tangent_of(arc->heading);
      const Point2 n = frenet_detail::left_normal_of(arc->heading);
      const Point2 d = p - arc->origin;
      return {d.dot(t), d.dot(n),
              frenet_detail::wrap_angle(pose.theta - arc->heading)};
    }
    const double kappa = arc->curvature;
    const double r = 1.0 / kappa;
    const Point2 center = arc->origin + r * frenet_detail::left_normal_of(arc->heading);
    const Point2 radial = p - center;
    if (radial.norm() < 1e-12) {
      throw std::domain_error("cartesian_to_path: ambiguous projection at arc center");
    }
    // Angle of the radial direction of s=0 versus the query point, measured
    // with the travel orientation.
    const Point2 radial0 = arc->origin - center;
    const double dphi = std::atan2(
        radial0.x() * radial.y() - radial0.y() * radial.x(), radial0.dot(radial));
    double s = (kappa > 0.0 ? dphi : -dphi) * std::abs(r);
    // the principal branch covers (-pi, pi] of sweep; place s on the branch
    // nearest the road span [0, length]
    const double period = 2.0 * M_PI * std::abs(r);
    if (s < 0.0 && s + period <= arc->length + (period - arc->length) / 2.0) {
      s += period;
    } else if (s > arc->length && s - period >= -(period - arc->length) / 2.0) {
      // beyond the far end: keep as-is unless the start is closer
      if (s - arc->length > period / 2.0) s -= period;
    }
    const double e = r - (kappa > 0.0 ? radial.norm() : -radial.norm());
    return {s, e, frenet_detail::wrap_angle(pose.theta - path_heading_at(road, s))};
  }

  const auto& poly = std::get<PolylinePath>(road.path);
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double best_e = 0.0;
  double best_heading = 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < poly.points.size(); ++i) {
    const Point2 a = poly.points[i - 1];
    const Point2 d = poly.points[i] - a;
    const double len = d.norm();
    const Point2 t = d / len;
    const double along = std::clamp((p - a).dot(t), 0.0, len);
    const Point2 foot = a + along * t;
    const double d2 = (p - foot).squaredNorm();
    if (d2 < best_d2 - 1e-15) {
      best_d2 = d2;
      best_s = acc + along;
      const Point2 n{-t.y(), t.x()};
      best_e = (p - foot).dot(n);
      best_heading = std::atan2(t.y(), t.x());
    }
    acc += len;
  }
  return {best_s, best_e, frenet_detail::wrap_angle(pose.theta - best_heading)};
}

/// Both road edges as sampled polylines at the given arc-length resolution.
inline std::pair<std::vector<Point2>, std::vector<Point2>> boundary_polylines(
    const RoadGeometry& road, double resolution) {
  if (resolution <= 0.0) {
    throw std::invalid_argument("boundary_polylines: resolution must be positive");
  }
  const double total = road.length();
  const int count = std::max(1, static_cast<int>(std::ceil(total / resolution)));
  std::vector<Point2> left, right;
  left.reserve(count + 1);
  right.reserve(count + 1);
  for (int i = 0; i <= count; ++i) {
    const double s = total * i / count;
    const double heading = path_heading_at(road, s);
    const Point2 n = frenet_detail::left_normal_of(heading);
    const Point2 p = path_point_at(road, s);
    left.push_back(p + road.width / 2.0 * n);
    right.push_back(p - road.width / 2.0 * n);
  }
  return {left, right};
}

}  // namespace ssm
