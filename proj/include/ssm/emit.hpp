#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssm/frenet.hpp"
#include "ssm/scenario.hpp"
#include "ssm/simulation.hpp"

namespace ssm {

namespace emit_detail {

inline std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

/// RFC-4180: quote fields containing comma, quote, or newline.
inline std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace emit_detail

/// One row per (evaluation time, query, method). Times carry six decimals;
/// byte-identical output for identical runs.
inline std::string csv_text(const RunRecord& record) {
  using emit_detail::csv_field;
  using emit_detail::fixed6;
  std::ostringstream out;
  out << "T_r,query_id,method,t_c_star,n_roots,e_tc_star\n";
  for (const auto& eval : record.evaluations) {
    for (const auto& q : eval.outcomes) {
      const std::string e_tc = q.e_tc ? fixed6(*q.e_tc) : "";
      auto row = [&](const char* method, const SsmResult& r) {
        out << fixed6(eval.t_r) << ',' << csv_field(q.query_id) << ',' << method
            << ',' << (r.t_c_star ? fixed6(*r.t_c_star) : "") << ','
            << r.roots.size() << ',' << e_tc << '\n';
      };
      if (q.analytic) row("analytic", *q.analytic);
      if (q.numeric) row("numeric", *q.numeric);
    }
  }
  return out.str();
}

inline void emit_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << csv_text(record);
}

namespace emit_detail {

/// Color ramp for t_c* heat-maps: smaller remaining time is darker. Risk-free
/// entities stay unfilled.
inline std::string ramp_color(double t_c, double horizon) {
  const double frac = std::clamp(t_c / horizon, 0.0, 1.0);
  // dark red (near) to pale yellow (far)
  const int r = static_cast<int>(120 + 135 * frac);
  const int g = static_cast<int>(20 + 215 * frac);
  const int b = static_cast<int>(20 + 140 * frac);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

struct SnapshotEntity {
  std::string id;
  double x, y, r;
  std::optional<double> t_c;  // earliest collision time against the subject
};

}  // namespace emit_detail

/// Structured snapshot text: bounding circles, boundary polylines, and the
/// per-query earliest collision times driving the color map.
inline std::string snapshot_text(const Scenario& scenario, const Snapshot& snap) {
  using emit_detail::fixed6;
  std::ostringstream out;
  out << "# ssm-snapshot v1\n";
  out << "t_r = " << fixed6(snap.t_r) << "\n";
  for (const auto& [id, pose] : snap.vehicle_poses) {
    const auto& vehicle = scenario.vehicle(id);
    out << "[vehicle." << id << "]\n";
    out << "pose = " << fixed6(pose(0)) << ' ' << fixed6(pose(1)) << ' '
        << fixed6(pose(2)) << "\n";
    for (const auto& c : vehicle.geometry.circles) {
      const double cx = pose(0) + c.offset * std::cos(pose(2));
      const double cy = pose(1) + c.offset * std::sin(pose(2));
      out << "circle = " << fixed6(cx) << ' ' << fixed6(cy) << ' '
          << fixed6(c.radius) << "\n";
    }
  }
  for (const auto& ob : scenario.obstacles) {
    out << "[obstacle." << ob.id << "]\n";
    out << "circle = " << fixed6(ob.x) << ' ' << fixed6(ob.y) << ' '
        << fixed6(ob.radius) << "\n";
  }
  if (scenario.road) {
    const auto [left, right] = boundary_polylines(*scenario.road, 5.0);
    auto polyline = [&](const char* name, const std::vector<Point2>& pts) {
      out << "[boundary." << name << "]\n";
      out << "points =";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        out << (i ? "; " : " ") << fixed6(pts[i].x()) << ' ' << fixed6(pts[i].y());
      }
      out << "\n";
    };
    polyline("1", left);
    polyline("2", right);
  }
  for (const auto& q : snap.record.outcomes) {
    out << "[risk." << q.query_id << "]\n";
    const SsmResult* r = q.numeric ? &*q.numeric : (q.analytic ? &*q.analytic : nullptr);
    if (r && r->t_c_star) {
      out << "t_c_star = " << fixed6(*r->t_c_star) << "\n";
    } else {
      out << "t_c_star =\n";
    }
  }
  return out.str();
}

/// Minimal vector-graphic emission of one snapshot: road edges, bounding
/// circles, and fills mapping each active risk's t_c* onto the documented
/// ramp (smaller t_c* = darker).
inline std::string snapshot_svg(const Scenario& scenario, const Snapshot& snap) {
  using emit_detail::ramp_color;
  const double horizon = scenario.sim.horizon;

  // Risk lookup: earliest t_c per counterpart entity of each query.
  std::map<std::string, double> vehicle_risk, obstacle_risk, boundary_risk;
  std::string subject_id;
  for (const auto& q : snap.record.outcomes) {
    const SsmResult* r = q.numeric ? &*q.numeric : (q.analytic ? &*q.analytic : nullptr);
    if (!r || !r->t_c_star) continue;
    const QuerySpec* spec = nullptr;
    for (const auto& s : scenario.queries) {
      if (s.id == q.query_id) spec = &s;
    }
    if (!spec) continue;
    subject_id = spec->query.subject;
    switch (spec->query.kind) {
      case CollisionQuery::Kind::VehicleVehicle:
        vehicle_risk.emplace(spec->query.other, *r->t_c_star);
        break;
      case CollisionQuery::Kind::VehicleObstacle:
        obstacle_risk.emplace(spec->query.other, *r->t_c_star);
        break;
      case CollisionQuery::Kind::VehicleBoundary:
        boundary_risk.emplace(std::to_string(spec->query.side), *r->t_c_star);
        break;
    }
  }

  // World extent
  double min_x = 1e30, max_x = -1e30, min_y = 1e30, max_y = -1e30;
  auto grow = [&](double x, double y) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  };
  std::vector<Point2> left, right;
  if (scenario.road) {
    std::tie(left, right) = boundary_polylines(*scenario.road, 2.0);
    for (const auto& p : left) grow(p.x(), p.y());
    for (const auto& p : right) grow(p.x(), p.y());
  }
  for (const auto& [id, pose] : snap.vehicle_poses) grow(pose(0), pose(1));
  for (const auto& ob : scenario.obstacles) grow(ob.x, ob.y);
  const double margin = 6.0;
  min_x -= margin; max_x += margin; min_y -= margin; max_y += margin;
  const double scale = 6.0;
  const double width = (max_x - min_x) * scale;
  const double height = (max_y - min_y) * scale;
  auto sx = [&](double x) { return (x - min_x) * scale; };
  auto sy = [&](double y) { return height - (y - min_y) * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto polyline = [&](const std::vector<Point2>& pts, const std::string& stroke,
                      double stroke_width) {
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
        << stroke_width << "\" points=\"";
    for (const auto& p : pts) out << sx(p.x()) << ',' << sy(p.y()) << ' ';
    out << "\"/>\n";
  };
  if (!left.empty()) {
    const auto it1 = boundary_risk.find("1");
    const auto it2 = boundary_risk.find("2");
    polyline(left, it1 != boundary_risk.end() ? ramp_color(it1->second, horizon)
                                              : std::string("#404040"),
             it1 != boundary_risk.end() ? 5.0 : 2.0);
    polyline(right, it2 != boundary_risk.end() ? ramp_color(it2->second, horizon)
                                               : std::string("#404040"),
             it2 != boundary_risk.end() ? 5.0 : 2.0);
  }

  auto circle = [&](double x, double y, double r, const std::string& fill,
                    const std::string& stroke) {
    out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\""
        << r * scale << "\" fill=\"" << fill << "\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\"/>\n";
  };
  for (const auto& [id, pose] : snap.vehicle_poses) {
    const auto& vehicle = scenario.vehicle(id);
    const auto risk = vehicle_risk.find(id);
    const std::string fill = id == subject_id ? "#9ecbff"
                             : risk != vehicle_risk.end()
                                 ? ramp_color(risk->second, horizon)
                                 : "none";
    for (const auto& c : vehicle.geometry.circles) {
      circle(pose(0) + c.offset * std::cos(pose(2)),
             pose(1) + c.offset * std::sin(pose(2)), c.radius, fill, "#202020");
    }
  }
  for (const auto& ob : scenario.obstacles) {
    const auto risk = obstacle_risk.find(ob.id);
    circle(ob.x, ob.y, ob.radius,
           risk != obstacle_risk.end() ? ramp_color(risk->second, horizon) : "none",
           "#202020");
  }
  out << "<text x=\"8\" y=\"16\" font-family=\"monospace\" font-size=\"12\">T_r = "
      << emit_detail::fixed6(snap.t_r) << " s</text>\n";
  out << "</svg>\n";
  return out.str();
}

/// Writes snapshot_<t>.txt and snapshot_<t>.svg for one captured snapshot.
inline void emit_snapshot_plotdata(const Scenario& scenario, const Snapshot& snap,
                                   const std::string& directory) {
  char stamp[32];
  std::snprintf(stamp, sizeof(stamp), "%07.3f", snap.t_r);
  const std::string base = directory + "/snapshot_" + stamp;
  {
    std::ofstream out(base + ".txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + base + ".txt'");
    out << snapshot_text(scenario, snap);
  }
  {
    std::ofstream out(base + ".svg", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + base + ".svg'");
    out << snapshot_svg(scenario, snap);
  }
}

}  // namespace ssm
