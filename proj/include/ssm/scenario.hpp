#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssm/collision.hpp"
#include "ssm/frenet.hpp"
#include "ssm/models.hpp"

namespace ssm {

inline constexpr const char* kScenarioFormatVersion = "ssm-scenario v1";

struct ScenarioError : std::runtime_error {
  int line;
  explicit ScenarioError(const std::string& what, int line_number = 0)
      : std::runtime_error(line_number > 0
                               ? "line " + std::to_string(line_number) + ": " + what
                               : what),
        line(line_number) {}
};

struct VehicleSpec {
  std::string id;
  ModelKind model = ModelKind::Bicycle2D;
  Vector initial_state;
  PiecewiseConstantControl schedule;
  VehicleGeometry geometry;
  LongitudinalParams longitudinal;

  ModelParams model_params() const {
    ModelParams p;
    p.wheelbase = geometry.wheelbase;
    p.longitudinal = longitudinal;
    return p;
  }
};

struct ObstacleSpec {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double radius = 1.0;
};

enum class SsmType { Circles, TtcLongitudinal, TtcLateral };

struct QuerySpec {
  std::string id;
  CollisionQuery query;
  SsmType ssm = SsmType::Circles;
};

struct SimConfig {
  double duration = 20.0;
  double period = 0.1;        // evaluation period
  double horizon = 20.0;      // forecast window per evaluation
  double step = 0.001;        // oracle integration step h
  std::optional<int> oracle_steps;  // N; defaults to horizon/step
  double scan_step = 0.01;    // coarse bracket step
  std::vector<double> snapshots;

  int forecast_steps() const {
    const int from_horizon = static_cast<int>(std::ceil(horizon / step));
    return oracle_steps ? std::min(*oracle_steps, from_horizon) : from_horizon;
  }
};

struct Scenario {
  std::optional<RoadGeometry> road;
  std::vector<VehicleSpec> vehicles;
  std::vector<ObstacleSpec> obstacles;
  std::vector<QuerySpec> queries;
  SimConfig sim;

  const VehicleSpec& vehicle(const std::string& id) const {
    for (const auto& v : vehicles) {
      if (v.id == id) return v;
    }
    throw ScenarioError("unknown vehicle id '" + id + "'");
  }

  int vehicle_index(const std::string& id) const {
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      if (vehicles[i].id == id) return static_cast<int>(i);
    }
    throw ScenarioError("unknown vehicle id '" + id + "'");
  }

  const ObstacleSpec& obstacle(const std::string& id) const {
    for (const auto& o : obstacles) {
      if (o.id == id) return o;
    }
    throw ScenarioError("unknown obstacle id '" + id + "'");
  }
};

inline ModelKind model_kind_from_name(const std::string& name, int line) {
  if (name == "constant_velocity" || name == "cv") return ModelKind::ConstantVelocity1D;
  if (name == "double_integrator") return ModelKind::DoubleIntegrator1D;
  if (name == "bicycle") return ModelKind::Bicycle2D;
  if (name == "longitudinal") return ModelKind::Longitudinal3D;
  if (name == "lateral_path") return ModelKind::LateralPath;
  if (name == "composed_bicycle") return ModelKind::ComposedBicycle;
  if (name == "composed_path") return ModelKind::ComposedPath;
  throw ScenarioError("unknown model family '" + name + "'", line);
}

inline bool model_uses_longitudinal(ModelKind kind) {
  return kind == ModelKind::Longitudinal3D || kind == ModelKind::ComposedBicycle ||
         kind == ModelKind::ComposedPath;
}

namespace scenario_detail {

struct RawLine {
  int number;
  std::string key;
  std::string value;
};

struct RawSection {
  std::string name;
  int line;
  std::vector<RawLine> entries;
};

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<RawSection> tokenize(const std::string& text) {
  std::vector<RawSection> sections;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ScenarioError("unterminated section header", number);
      }
      sections.push_back({trim(line.substr(1, line.size() - 2)), number, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("expected 'key = value'", number);
    }
    if (sections.empty()) {
      throw ScenarioError("entry before any [section]", number);
    }
    sections.back().entries.push_back(
        {number, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return sections;
}

inline std::vector<double> parse_numbers(const std::string& value, int line) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ScenarioError("expected a number, got '" + token + "'", line);
    }
  }
  if (out.empty()) throw ScenarioError("expected at least one number", line);
  return out;
}

inline double parse_number(const std::string& value, int line) {
  const auto nums = parse_numbers(value, line);
  if (nums.size() != 1) throw ScenarioError("expected a single number", line);
  return nums[0];
}

class EntryView {
 public:
  explicit EntryView(const RawSection& section) : section_(section) {}

  const RawLine* find(const std::string& key) const {
    for (const auto& e : section_.entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  double number(const std::string& key, int section_line) const {
    const RawLine* e = find(key);
    if (!e) {
      throw ScenarioError("missing required key '" + key + "' in [" +
                              section_.name + "]",
                          section_line);
    }
    return parse_number(e->value, e->number);
  }

  double number_or(const std::string& key, double fallback) const {
    const RawLine* e = find(key);
    return e ? parse_number(e->value, e->number) : fallback;
  }

  std::string text(const std::string& key, int section_line) const {
    const RawLine* e = find(key);
    if (!e) {
      throw ScenarioError("missing required key '" + key + "' in [" +
                              section_.name + "]",
                          section_line);
    }
    return e->value;
  }

  const RawSection& section() const { return section_; }

 private:
  const RawSection& section_;
};

inline RoadGeometry parse_road(const RawSection& section) {
  EntryView view(section);
  RoadGeometry road;
  const std::string kind = view.find("path") ? view.text("path", section.line) : "arc";
  if (kind == "arc") {
    ArcPath arc;
    if (const auto* e = view.find("origin")) {
      const auto nums = parse_numbers(e->value, e->number);
      if (nums.size() != 2) throw ScenarioError("origin needs two numbers", e->number);
      arc.origin = {nums[0], nums[1]};
    }
    arc.heading = view.number_or("heading", 0.0);
    arc.curvature = view.number_or("curvature", 0.0);
    arc.length = view.number("length", section.line);
    road.path = arc;
  } else if (kind == "polyline") {
    const RawLine* e = view.find("points");
    if (!e) throw ScenarioError("polyline road needs 'points'", section.line);
    PolylinePath poly;
    std::istringstream in(e->value);
    std::string chunk;
    while (std::getline(in, chunk, ';')) {
      chunk = trim(chunk);
      if (chunk.empty()) continue;
      const auto nums = parse_numbers(chunk, e->number);
      if (nums.size() != 2) {
        throw ScenarioError("each polyline point needs two numbers", e->number);
      }
      poly.points.push_back({nums[0], nums[1]});
    }
    road.path = poly;
  } else {
    throw ScenarioError("road path must be 'arc' or 'polyline'", section.line);
  }
  road.width = view.number("width", section.line);
  road.grade = view.number_or("grade", 0.0);
  try {
    road.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(e.what(), section.line);
  }
  return road;
}

inline VehicleSpec parse_vehicle(const RawSection& section, const std::string& id) {
  EntryView view(section);
  VehicleSpec vehicle;
  vehicle.id = id;
  vehicle.model = model_kind_from_name(view.text("model", section.line), section.line);

  {
    const RawLine* e = view.find("state");
    if (!e) throw ScenarioError("missing required key 'state'", section.line);
    const auto nums = parse_numbers(e->value, e->number);
    if (static_cast<int>(nums.size()) != state_dimension(vehicle.model)) {
      throw ScenarioError("model '" + model_name(vehicle.model) + "' needs " +
                              std::to_string(state_dimension(vehicle.model)) +
                              " state values",
                          e->number);
    }
    vehicle.initial_state = Eigen::Map<const Vector>(nums.data(), nums.size());
  }

  vehicle.geometry.wheelbase = view.number_or("wheelbase", 2.0);
  if (const auto* e = view.find("circles")) {
    vehicle.geometry.circles.clear();
    std::istringstream in(e->value);
    std::string chunk;
    while (std::getline(in, chunk, ';')) {
      chunk = trim(chunk);
      if (chunk.empty()) continue;
      const auto nums = parse_numbers(chunk, e->number);
      if (nums.size() != 2) {
        throw ScenarioError("each circle needs 'offset radius'", e->number);
      }
      vehicle.geometry.circles.push_back({nums[0], nums[1]});
    }
    if (vehicle.geometry.circles.empty()) {
      throw ScenarioError("'circles' must list at least one circle", e->number);
    }
  } else if (const auto* r = view.find("radius")) {
    vehicle.geometry.circles = {{0.0, parse_number(r->value, r->number)}};
  }
  vehicle.geometry.body_length =
      view.number_or("length", 2.0 * vehicle.geometry.max_radius());
  if (const auto* m = view.find("mass")) {
    vehicle.geometry.mass = parse_number(m->value, m->number);
  }

  if (model_uses_longitudinal(vehicle.model)) {
    LongitudinalParams p;
    p.mass = view.number("mass", section.line);
    p.rho = view.number("rho", section.line);
    p.c_d = view.number("c_d", section.line);
    p.s_front = view.number("s_front", section.line);
    p.r_whl = view.number("r_whl", section.line);
    p.f_roll = view.number("f_roll", section.line);
    p.g = view.number_or("g", 9.81);
    try {
      p.validate();
    } catch (const std::exception& e) {
      throw ScenarioError(e.what(), section.line);
    }
    vehicle.longitudinal = p;
  }

  // control schedule: 'control' holds u(0); 'control@T' adds a switch at T
  std::vector<std::pair<double, std::pair<int, std::vector<double>>>> pieces;
  for (const auto& e : section.entries) {
    if (e.key == "control") {
      pieces.push_back({0.0, {e.number, parse_numbers(e.value, e.number)}});
    } else if (e.key.rfind("control@", 0) == 0) {
      const std::string when = e.key.substr(8);
      try {
        std::size_t used = 0;
        const double t = std::stod(when, &used);
        if (used != when.size() || t <= 0.0) throw std::invalid_argument(when);
        pieces.push_back({t, {e.number, parse_numbers(e.value, e.number)}});
      } catch (const std::exception&) {
        throw ScenarioError("bad switch time in '" + e.key + "'", e.number);
      }
    }
  }
  if (pieces.empty()) {
    throw ScenarioError("missing required key 'control'", section.line);
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (pieces.front().first != 0.0) {
    throw ScenarioError("control schedule must start at t = 0",
                        pieces.front().second.first);
  }
  for (const auto& [t, entry] : pieces) {
    const auto& [line, values] = entry;
    if (static_cast<int>(values.size()) != control_dimension(vehicle.model)) {
      throw ScenarioError("model '" + model_name(vehicle.model) + "' needs " +
                              std::to_string(control_dimension(vehicle.model)) +
                              " control values",
                          line);
    }
    try {
      vehicle.schedule.add_piece(
          t, Eigen::Map<const Vector>(values.data(), values.size()));
    } catch (const std::exception& e) {
      throw ScenarioError(e.what(), line);
    }
  }

  try {
    vehicle.geometry.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(e.what(), section.line);
  }
  if (!vehicle.initial_state.allFinite()) {
    throw ScenarioError("initial state must be finite", section.line);
  }
  return vehicle;
}

inline QuerySpec parse_query(const RawSection& section, const std::string& id) {
  EntryView view(section);
  QuerySpec spec;
  spec.id = id;
  const std::string type = view.text("type", section.line);
  spec.query.subject = view.text("i", section.line);
  if (type == "vehicle") {
    spec.query.kind = CollisionQuery::Kind::VehicleVehicle;
    spec.query.other = view.text("j", section.line);
    if (spec.query.other == spec.query.subject) {
      throw ScenarioError("vehicle query needs distinct ids", section.line);
    }
  } else if (type == "obstacle") {
    spec.query.kind = CollisionQuery::Kind::VehicleObstacle;
    spec.query.other = view.text("k", section.line);
  } else if (type == "boundary") {
    spec.query.kind = CollisionQuery::Kind::VehicleBoundary;
    const double side = view.number("side", section.line);
    if (side != 1.0 && side != 2.0) {
      throw ScenarioError("boundary side must be 1 or 2", section.line);
    }
    spec.query.side = static_cast<int>(side);
  } else {
    throw ScenarioError("query type must be vehicle, obstacle, or boundary",
                        section.line);
  }
  if (const auto* e = view.find("ssm")) {
    if (e->value == "circles") {
      spec.ssm = SsmType::Circles;
    } else if (e->value == "ttc_longitudinal") {
      spec.ssm = SsmType::TtcLongitudinal;
    } else if (e->value == "ttc_lateral") {
      spec.ssm = SsmType::TtcLateral;
    } else {
      throw ScenarioError("ssm must be circles, ttc_longitudinal, or ttc_lateral",
                          e->number);
    }
  }
  return spec;
}

inline SimConfig parse_sim(const RawSection& section) {
  EntryView view(section);
  SimConfig sim;
  sim.duration = view.number("duration", section.line);
  sim.period = view.number_or("period", 0.1);
  sim.horizon = view.number_or("horizon", 20.0);
  sim.step = view.number_or("step", 0.001);
  if (const auto* e = view.find("oracle_steps")) {
    sim.oracle_steps = static_cast<int>(parse_number(e->value, e->number));
  }
  sim.scan_step = view.number_or("scan_step", 0.01);
  if (const auto* e = view.find("snapshots")) {
    sim.snapshots = parse_numbers(e->value, e->number);
  }
  if (sim.duration <= 0.0) throw ScenarioError("duration must be positive", section.line);
  if (sim.period <= 0.0) throw ScenarioError("period must be positive", section.line);
  if (sim.horizon <= 0.0) throw ScenarioError("horizon must be positive", section.line);
  if (sim.step <= 0.0) throw ScenarioError("step must be positive", section.line);
  if (sim.scan_step <= 0.0) {
    throw ScenarioError("scan_step must be positive", section.line);
  }
  return sim;
}

}  // namespace scenario_detail

/// Parses and validates the sectioned key/value scenario text.
inline Scenario load_scenario(const std::string& text) {
  using namespace scenario_detail;
  Scenario scenario;
  bool saw_sim = false;

  for (const RawSection& section : tokenize(text)) {
    if (section.name == "road") {
      if (scenario.road) throw ScenarioError("duplicate [road] section", section.line);
      scenario.road = parse_road(section);
    } else if (section.name.rfind("vehicle.", 0) == 0) {
      const std::string id = section.name.substr(8);
      if (id.empty()) throw ScenarioError("vehicle id must be non-empty", section.line);
      for (const auto& v : scenario.vehicles) {
        if (v.id == id) {
          throw ScenarioError("duplicate vehicle id '" + id + "'", section.line);
        }
      }
      scenario.vehicles.push_back(parse_vehicle(section, id));
    } else if (section.name.rfind("obstacle.", 0) == 0) {
      const std::string id = section.name.substr(9);
      if (id.empty()) throw ScenarioError("obstacle id must be non-empty", section.line);
      for (const auto& o : scenario.obstacles) {
        if (o.id == id) {
          throw ScenarioError("duplicate obstacle id '" + id + "'", section.line);
        }
      }
      EntryView view(section);
      ObstacleSpec ob;
      ob.id = id;
      const RawLine* center = view.find("center");
      if (!center) throw ScenarioError("missing required key 'center'", section.line);
      const auto nums = parse_numbers(center->value, center->number);
      if (nums.size() != 2) throw ScenarioError("center needs two numbers", center->number);
      ob.x = nums[0];
      ob.y = nums[1];
      ob.radius = view.number("radius", section.line);
      if (ob.radius <= 0.0) {
        throw ScenarioError("obstacle radius must be positive", section.line);
      }
      scenario.obstacles.push_back(ob);
    } else if (section.name.rfind("query.", 0) == 0) {
      const std::string id = section.name.substr(6);
      if (id.empty()) throw ScenarioError("query id must be non-empty", section.line);
      for (const auto& q : scenario.queries) {
        if (q.id == id) {
          throw ScenarioError("duplicate query id '" + id + "'", section.line);
        }
      }
      scenario.queries.push_back(parse_query(section, id));
    } else if (section.name == "sim") {
      if (saw_sim) throw ScenarioError("duplicate [sim] section", section.line);
      scenario.sim = parse_sim(section);
      saw_sim = true;
    } else {
      throw ScenarioError("unknown section [" + section.name + "]", section.line);
    }
  }

  if (scenario.vehicles.empty()) {
    throw ScenarioError("scenario needs at least one vehicle");
  }
  if (!saw_sim) {
    throw ScenarioError("scenario needs a [sim] section");
  }
  for (const auto& q : scenario.queries) {
    scenario.vehicle(q.query.subject);
    if (q.query.kind == CollisionQuery::Kind::VehicleVehicle) {
      scenario.vehicle(q.query.other);
    } else if (q.query.kind == CollisionQuery::Kind::VehicleObstacle) {
      scenario.obstacle(q.query.other);
    } else if (!scenario.road) {
      throw ScenarioError("boundary query '" + q.id + "' needs a [road] section");
    }
  }
  for (const auto& v : scenario.vehicles) {
    const bool needs_road =
        v.model == ModelKind::LateralPath || v.model == ModelKind::ComposedPath;
    if (needs_road && !scenario.road) {
      throw ScenarioError("vehicle '" + v.id + "' uses path coordinates and needs a road");
    }
  }
  for (double t : scenario.sim.snapshots) {
    if (t < 0.0 || t > scenario.sim.duration) {
      throw ScenarioError("snapshot time outside [0, duration]");
    }
  }
  return scenario;
}

/// Schema text printed by the CLI; doubles as the format reference.
inline std::string scenario_schema_text() {
  return std::string(kScenarioFormatVersion) + R"( scenario format
================================================================
Flat sectioned key/value text. '#' starts a comment. Sections may
appear in any order; keys live under the most recent section header.

[road]                       optional; required by boundary queries
  path      = arc | polyline             (default arc)
  origin    = X Y                        arc start point (default 0 0)
  heading   = RAD                        arc start tangent (default 0)
  curvature = 1/M                        constant; 0 = straight (default 0)
  length    = M                          required for arc
  points    = X Y; X Y; ...              required for polyline
  width     = M                          required
  grade     = RAD                        constant incline (default 0)

[vehicle.<id>]               one section per vehicle, ids unique
  model     = constant_velocity | double_integrator | bicycle |
              longitudinal | lateral_path | composed_bicycle | composed_path
  state     = per-model initial state
              constant_velocity: p        double_integrator: p v
              bicycle:           x y theta v
              longitudinal:      v
              lateral_path:      s e_cg theta_e
              composed_bicycle:  x y theta v
              composed_path:     s e_cg theta_e v
  control   = per-model input held from t = 0
              constant_velocity: v        double_integrator: a
              bicycle:           delta a
              longitudinal:      T_whl alpha
              lateral_path:      delta v kappa
              composed_bicycle:  delta T_whl alpha
              composed_path:     delta T_whl alpha kappa
  control@T = ...                        piecewise-constant switch at T > 0
  wheelbase = M                          (default 2)
  radius    = M                          single bounding circle at the C.G.
  circles   = OFF R; OFF R; ...          multi-circle alternative
  length    = M                          1D gap length (default 2*max radius)
  mass      = KG                         required by torque models / DeltaV
  rho, c_d, s_front, r_whl, f_roll = ... required by torque models
  g         = M/S^2                      (default 9.81)

[obstacle.<id>]
  center    = X Y
  radius    = M

[query.<id>]
  type      = vehicle | obstacle | boundary
  i         = subject vehicle id
  j         = other vehicle id           (type = vehicle)
  k         = obstacle id                (type = obstacle)
  side      = 1 | 2                      (type = boundary; 1 = +w/2, 2 = -w/2)
  ssm       = circles | ttc_longitudinal | ttc_lateral   (default circles)

[sim]
  duration  = S                          required
  period    = S                          evaluation period (default 0.1)
  horizon   = S                          forecast window (default 20)
  step      = S                          oracle RK4 step h (default 0.001)
  oracle_steps = N                       optional cap on forecast steps
  scan_step = S                          coarse bracket step (default 0.01)
  snapshots = T T ...                    snapshot emission times (optional)
)";
}

}  // namespace ssm
