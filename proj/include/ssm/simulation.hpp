#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssm/collision.hpp"
#include "ssm/frenet.hpp"
#include "ssm/scenario.hpp"
#include "ssm/trajectory.hpp"

namespace ssm {

enum class RunMethod { Analytic, Numeric, Both };

struct QueryOutcome {
  std::string query_id;
  std::optional<SsmResult> analytic;
  std::optional<SsmResult> numeric;
  std::optional<double> e_tc;  // |analytic t_c* - numeric t_c*| when both exist
};

struct EvaluationRecord {
  double t_r = 0.0;
  std::vector<QueryOutcome> outcomes;
};

/// State captured for plot emission at one snapshot time.
struct Snapshot {
  double t_r = 0.0;
  std::vector<std::pair<std::string, Vector>> vehicle_poses;  // id, (x, y, theta)
  EvaluationRecord record;
};

struct RunRecord {
  std::vector<EvaluationRecord> evaluations;
  std::vector<Snapshot> snapshots;
};

namespace sim_detail {

/// Forward-motion clamp for force-balance families: a stopped vehicle does
/// not reverse, its derivative vanishes once v <= 0 under net braking.
inline Rhs clamped_rhs(ModelKind kind, const ModelParams& params) {
  const int v_index = kind == ModelKind::ComposedBicycle || kind == ModelKind::ComposedPath
                          ? 3
                          : (kind == ModelKind::Longitudinal3D ? 0 : -1);
  return [kind, params, v_index](const Vector& x, const Vector& u) {
    if (v_index >= 0 && x(v_index) <= 0.0) {
      Vector parked = x;
      parked(v_index) = 0.0;
      Vector d = model_rhs(kind, parked, u, params);
      if (d(v_index) < 0.0) return Vector(Vector::Zero(x.size()));
      return d;
    }
    return model_rhs(kind, x, u, params);
  };
}

inline Vector pose_from_state(const VehicleSpec& vehicle, const Vector& state,
                              const std::optional<RoadGeometry>& road) {
  Vector pose(3);
  switch (vehicle.model) {
    case ModelKind::ConstantVelocity1D:
    case ModelKind::DoubleIntegrator1D:
      pose << state(0), 0.0, 0.0;
      return pose;
    case ModelKind::Bicycle2D:
    case ModelKind::ComposedBicycle:
      pose << state(0), state(1), state(2);
      return pose;
    case ModelKind::LateralPath:
    case ModelKind::ComposedPath: {
      if (!road) throw std::logic_error("path-coordinate vehicle needs a road");
      const CartesianPose p =
          path_to_cartesian({state(0), state(1), state(2)}, *road);
      pose << p.x, p.y, p.theta;
      return pose;
    }
  }
  throw std::logic_error("pose_from_state: unknown model");
}

/// Longitudinal (p, v) along one axis for the 1D TTC conventions. Axis 0 is
/// x, axis 1 is y.
inline std::pair<double, double> axis_position_velocity(const VehicleSpec& vehicle,
                                                        const Vector& state,
                                                        const Vector& control,
                                                        int axis) {
  switch (vehicle.model) {
    case ModelKind::ConstantVelocity1D:
      if (axis != 0) throw std::invalid_argument("1D model has no lateral axis");
      return {state(0), control(0)};
    case ModelKind::DoubleIntegrator1D:
      if (axis != 0) throw std::invalid_argument("1D model has no lateral axis");
      return {state(0), state(1)};
    case ModelKind::Bicycle2D:
    case ModelKind::ComposedBicycle: {
      const double heading = state(2);
      const double v = state(3);
      return axis == 0 ? std::make_pair(state(0), v * std::cos(heading))
                       : std::make_pair(state(1), v * std::sin(heading));
    }
    default:
      throw std::invalid_argument("1D TTC needs a Cartesian-state vehicle");
  }
}

}  // namespace sim_detail

/// Rolling-horizon evaluator: the ground-truth world advances by RK4 on the
/// full nonlinear models at the oracle step; every evaluation time
/// re-linearizes at the current state and forecasts over the horizon with
/// the controls frozen at their current values.
class Simulator {
 public:
  explicit Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
    for (const auto& v : scenario_.vehicles) {
      states_.push_back(v.initial_state);
    }
  }

  const Scenario& scenario() const { return scenario_; }
  double time() const { return time_; }

  const Vector& vehicle_state(const std::string& id) const {
    return states_[scenario_.vehicle_index(id)];
  }

  /// Advances the ground-truth world to the given absolute time.
  void advance_to(double t_target) {
    if (t_target < time_ - 1e-12) {
      throw std::logic_error("Simulator: cannot advance backwards");
    }
    const double h = scenario_.sim.step;
    while (time_ < t_target - 1e-12) {
      const double t_next = std::min(time_ + h, t_target);
      for (std::size_t i = 0; i < scenario_.vehicles.size(); ++i) {
        const auto& vehicle = scenario_.vehicles[i];
        const Rhs rhs = sim_detail::clamped_rhs(vehicle.model, vehicle.model_params());
        std::vector<double> cuts =
            vehicle.schedule.switch_times_in(time_, t_next);
        cuts.push_back(t_next);
        Vector x = states_[i];
        double t = time_;
        for (double cut : cuts) {
          const double hs = cut - t;
          if (hs > 0.0) {
            x = detail::rk_step(rhs, classic_rk4(), x, t, hs, vehicle.schedule);
          }
          t = cut;
        }
        if (!x.allFinite()) {
          throw std::runtime_error("world integration diverged for vehicle '" +
                                   vehicle.id + "' near t = " + std::to_string(time_));
        }
        states_[i] = x;
      }
      time_ = t_next;
    }
    time_ = std::max(time_, t_target);
  }

  /// Numeric forecast: RK4 from the current state with controls frozen at
  /// their current values.
  SampledTrajectory numeric_forecast(const std::string& id) const {
    const int idx = scenario_.vehicle_index(id);
    const auto& vehicle = scenario_.vehicles[idx];
    const PiecewiseConstantControl frozen =
        PiecewiseConstantControl::constant(vehicle.schedule.value(time_));
    const Rhs rhs = sim_detail::clamped_rhs(vehicle.model, vehicle.model_params());
    return rk4_integrate(rhs, states_[idx], frozen, scenario_.sim.step,
                         scenario_.sim.forecast_steps());
  }

  /// Analytic forecast: closed form of the model linearized at the current
  /// operating point, controls frozen. Components follow the model's state
  /// layout. Forecasts with a velocity state never run past the stopping
  /// time; the trajectory is frozen there (vehicles do not reverse).
  AnalyticTrajectory analytic_forecast(const std::string& id) const {
    const int idx = scenario_.vehicle_index(id);
    const auto& vehicle = scenario_.vehicles[idx];
    const Vector& x = states_[idx];
    const Vector u = vehicle.schedule.value(time_);
    const double horizon = scenario_.sim.horizon;
    const ModelParams params = vehicle.model_params();

    switch (vehicle.model) {
      case ModelKind::ConstantVelocity1D:
      case ModelKind::LateralPath: {
        const LtiSystem sys = linearize(vehicle.model, x, u, params);
        return solve_lti(sys, x, PiecewiseConstantControl::constant(u), horizon);
      }
      case ModelKind::DoubleIntegrator1D: {
        const LtiSystem sys = linearize(vehicle.model, x, u, params);
        return frozen_past_stop(
            solve_lti(sys, x, PiecewiseConstantControl::constant(u), horizon), 1);
      }
      case ModelKind::Bicycle2D: {
        const LtiSystem sys =
            linearize(vehicle.model, x, u, params, /*frozen_control=*/true);
        return frozen_past_stop(
            solve_lti(sys, x, PiecewiseConstantControl::constant(Vector::Zero(2)),
                      horizon),
            3);
      }
      case ModelKind::ComposedBicycle: {
        Vector bike_u(2);
        bike_u << u(0), longitudinal_acceleration(x(3), u(1), u(2), params.longitudinal);
        const LtiSystem sys = linearize(ModelKind::Bicycle2D, x, bike_u, params,
                                        /*frozen_control=*/true);
        return frozen_past_stop(
            solve_lti(sys, x, PiecewiseConstantControl::constant(Vector::Zero(2)),
                      horizon),
            3);
      }
      case ModelKind::ComposedPath:
        return frozen_past_stop(composed_path_forecast(x, u, params, horizon), 3);
      case ModelKind::Longitudinal3D:
        return frozen_past_stop(
            longitudinal_velocity_closed_form(x(0), u(0), u(1), params.longitudinal,
                                              horizon),
            0);
    }
    throw std::logic_error("analytic_forecast: unknown model");
  }

  QueryOutcome evaluate_query(const QuerySpec& spec, RunMethod method) const {
    QueryOutcome outcome;
    outcome.query_id = spec.id;
    const bool want_analytic = method != RunMethod::Numeric;
    const bool want_numeric = method != RunMethod::Analytic;

    if (spec.ssm != SsmType::Circles) {
      evaluate_ttc_query(spec, want_analytic, want_numeric, outcome);
    } else {
      switch (spec.query.kind) {
        case CollisionQuery::Kind::VehicleVehicle:
        case CollisionQuery::Kind::VehicleObstacle:
          evaluate_planar_query(spec, want_analytic, want_numeric, outcome);
          break;
        case CollisionQuery::Kind::VehicleBoundary:
          evaluate_boundary_query(spec, want_analytic, want_numeric, outcome);
          break;
      }
    }
    if (outcome.analytic && outcome.numeric && outcome.analytic->t_c_star &&
        outcome.numeric->t_c_star) {
      outcome.e_tc = std::abs(*outcome.analytic->t_c_star - *outcome.numeric->t_c_star);
    }
    return outcome;
  }

  EvaluationRecord evaluate_all(RunMethod method) const {
    EvaluationRecord record;
    record.t_r = time_;
    for (const auto& q : scenario_.queries) {
      record.outcomes.push_back(evaluate_query(q, method));
    }
    return record;
  }

  Snapshot capture_snapshot(RunMethod method) const {
    Snapshot snap;
    snap.t_r = time_;
    for (std::size_t i = 0; i < scenario_.vehicles.size(); ++i) {
      snap.vehicle_poses.emplace_back(
          scenario_.vehicles[i].id,
          sim_detail::pose_from_state(scenario_.vehicles[i], states_[i],
                                      scenario_.road));
    }
    snap.record = evaluate_all(method);
    return snap;
  }

 private:
  /// Decoupled closed form for the path-coordinate torque model: the
  /// longitudinal velocity enters the linearized lateral model through its
  /// exponential-basis channel.
  AnalyticTrajectory composed_path_forecast(const Vector& x, const Vector& u,
                                            const ModelParams& params,
                                            double horizon) const {
    const AnalyticTrajectory velocity = longitudinal_velocity_closed_form(
        x(3), u(1), u(2), params.longitudinal, horizon);

    Vector lat_x = x.head(3);
    Vector lat_u(3);
    lat_u << u(0), x(3), u(3);
    const LtiSystem lat = linearize(ModelKind::LateralPath, lat_x, lat_u, params);

    ExponentialInput input;
    input.channels.resize(3);
    input.channels[0] = {{Complex{u(0), 0.0}, 0, Complex{0.0, 0.0}}};
    input.channels[1] = velocity.segments().front().components[0];
    input.channels[2] = {{Complex{u(3), 0.0}, 0, Complex{0.0, 0.0}}};

    const AnalyticTrajectory lateral =
        convolve_exponential_input(lat, lat_x, input, horizon);

    TrajectorySegment seg;
    seg.t_begin = 0.0;
    seg.t_end = horizon;
    seg.components = lateral.segments().front().components;
    seg.components.push_back(velocity.segments().front().components[0]);
    return AnalyticTrajectory({seg});
  }

  void evaluate_ttc_query(const QuerySpec& spec, bool want_analytic,
                          bool want_numeric, QueryOutcome& outcome) const {
    if (spec.query.kind != CollisionQuery::Kind::VehicleVehicle) {
      throw ScenarioError("1D TTC applies to vehicle-vehicle queries only");
    }
    const int axis = spec.ssm == SsmType::TtcLongitudinal ? 0 : 1;
    const auto& vi = scenario_.vehicle(spec.query.subject);
    const auto& vj = scenario_.vehicle(spec.query.other);
    const Vector& xi = states_[scenario_.vehicle_index(spec.query.subject)];
    const Vector& xj = states_[scenario_.vehicle_index(spec.query.other)];
    auto [pi, vel_i] = sim_detail::axis_position_velocity(
        vi, xi, vi.schedule.value(time_), axis);
    auto [pj, vel_j] = sim_detail::axis_position_velocity(
        vj, xj, vj.schedule.value(time_), axis);

    // Effective 1D length: sum of the primary bounding radii, so the 1D
    // condition coincides with circle tangency on a straight line.
    const double length = vi.geometry.max_radius() + vj.geometry.max_radius();
    const double horizon = scenario_.sim.horizon;

    // Orient the axis so the subject follows the other vehicle; when the
    // other vehicle sits behind, mirror the axis.
    double p_lead = pj, v_lead = vel_j, p_follow = pi, v_follow = vel_i;
    if (pi > pj) {
      p_lead = -pj;
      v_lead = -vel_j;
      p_follow = -pi;
      v_follow = -vel_i;
    }

    // DeltaV under the constant-speed assumption, when both masses are known
    std::optional<std::pair<double, double>> dv;
    if (vi.geometry.mass && vj.geometry.mass) {
      dv = delta_v(*vi.geometry.mass, *vj.geometry.mass, vel_i, vel_j);
    }
    if (want_analytic) {
      outcome.analytic = ttc(p_lead, p_follow, v_lead, v_follow, length, horizon);
      if (outcome.analytic->t_c_star) outcome.analytic->delta_v = dv;
    }
    if (want_numeric) {
      // Constant-velocity forecast of the same 1D model, scanned at the
      // oracle step.
      const double h = scenario_.sim.step;
      const int steps = scenario_.sim.forecast_steps();
      std::vector<double> gap(steps + 1);
      for (int l = 0; l <= steps; ++l) {
        const double t = l * h;
        gap[l] = (p_lead + v_lead * t) - (p_follow + v_follow * t) - length;
      }
      outcome.numeric = numeric_collision_scan(gap, h);
      if (outcome.numeric->t_c_star) outcome.numeric->delta_v = dv;
    }
  }

  void evaluate_planar_query(const QuerySpec& spec, bool want_analytic,
                             bool want_numeric, QueryOutcome& outcome) const {
    const auto& vi = scenario_.vehicle(spec.query.subject);
    const bool vs_vehicle = spec.query.kind == CollisionQuery::Kind::VehicleVehicle;
    const VehicleSpec* vj = vs_vehicle ? &scenario_.vehicle(spec.query.other) : nullptr;
    const ObstacleSpec* ob = vs_vehicle ? nullptr : &scenario_.obstacle(spec.query.other);
    const double horizon = scenario_.sim.horizon;

    if (want_analytic) {
      const AnalyticTrajectory ti = analytic_forecast(spec.query.subject);
      std::optional<AnalyticTrajectory> tj;
      if (vs_vehicle) tj = analytic_forecast(spec.query.other);

      const bool single_circles =
          vi.geometry.circles.size() == 1 && vi.geometry.circles[0].offset == 0.0 &&
          (!vs_vehicle || (vj->geometry.circles.size() == 1 &&
                           vj->geometry.circles[0].offset == 0.0));
      const bool planar_states = planar_layout(vi.model) &&
                                 (!vs_vehicle || planar_layout(vj->model));

      if (single_circles && planar_states && ti.segment_is_polynomial(0) &&
          (!tj || tj->segment_is_polynomial(0))) {
        // Polynomial route: companion-matrix roots of the gap polynomial.
        const AnalyticTrajectory other =
            vs_vehicle ? lift_to_plane(*tj, vj->model)
                       : AnalyticTrajectory::constant(
                             (Vector(2) << ob->x, ob->y).finished(), 0.0, horizon);
        const double r_other = vs_vehicle ? vj->geometry.circles[0].radius : ob->radius;
        const auto poly = circle_gap_polynomial(
            lift_to_plane(ti, vi.model), other, vi.geometry.circles[0].radius,
            r_other);
        std::vector<double> roots;
        if (evaluate_polynomial(poly, 0.0) <= 0.0) {
          roots.push_back(0.0);
        } else {
          for (double t : real_polynomial_roots(poly)) {
            if (t >= 0.0 && t <= horizon) roots.push_back(t);
          }
        }
        outcome.analytic = make_ssm_result(std::move(roots), SsmMethod::Analytic, horizon);
      } else {
        // Non-polynomial or offset-circle geometry: bracket the analytic gap.
        const auto g = [&, this](double t) {
          const Vector pose_i = analytic_pose(vi, ti, t);
          if (vs_vehicle) {
            return circle_pair_gap(pose_i, vi.geometry, analytic_pose(*vj, *tj, t),
                                   vj->geometry);
          }
          return circle_obstacle_gap(pose_i, vi.geometry, ob->x, ob->y, ob->radius);
        };
        // already overlapping counts as an immediate collision
        outcome.analytic =
            g(0.0) <= 0.0
                ? make_ssm_result({0.0}, SsmMethod::Analytic, horizon)
                : bracket_scan(g, horizon, scenario_.sim.scan_step,
                               SsmMethod::Analytic);
      }
    }

    if (want_numeric) {
      const SampledTrajectory si = numeric_forecast(spec.query.subject);
      std::optional<SampledTrajectory> sj;
      if (vs_vehicle) sj = numeric_forecast(spec.query.other);
      std::vector<double> gap(si.states.size());
      for (std::size_t l = 0; l < si.states.size(); ++l) {
        const Vector pose_i =
            sim_detail::pose_from_state(vi, si.states[l], scenario_.road);
        if (vs_vehicle) {
          const Vector pose_j =
              sim_detail::pose_from_state(*vj, sj->states[l], scenario_.road);
          gap[l] = circle_pair_gap(pose_i, vi.geometry, pose_j, vj->geometry);
        } else {
          gap[l] = circle_obstacle_gap(pose_i, vi.geometry, ob->x, ob->y, ob->radius);
        }
      }
      outcome.numeric =
          gap[0] <= 0.0
              ? make_ssm_result({0.0}, SsmMethod::NumericScan,
                                si.h * static_cast<double>(gap.size() - 1))
              : numeric_collision_scan(gap, si.h);
    }
  }

  void evaluate_boundary_query(const QuerySpec& spec, bool want_analytic,
                               bool want_numeric, QueryOutcome& outcome) const {
    if (!scenario_.road) throw ScenarioError("boundary query needs a road");
    const RoadGeometry& road = *scenario_.road;
    const auto& vi = scenario_.vehicle(spec.query.subject);
    const double radius = vi.geometry.max_radius();
    const double horizon = scenario_.sim.horizon;

    if (want_analytic) {
      const AnalyticTrajectory lat = analytic_boundary_forecast(spec.query.subject);
      const auto g = boundary_gap(lat, /*e_component=*/1, radius, road.width,
                                  spec.query.side);
      const bool touching =
          spec.query.side == 1 ? g(0.0) >= 0.0 : g(0.0) <= 0.0;
      outcome.analytic =
          touching ? make_ssm_result({0.0}, SsmMethod::Analytic, horizon)
                   : bracket_scan(g, horizon, scenario_.sim.scan_step,
                                  SsmMethod::Analytic);
    }
    if (want_numeric) {
      const SampledTrajectory si = numeric_forecast(spec.query.subject);
      const bool path_state = vi.model == ModelKind::LateralPath ||
                              vi.model == ModelKind::ComposedPath;
      std::vector<double> e_series(si.states.size());
      for (std::size_t l = 0; l < si.states.size(); ++l) {
        if (path_state) {
          e_series[l] = si.states[l](1);
        } else {
          const Vector pose =
              sim_detail::pose_from_state(vi, si.states[l], scenario_.road);
          e_series[l] =
              cartesian_to_path({pose(0), pose(1), pose(2)}, road).e_cg;
        }
      }
      std::vector<double> gap(e_series.size());
      const double half = road.width / 2.0;
      for (std::size_t l = 0; l < e_series.size(); ++l) {
        gap[l] = spec.query.side == 1 ? e_series[l] + radius - half
                                      : e_series[l] - radius + half;
      }
      const bool touching =
          spec.query.side == 1 ? gap[0] >= 0.0 : gap[0] <= 0.0;
      outcome.numeric =
          touching ? make_ssm_result({0.0}, SsmMethod::NumericScan,
                                     si.h * static_cast<double>(gap.size() - 1))
                   : numeric_collision_scan(gap, si.h);
    }
  }

  /// Path-coordinate analytic forecast of any planar vehicle, for boundary
  /// queries: path families linearize directly; Cartesian families are
  /// transformed to the path frame at the operating point first.
  AnalyticTrajectory analytic_boundary_forecast(const std::string& id) const {
    const int idx = scenario_.vehicle_index(id);
    const auto& vehicle = scenario_.vehicles[idx];
    const Vector& x = states_[idx];
    const Vector u = vehicle.schedule.value(time_);
    const double horizon = scenario_.sim.horizon;
    const ModelParams params = vehicle.model_params();
    const RoadGeometry& road = *scenario_.road;

    switch (vehicle.model) {
      case ModelKind::LateralPath:
      case ModelKind::ComposedPath:
        return analytic_forecast(id);
      case ModelKind::Bicycle2D:
      case ModelKind::ComposedBicycle: {
        const PathCoordinates pc = cartesian_to_path({x(0), x(1), x(2)}, road);
        const double kappa = path_curvature_at(road, pc.s);
        Vector px(4), pu(4);
        px << pc.s, pc.e_cg, pc.theta_e, x(3);
        // velocity channel: affine for the acceleration-controlled model,
        // the longitudinal closed form for the torque-driven one
        AnalyticTrajectory velocity =
            vehicle.model == ModelKind::ComposedBicycle
                ? longitudinal_velocity_closed_form(x(3), u(1), u(2),
                                                    params.longitudinal, horizon)
                : AnalyticTrajectory({TrajectorySegment{
                      0.0, horizon,
                      {{{Complex{x(3), 0.0}, 0, Complex{0.0, 0.0}},
                        {Complex{u(1), 0.0}, 1, Complex{0.0, 0.0}}}}}});
        const LtiSystem lat = linearize(
            ModelKind::LateralPath, px.head(3),
            (Vector(3) << u(0), x(3), kappa).finished(), params);
        ExponentialInput input;
        input.channels.resize(3);
        input.channels[0] = {{Complex{u(0), 0.0}, 0, Complex{0.0, 0.0}}};
        input.channels[1] = velocity.segments().front().components[0];
        input.channels[2] = {{Complex{kappa, 0.0}, 0, Complex{0.0, 0.0}}};
        AnalyticTrajectory lateral =
            convolve_exponential_input(lat, px.head(3), input, horizon);
        // forward-motion rule: the lateral estimate holds still once the
        // velocity channel reaches zero
        if (const auto t_stop = stopping_time(velocity, 0);
            t_stop && *t_stop > 0.0 && *t_stop < horizon) {
          lateral = freeze_after_stop(lateral, *t_stop);
        }
        return lateral;
      }
      default:
        throw ScenarioError("boundary query needs a planar or path-model vehicle");
    }
  }

  static bool planar_layout(ModelKind kind) {
    return kind == ModelKind::Bicycle2D || kind == ModelKind::ComposedBicycle ||
           kind == ModelKind::ConstantVelocity1D ||
           kind == ModelKind::DoubleIntegrator1D;
  }

  /// Forward-motion rule for closed-form forecasts: freeze at the first
  /// genuine downward zero crossing of the velocity component.
  static AnalyticTrajectory frozen_past_stop(AnalyticTrajectory traj, int v_comp) {
    const auto t_stop = stopping_time(traj, v_comp);
    if (!t_stop || *t_stop >= traj.t_end()) return traj;
    if (*t_stop <= traj.t_begin() &&
        traj.derivative_value(v_comp, traj.t_begin()) > 0.0) {
      return traj;  // at rest but pulling away, not a stop
    }
    return freeze_after_stop(traj, *t_stop);
  }

  /// 1D trajectories live on the x axis; keep the position component and
  /// pad a zero y so the planar gap polynomial applies.
  static AnalyticTrajectory lift_to_plane(const AnalyticTrajectory& traj,
                                          ModelKind kind) {
    if (kind == ModelKind::Bicycle2D || kind == ModelKind::ComposedBicycle) {
      return traj;
    }
    const TrajectorySegment& src = traj.segments().front();
    TrajectorySegment seg;
    seg.t_begin = src.t_begin;
    seg.t_end = src.t_end;
    seg.components = {src.components.front(), {}};
    return AnalyticTrajectory({seg});
  }

  /// (x, y, theta) of an analytic forecast at time t. 1D models map to the
  /// x axis.
  Vector analytic_pose(const VehicleSpec& vehicle, const AnalyticTrajectory& traj,
                       double t) const {
    Vector pose(3);
    switch (vehicle.model) {
      case ModelKind::ConstantVelocity1D:
      case ModelKind::DoubleIntegrator1D:
        pose << traj.value(0, t), 0.0, 0.0;
        return pose;
      case ModelKind::Bicycle2D:
      case ModelKind::ComposedBicycle:
        pose << traj.value(0, t), traj.value(1, t), traj.value(2, t);
        return pose;
      case ModelKind::LateralPath:
      case ModelKind::ComposedPath: {
        const CartesianPose p = path_to_cartesian(
            {traj.value(0, t), traj.value(1, t), traj.value(2, t)},
            *scenario_.road);
        pose << p.x, p.y, p.theta;
        return pose;
      }
    }
    throw std::logic_error("analytic_pose: unknown model");
  }

  Scenario scenario_;
  std::vector<Vector> states_;
  double time_ = 0.0;
};

/// Earliest-collision dispatch over a query: closed-form route when the
/// models admit one (1D TTC, polynomial circle gap), bracket scan over the
/// analytic trajectory otherwise, with the sampled numeric route as the
/// always-available oracle.
inline QueryOutcome earliest_collision(const Simulator& sim, const QuerySpec& query,
                                       RunMethod method) {
  return sim.evaluate_query(query, method);
}

/// Full rolling-horizon run: evaluates every query at each evaluation time,
/// captures requested snapshots, and advances the nonlinear world between
/// evaluations.
inline RunRecord run(const Scenario& scenario, RunMethod method) {
  Simulator sim(scenario);
  RunRecord record;
  const double period = scenario.sim.period;
  const int count = static_cast<int>(std::round(scenario.sim.duration / period));
  auto want_snapshot = [&](double t) {
    for (double s : scenario.sim.snapshots) {
      if (std::abs(s - t) < period / 2.0) return true;
    }
    return false;
  };
  for (int k = 0; k <= count; ++k) {
    const double t_r = k * period;
    sim.advance_to(t_r);
    record.evaluations.push_back(sim.evaluate_all(method));
    if (want_snapshot(t_r)) {
      record.snapshots.push_back(sim.capture_snapshot(method));
    }
  }
  return record;
}

}  // namespace ssm
