#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssm/analytic.hpp"
#include "ssm/models.hpp"
#include "ssm/rootfind.hpp"
#include "ssm/trajectory.hpp"

namespace ssm {

enum class SsmMethod { Analytic, NumericScan };

/// Which interaction a query asks about.
struct CollisionQuery {
  enum class Kind { VehicleVehicle, VehicleObstacle, VehicleBoundary };
  Kind kind = Kind::VehicleVehicle;
  std::string subject;   // vehicle id
  std::string other;     // vehicle or obstacle id
  int side = 1;          // boundary queries: 1 = left (+w/2), 2 = right (-w/2)
};

/// Every non-negative collision root found, the earliest one, and optional
/// DeltaV extracted at that time.
struct SsmResult {
  std::vector<double> roots;
  std::optional<double> t_c_star;
  SsmMethod method = SsmMethod::Analytic;
  double horizon = 0.0;
  std::optional<std::pair<double, double>> delta_v;
};

inline SsmResult make_ssm_result(std::vector<double> roots, SsmMethod method,
                                 double horizon) {
  std::sort(roots.begin(), roots.end());
  SsmResult result;
  result.roots = std::move(roots);
  result.method = method;
  result.horizon = horizon;
  if (!result.roots.empty()) result.t_c_star = result.roots.front();
  return result;
}

/// Classic TTC on a straight lane: gap over closing speed. Non-positive
/// gaps report an immediate collision (t_c* = 0); non-positive closing
/// speeds report no risk.
inline SsmResult ttc(double p_lead, double p_follow, double v_lead,
                     double v_follow, double effective_length,
                     double horizon = std::numeric_limits<double>::infinity()) {
  const double gap = p_lead - p_follow - effective_length;
  const double closing = v_follow - v_lead;
  if (gap <= 0.0) {
    return make_ssm_result({0.0}, SsmMethod::Analytic, horizon);
  }
  if (closing <= 0.0) {
    return make_ssm_result({}, SsmMethod::Analytic, horizon);
  }
  const double root = gap / closing;
  if (root > horizon) {
    return make_ssm_result({}, SsmMethod::Analytic, horizon);
  }
  return make_ssm_result({root}, SsmMethod::Analytic, horizon);
}

enum class RcriLevel { Safe, Dangerous };

struct RcriFlag {
  RcriLevel level = RcriLevel::Safe;
  double delta_p = 0.0;  // stopped-gap margin; dangerous iff <= 0
};

/// Stopping-distance comparison: Delta_p = S - v_f t_d - v_f^2/(2 d_m)
/// + v_l^2/(2 d_m). S is the initial clearance net of vehicle length.
inline RcriFlag rcri_flag(double v_lead, double v_follow, double clearance,
                          double d_max, double t_delay) {
  if (d_max <= 0.0) throw std::invalid_argument("rcri_flag: d_max must be positive");
  if (t_delay < 0.0) throw std::invalid_argument("rcri_flag: negative delay");
  RcriFlag flag;
  flag.delta_p = clearance - v_follow * t_delay -
                 v_follow * v_follow / (2.0 * d_max) +
                 v_lead * v_lead / (2.0 * d_max);
  flag.level = flag.delta_p <= 0.0 ? RcriLevel::Dangerous : RcriLevel::Safe;
  return flag;
}

/// Braking trajectories behind the RCRI solver: leader starts at the
/// clearance and brakes immediately, follower starts at 0 and brakes after
/// the delay; both freeze once stopped. Components are [p, v].
struct RcriTrajectories {
  AnalyticTrajectory lead;
  AnalyticTrajectory follow;
};

inline RcriTrajectories rcri_trajectories(double v_lead, double v_follow,
                                          double clearance, double d_max,
                                          double t_delay, double horizon) {
  if (d_max <= 0.0) throw std::invalid_argument("rcri: d_max must be positive");
  if (t_delay < 0.0) throw std::invalid_argument("rcri: negative delay");
  if (horizon <= 0.0) throw std::invalid_argument("rcri: horizon must be positive");

  Matrix a(2, 2), b(2, 1);
  a << 0.0, 1.0, 0.0, 0.0;
  b << 0.0, 1.0;
  const LtiSystem sys(a, b, Vector::Zero(2));

  Vector x_lead(2), x_follow(2);
  x_lead << clearance, v_lead;
  x_follow << 0.0, v_follow;

  auto braked = [&](const Vector& x0, double delay) {
    PiecewiseConstantControl u;
    if (delay > 0.0) {
      u.add_piece(0.0, 0.0);
      if (delay < horizon) u.add_piece(delay, -d_max);
    } else {
      u.add_piece(0.0, -d_max);
    }
    AnalyticTrajectory traj = solve_lti(sys, x0, u, horizon);
    if (auto t_stop = stopping_time(traj, 1)) {
      traj = freeze_after_stop(traj, *t_stop);
    }
    return traj;
  };

  return {braked(x_lead, 0.0), braked(x_follow, t_delay)};
}

namespace detail {

/// Polynomial of one trajectory segment, recentred to an absolute-time
/// window starting at t_abs.
inline std::vector<double> window_polynomial(const AnalyticTrajectory& traj,
                                             int component, double t_abs) {
  const auto& segs = traj.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (t_abs < segs[i].t_end || i + 1 == segs.size()) {
      return shift_polynomial(traj.polynomial_coefficients(i, component),
                              t_abs - segs[i].t_begin);
    }
  }
  throw std::logic_error("window_polynomial: unreachable");
}

inline std::vector<double> subtract(std::vector<double> lhs,
                                    const std::vector<double>& rhs) {
  if (lhs.size() < rhs.size()) lhs.resize(rhs.size(), 0.0);
  for (std::size_t i = 0; i < rhs.size(); ++i) lhs[i] -= rhs[i];
  return lhs;
}

}  // namespace detail

/// Earliest collision under the RCRI braking pattern. Roots come from the
/// piecewise gap built out of the solver trajectories, evaluated phase by
/// phase against each phase's feasibility window.
inline SsmResult rcri_time_to_collision(double v_lead, double v_follow,
                                        double clearance, double d_max,
                                        double t_delay, double horizon) {
  const RcriTrajectories trajs =
      rcri_trajectories(v_lead, v_follow, clearance, d_max, t_delay, horizon);

  if (clearance <= 0.0) {
    return make_ssm_result({0.0}, SsmMethod::Analytic, horizon);
  }

  // Phase boundaries: control switch + both stopping times.
  std::vector<double> cuts{0.0, horizon};
  for (const auto& seg : trajs.lead.segments()) {
    if (seg.t_begin > 0.0 && seg.t_begin < horizon) cuts.push_back(seg.t_begin);
  }
  for (const auto& seg : trajs.follow.segments()) {
    if (seg.t_begin > 0.0 && seg.t_begin < horizon) cuts.push_back(seg.t_begin);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());

  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t0 = cuts[k];
    const double span = cuts[k + 1] - t0;
    if (span <= 0.0) continue;
    const auto gap = detail::subtract(detail::window_polynomial(trajs.lead, 0, t0),
                                      detail::window_polynomial(trajs.follow, 0, t0));
    for (double tau : real_polynomial_roots(gap)) {
      if (tau >= -1e-12 && tau <= span + 1e-12) {
        roots.push_back(std::min(std::max(t0 + tau, 0.0), horizon));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());
  return make_ssm_result(std::move(roots), SsmMethod::Analytic, horizon);
}

/// Coefficients of (dx(t))^2 + (dy(t))^2 - (r_i + r_j)^2 on the shared
/// first segment; both trajectories must be polynomial (degree <= 3 for the
/// linearized planar model, giving the degree-6 collision polynomial).
inline std::vector<double> circle_gap_polynomial(const AnalyticTrajectory& traj_i,
                                                 const AnalyticTrajectory& traj_j,
                                                 double r_i, double r_j,
                                                 int x_component = 0,
                                                 int y_component = 1) {
  if (!traj_i.segment_is_polynomial(0) || !traj_j.segment_is_polynomial(0)) {
    throw std::domain_error(
        "circle_gap_polynomial: non-polynomial segment; use bracket_scan");
  }
  const auto dx = detail::subtract(traj_i.polynomial_coefficients(0, x_component),
                                   traj_j.polynomial_coefficients(0, x_component));
  const auto dy = detail::subtract(traj_i.polynomial_coefficients(0, y_component),
                                   traj_j.polynomial_coefficients(0, y_component));
  const std::size_t n = std::max(dx.size(), dy.size());
  std::vector<double> out(2 * n - 1, 0.0);
  for (std::size_t i = 0; i < dx.size(); ++i) {
    for (std::size_t j = 0; j < dx.size(); ++j) out[i + j] += dx[i] * dx[j];
  }
  for (std::size_t i = 0; i < dy.size(); ++i) {
    for (std::size_t j = 0; j < dy.size(); ++j) out[i + j] += dy[i] * dy[j];
  }
  out[0] -= (r_i + r_j) * (r_i + r_j);
  return out;
}

/// Scans [0, horizon] for sign changes of a continuous function and refines
/// each bracket with Brent-Dekker. Collision semantics for already-touching
/// starts (g(0) <= 0 means t_c* = 0) live with the callers.
inline SsmResult bracket_scan(const std::function<double(double)>& g,
                              double horizon, double coarse_step = 0.01,
                              SsmMethod tag = SsmMethod::Analytic) {
  if (coarse_step <= 0.0) {
    throw std::invalid_argument("bracket_scan: coarse_step must be positive");
  }
  std::vector<double> roots;
  double t_prev = 0.0;
  double g_prev = g(0.0);
  if (std::abs(g_prev) < 1e-12) roots.push_back(0.0);
  const int steps = static_cast<int>(std::ceil(horizon / coarse_step));
  for (int i = 1; i <= steps; ++i) {
    const double t = std::min(i * coarse_step, horizon);
    const double gt = g(t);
    if (std::abs(gt) < 1e-12) {
      roots.push_back(t);
    } else if (g_prev * gt < 0.0) {
      roots.push_back(brent(g, t_prev, t, 1e-10));
    }
    t_prev = t;
    g_prev = gt;
  }
  return make_ssm_result(std::move(roots), tag, horizon);
}

/// Lateral clearance to one road edge: side 1 is the left boundary at
/// +w/2, side 2 the right boundary at -w/2; the value reaches zero when
/// the bounding circle touches the edge.
inline std::function<double(double)> boundary_gap(
    const std::function<double(double)>& e_cg, double radius, double width,
    int side) {
  if (side != 1 && side != 2) {
    throw std::invalid_argument("boundary_gap: side must be 1 or 2");
  }
  const double half = width / 2.0;
  if (side == 1) {
    return [e_cg, radius, half](double t) { return e_cg(t) + radius - half; };
  }
  return [e_cg, radius, half](double t) { return e_cg(t) - radius + half; };
}

inline std::function<double(double)> boundary_gap(const AnalyticTrajectory& traj,
                                                  int e_component, double radius,
                                                  double width, int side) {
  return boundary_gap(
      [traj, e_component](double t) { return traj.value(e_component, t); },
      radius, width, side);
}

/// Sign-change scan over a sampled series; sub-step estimates come from
/// linear interpolation within the step. Already-touching starts are the
/// callers' concern.
inline SsmResult numeric_collision_scan(const std::vector<double>& gap_samples,
                                        double h) {
  if (gap_samples.empty()) {
    throw std::invalid_argument("numeric_collision_scan: empty series");
  }
  const double horizon = h * static_cast<double>(gap_samples.size() - 1);
  std::vector<double> roots;
  if (gap_samples[0] == 0.0) roots.push_back(0.0);
  for (std::size_t l = 1; l < gap_samples.size(); ++l) {
    const double g0 = gap_samples[l - 1];
    const double g1 = gap_samples[l];
    if ((g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0)) {
      const double frac = g1 == g0 ? 1.0 : g0 / (g0 - g1);
      roots.push_back((static_cast<double>(l - 1) + frac) * h);
    }
  }
  return make_ssm_result(std::move(roots), SsmMethod::NumericScan, horizon);
}

/// Momentum-weighted velocity changes of a two-body collision.
inline std::pair<double, double> delta_v(double m_i, double m_j, double v_i_at_tc,
                                         double v_j_at_tc) {
  if (m_i <= 0.0 || m_j <= 0.0) {
    throw std::invalid_argument("delta_v: masses must be positive");
  }
  const double closing = v_j_at_tc - v_i_at_tc;
  const double sum = m_i + m_j;
  return {m_j / sum * closing, -(m_i / sum) * closing};
}

/// Minimum circle-pair distance between two planar poses, minus the touch
/// threshold; the g_v used by scans when vehicles carry several circles.
inline double circle_pair_gap(const Vector& pose_i, const VehicleGeometry& geom_i,
                              const Vector& pose_j, const VehicleGeometry& geom_j) {
  double gap = std::numeric_limits<double>::infinity();
  const double ci = std::cos(pose_i(2)), si = std::sin(pose_i(2));
  const double cj = std::cos(pose_j(2)), sj = std::sin(pose_j(2));
  for (const auto& a : geom_i.circles) {
    const double ax = pose_i(0) + a.offset * ci;
    const double ay = pose_i(1) + a.offset * si;
    for (const auto& b : geom_j.circles) {
      const double bx = pose_j(0) + b.offset * cj;
      const double by = pose_j(1) + b.offset * sj;
      const double d = std::hypot(ax - bx, ay - by) - (a.radius + b.radius);
      gap = std::min(gap, d);
    }
  }
  return gap;
}

inline double circle_obstacle_gap(const Vector& pose, const VehicleGeometry& geom,
                                  double ob_x, double ob_y, double ob_r) {
  double gap = std::numeric_limits<double>::infinity();
  const double c = std::cos(pose(2)), s = std::sin(pose(2));
  for (const auto& a : geom.circles) {
    const double ax = pose(0) + a.offset * c;
    const double ay = pose(1) + a.offset * s;
    gap = std::min(gap, std::hypot(ax - ob_x, ay - ob_y) - (a.radius + ob_r));
  }
  return gap;
}

}  // namespace ssm
