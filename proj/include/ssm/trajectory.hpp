#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ssm/analytic.hpp"
#include "ssm/lti.hpp"
#include "ssm/models.hpp"
#include "ssm/rootfind.hpp"

namespace ssm {

/// Explicit Runge-Kutta coefficients.
struct ButcherTableau {
  Matrix a;     // strictly lower triangular stage coefficients
  Vector b;     // weights
  Vector c;     // nodes
  int order;

  void validate() const {
    const int stages = static_cast<int>(b.size());
    if (a.rows() != stages || a.cols() != stages || c.size() != stages) {
      throw std::invalid_argument("ButcherTableau: inconsistent dimensions");
    }
    if (std::abs(b.sum() - 1.0) > 1e-14) {
      throw std::invalid_argument("ButcherTableau: weights must sum to 1");
    }
    for (int i = 0; i < stages; ++i) {
      double row = 0.0;
      for (int j = 0; j < i; ++j) row += a(i, j);
      if (std::abs(row - c(i)) > 1e-14) {
        throw std::invalid_argument("ButcherTableau: c_i must equal sum_j a_ij");
      }
    }
  }
};

inline const ButcherTableau& classic_rk4() {
  static const ButcherTableau tableau = [] {
    ButcherTableau t;
    t.a = Matrix::Zero(4, 4);
    t.a(1, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(3, 2) = 1.0;
    t.b = Vector(4);
    t.b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
    t.c = Vector(4);
    t.c << 0.0, 0.5, 0.5, 1.0;
    t.order = 4;
    t.validate();
    return t;
  }();
  return tableau;
}

/// Discrete states on the uniform grid l*h, l = 0..N.
struct SampledTrajectory {
  double h = 0.0;
  std::vector<Vector> states;

  int steps() const { return static_cast<int>(states.size()) - 1; }
  double time_at(int l) const { return l * h; }
  double duration() const { return steps() * h; }
};

struct IntegrationError : std::runtime_error {
  int failed_step;
  IntegrationError(const std::string& what, int step)
      : std::runtime_error(what), failed_step(step) {}
};

using Rhs = std::function<Vector(const Vector&, const Vector&)>;

namespace detail {

inline Vector rk_step(const Rhs& rhs, const ButcherTableau& tab, const Vector& x,
                      double t, double h, const PiecewiseConstantControl& u) {
  // The caller guarantees [t, t+h] contains no control switch, so the
  // stage-time samples u(t + c_i h) all equal the value at the substep
  // start; sampling once keeps the final stage off the next piece when the
  // substep ends exactly on a switch.
  const Vector& u_now = u.value(t);
  const int stages = static_cast<int>(tab.b.size());
  std::vector<Vector> k(stages);
  for (int i = 0; i < stages; ++i) {
    Vector xi = x;
    for (int j = 0; j < i; ++j) {
      if (tab.a(i, j) != 0.0) xi += h * tab.a(i, j) * k[j];
    }
    k[i] = rhs(xi, u_now);
  }
  Vector next = x;
  for (int i = 0; i < stages; ++i) next += h * tab.b(i) * k[i];
  return next;
}

}  // namespace detail

/// Fixed-step explicit Runge-Kutta integration with control sampled at the
/// stage times. A step never straddles a control switch: the grid step is
/// internally split at switch times so piecewise-constant schedules are
/// honored exactly; recorded states stay on the uniform l*h grid.
inline SampledTrajectory rk4_integrate(const Rhs& rhs, const Vector& x0,
                                       const PiecewiseConstantControl& u,
                                       double h, int steps,
                                       const ButcherTableau& tableau = classic_rk4()) {
  if (h <= 0.0) throw std::invalid_argument("rk4_integrate: h must be positive");
  if (steps < 1) throw std::invalid_argument("rk4_integrate: need at least one step");
  if (u.empty()) throw std::invalid_argument("rk4_integrate: empty control signal");

  SampledTrajectory out;
  out.h = h;
  out.states.reserve(steps + 1);
  out.states.push_back(x0);

  Vector x = x0;
  for (int l = 0; l < steps; ++l) {
    const double t0 = l * h;
    const double t1 = (l + 1) * h;
    std::vector<double> cuts = u.switch_times_in(t0, t1);
    cuts.push_back(t1);
    double t = t0;
    for (double cut : cuts) {
      const double hs = cut - t;
      if (hs > 0.0) x = detail::rk_step(rhs, tableau, x, t, hs, u);
      t = cut;
    }
    if (!x.allFinite()) {
      throw IntegrationError("rk4_integrate: non-finite state", l + 1);
    }
    out.states.push_back(x);
  }
  return out;
}

/// Closed-form velocity of the linearized force-balance model under
/// constant wheel torque and grade:
///   v(t) = e^{at} v0 - (e^{at} - 1)/(-a) K,  a = -rho Cd S v0 / m,
/// with K collecting the torque, drag-linearization and road-load constants
/// evaluated at (v0, T0, alpha0). Near-zero v0 degenerates the rate and the
/// zero-rate limit v(t) = v0 + K t is used instead.
inline AnalyticTrajectory longitudinal_velocity_closed_form(
    double v0, double torque0, double alpha0, const LongitudinalParams& p,
    double horizon) {
  if (horizon <= 0.0) {
    throw std::invalid_argument("longitudinal_velocity_closed_form: horizon <= 0");
  }
  const double k_const = torque0 / (p.mass * p.r_whl) +
                         0.5 * p.rho * p.c_d * p.s_front * v0 * v0 / p.mass -
                         p.f_roll * std::cos(alpha0) * p.g -
                         p.g * std::sin(alpha0);
  TrajectorySegment seg;
  seg.t_begin = 0.0;
  seg.t_end = horizon;
  seg.components.resize(1);
  const double rate = -p.rho * p.c_d * p.s_front * v0 / p.mass;
  // Degenerate rate (v0 ~ 0, or a vanishing drag coefficient): the K/rate
  // split cancels catastrophically, so use the zero-rate limit v0 + K t.
  if (v0 <= 1e-6 || std::abs(rate) * horizon < 1e-9) {
    seg.components[0] = {{Complex{v0, 0.0}, 0, Complex{0.0, 0.0}},
                         {Complex{k_const, 0.0}, 1, Complex{0.0, 0.0}}};
  } else {
    seg.components[0] = {{Complex{v0 + k_const / rate, 0.0}, 0, Complex{rate, 0.0}},
                         {Complex{-k_const / rate, 0.0}, 0, Complex{0.0, 0.0}}};
  }
  seg.components[0] = simplify_terms(seg.components[0]);
  return AnalyticTrajectory({seg});
}

/// Smallest t >= 0 with v(t) = 0; affine segments are solved exactly, other
/// segments by a scan plus Brent refinement. Empty when v stays positive.
inline std::optional<double> stopping_time(const AnalyticTrajectory& traj,
                                           int velocity_component = 0) {
  if (traj.value(velocity_component, traj.t_begin()) <= 0.0) {
    return traj.t_begin();
  }
  for (std::size_t si = 0; si < traj.segments().size(); ++si) {
    const auto& seg = traj.segments()[si];
    const double span = seg.t_end - seg.t_begin;
    if (span <= 0.0) continue;
    if (traj.segment_is_polynomial(si)) {
      const auto coeffs = traj.polynomial_coefficients(si, velocity_component);
      if (coeffs.size() <= 2) {  // affine: closed form
        const double c0 = coeffs[0];
        const double c1 = coeffs.size() == 2 ? coeffs[1] : 0.0;
        if (c0 <= 0.0) return seg.t_begin;
        if (c1 < 0.0) {
          const double tau = -c0 / c1;
          if (tau <= span + 1e-12) return seg.t_begin + std::min(tau, span);
        }
        continue;
      }
      for (double tau : real_polynomial_roots(coeffs)) {
        if (tau >= 0.0 && tau <= span + 1e-12) {
          return seg.t_begin + std::min(tau, span);
        }
      }
      continue;
    }
    // exponential segment: bracket then refine
    const auto v = [&](double t) { return traj.value(velocity_component, t); };
    const int grid = 1000;
    double prev_t = seg.t_begin;
    double prev_v = v(prev_t);
    for (int i = 1; i <= grid; ++i) {
      const double t = seg.t_begin + span * i / grid;
      const double vt = v(t);
      if (prev_v > 0.0 && vt <= 0.0) {
        return vt == 0.0 ? t : brent(v, prev_t, t, 1e-12);
      }
      prev_t = t;
      prev_v = vt;
    }
  }
  return std::nullopt;
}

/// Position held constant from the stopping time onward; all components are
/// frozen at their value there.
inline AnalyticTrajectory freeze_after_stop(const AnalyticTrajectory& traj,
                                            double t_stop) {
  return traj.frozen_after(t_stop);
}

}  // namespace ssm
