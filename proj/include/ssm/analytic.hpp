#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ssm/exp_plan.hpp"

namespace ssm {

/// Resonance threshold: an input rate closer than this to a system
/// eigenvalue is convolved with the t*e^{lambda t} formula instead of
/// dividing by the near-zero gap.
inline constexpr double kResonanceTol = 1e-10;

/// One basis term c * tau^p * e^{rate tau} in segment-local time.
struct ExpTerm {
  Complex coeff{0.0, 0.0};
  int power = 0;
  Complex rate{0.0, 0.0};
};

using TermList = std::vector<ExpTerm>;

inline Complex evaluate_terms(const TermList& terms, double tau) {
  Complex sum{0.0, 0.0};
  for (const auto& term : terms) {
    sum += term.coeff * std::pow(tau, term.power) * std::exp(term.rate * tau);
  }
  return sum;
}

/// d/dtau of a term list, still in the same basis.
inline TermList differentiate_terms(const TermList& terms) {
  TermList out;
  out.reserve(2 * terms.size());
  for (const auto& term : terms) {
    if (term.power > 0) {
      out.push_back({term.coeff * static_cast<double>(term.power),
                     term.power - 1, term.rate});
    }
    if (term.rate != Complex{0.0, 0.0}) {
      out.push_back({term.coeff * term.rate, term.power, term.rate});
    }
  }
  return out;
}

/// Merges terms sharing the same (power, rate) key and drops exact zeros.
inline TermList simplify_terms(const TermList& terms) {
  std::map<std::pair<int, std::pair<double, double>>, Complex> merged;
  for (const auto& term : terms) {
    if (term.coeff == Complex{0.0, 0.0}) continue;
    auto key = std::make_pair(term.power,
                              std::make_pair(term.rate.real(), term.rate.imag()));
    merged[key] += term.coeff;
  }
  TermList out;
  out.reserve(merged.size());
  for (const auto& [key, coeff] : merged) {
    if (coeff == Complex{0.0, 0.0}) continue;
    out.push_back({coeff, key.first, {key.second.first, key.second.second}});
  }
  return out;
}

inline void scale_terms(TermList& terms, const Complex& factor) {
  for (auto& term : terms) term.coeff *= factor;
}

inline void append_scaled(TermList& dst, const TermList& src, const Complex& factor) {
  for (const auto& term : src) {
    dst.push_back({term.coeff * factor, term.power, term.rate});
  }
}

/// Terms of the primitive integral J_q(tau) = int_0^tau s^q e^{mu s} ds.
/// The |mu| ~ 0 branch is the resonance formula tau^{q+1}/(q+1).
inline TermList power_exponential_integral(int q, const Complex& mu) {
  if (std::abs(mu) < kResonanceTol) {
    return {{Complex{1.0 / (q + 1), 0.0}, q + 1, Complex{0.0, 0.0}}};
  }
  // J_q = tau^q e^{mu tau}/mu - (q/mu) J_{q-1}, J_0 = (e^{mu tau} - 1)/mu.
  TermList current = {{1.0 / mu, 0, mu}, {-1.0 / mu, 0, Complex{0.0, 0.0}}};
  for (int p = 1; p <= q; ++p) {
    TermList next = {{1.0 / mu, p, mu}};
    append_scaled(next, current, -static_cast<double>(p) / mu);
    current = simplify_terms(next);
  }
  return current;
}

/// Terms of int_0^tau e^{lambda_r (tau - s)} c s^p e^{lambda s} ds; the
/// building block of every forced response here.
inline TermList convolve_with_mode(const Complex& lambda_r, const ExpTerm& term) {
  const Complex mu = term.rate - lambda_r;
  TermList out;
  if (std::abs(mu) < kResonanceTol) {
    out.push_back({term.coeff / static_cast<double>(term.power + 1),
                   term.power + 1, lambda_r});
    return out;
  }
  for (const auto& j : power_exponential_integral(term.power, mu)) {
    out.push_back({term.coeff * j.coeff, j.power, j.rate + lambda_r});
  }
  return out;
}

/// Terms of int_0^tau (tau - s)^p c s^q e^{lambda s} ds, used by the
/// finite-Taylor (nilpotent) forced response. Binomially expands
/// (tau - s)^p; every piece lands back in the term basis.
inline TermList convolve_with_power(int p, const ExpTerm& term) {
  TermList out;
  double binom = 1.0;
  for (int j = 0; j <= p; ++j) {
    if (j > 0) binom = binom * (p - j + 1) / j;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const TermList inner = power_exponential_integral(term.power + j, term.rate);
    for (const auto& it : inner) {
      // multiply by binom * (-1)^j * tau^{p-j}
      out.push_back({term.coeff * sign * binom * it.coeff, it.power + p - j,
                     it.rate});
    }
  }
  return simplify_terms(out);
}

/// One constant-control (or single-expression-input) span of a trajectory.
/// Component term lists are in local time tau = t - t_begin.
struct TrajectorySegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<TermList> components;
};

/// Closed-form trajectory: an ordered, contiguous list of segments, each
/// holding per-component sums of c * tau^p * e^{lambda tau} terms. Values
/// are real; evaluation checks that imaginary parts cancel.
class AnalyticTrajectory {
 public:
  AnalyticTrajectory() = default;

  explicit AnalyticTrajectory(std::vector<TrajectorySegment> segments)
      : segments_(std::move(segments)) {
    if (segments_.empty()) {
      throw std::invalid_argument("AnalyticTrajectory: no segments");
    }
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
      if (std::abs(segments_[i].t_end - segments_[i + 1].t_begin) > 1e-12) {
        throw std::invalid_argument("AnalyticTrajectory: segments not contiguous");
      }
    }
  }

  int dimension() const {
    return static_cast<int>(segments_.front().components.size());
  }
  double t_begin() const { return segments_.front().t_begin; }
  double t_end() const { return segments_.back().t_end; }
  const std::vector<TrajectorySegment>& segments() const { return segments_; }

  /// Segment whose span contains t; times beyond the horizon extrapolate
  /// the final segment.
  const TrajectorySegment& segment_containing(double t) const {
    for (const auto& seg : segments_) {
      if (t < seg.t_end) return seg;
    }
    return segments_.back();
  }

  double value(int component, double t) const {
    const TrajectorySegment& seg = segment_containing(t);
    const Complex v = evaluate_terms(seg.components.at(component), t - seg.t_begin);
    check_real(v);
    return v.real();
  }

  Vector state(double t) const {
    const TrajectorySegment& seg = segment_containing(t);
    Vector out(dimension());
    for (int i = 0; i < dimension(); ++i) {
      const Complex v = evaluate_terms(seg.components[i], t - seg.t_begin);
      check_real(v);
      out(i) = v.real();
    }
    return out;
  }

  double derivative_value(int component, double t) const {
    const TrajectorySegment& seg = segment_containing(t);
    const Complex v = evaluate_terms(differentiate_terms(seg.components.at(component)),
                                     t - seg.t_begin);
    check_real(v);
    return v.real();
  }

  Vector derivative_state(double t) const {
    Vector out(dimension());
    for (int i = 0; i < dimension(); ++i) out(i) = derivative_value(i, t);
    return out;
  }

  bool segment_is_polynomial(std::size_t index) const {
    for (const auto& comp : segments_.at(index).components) {
      for (const auto& term : comp) {
        if (std::abs(term.rate) > kResonanceTol) return false;
      }
    }
    return true;
  }

  /// Ascending coefficients in segment-local time; throws when the segment
  /// carries genuine exponential terms.
  std::vector<double> polynomial_coefficients(std::size_t segment_index,
                                              int component) const {
    if (!segment_is_polynomial(segment_index)) {
      throw std::domain_error(
          "polynomial_coefficients: segment has exponential terms");
    }
    const TermList& terms = segments_.at(segment_index).components.at(component);
    int degree = 0;
    for (const auto& term : terms) degree = std::max(degree, term.power);
    std::vector<double> coeffs(degree + 1, 0.0);
    for (const auto& term : terms) {
      check_real(term.coeff);
      coeffs[term.power] += term.coeff.real();
    }
    return coeffs;
  }

  /// Constant trajectory over [t0, t1] holding the given values.
  static AnalyticTrajectory constant(const Vector& values, double t0, double t1) {
    TrajectorySegment seg;
    seg.t_begin = t0;
    seg.t_end = t1;
    seg.components.resize(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      seg.components[i] = {{Complex{values(i), 0.0}, 0, Complex{0.0, 0.0}}};
    }
    return AnalyticTrajectory({seg});
  }

  /// Truncates at t_stop and appends a constant segment holding the state
  /// reached there, through the original horizon at least.
  AnalyticTrajectory frozen_after(double t_stop) const {
    if (t_stop <= t_begin()) {
      Vector held = state(t_begin());
      return constant(held, t_begin(), std::max(t_end(), t_stop));
    }
    std::vector<TrajectorySegment> out;
    for (const auto& seg : segments_) {
      if (seg.t_begin >= t_stop) break;
      TrajectorySegment clipped = seg;
      clipped.t_end = std::min(seg.t_end, t_stop);
      out.push_back(clipped);
    }
    const Vector held = state(t_stop);
    TrajectorySegment tail;
    tail.t_begin = t_stop;
    tail.t_end = std::max(t_end(), t_stop);
    tail.components.resize(held.size());
    for (Eigen::Index i = 0; i < held.size(); ++i) {
      tail.components[i] = {{Complex{held(i), 0.0}, 0, Complex{0.0, 0.0}}};
    }
    out.push_back(tail);
    return AnalyticTrajectory(std::move(out));
  }

 private:
  static void check_real(const Complex& v) {
    if (std::abs(v.imag()) > kImagResidueTol * (1.0 + std::abs(v.real()))) {
      throw std::runtime_error(
          "AnalyticTrajectory: imaginary residue exceeds tolerance");
    }
  }

  std::vector<TrajectorySegment> segments_;
};

}  // namespace ssm
