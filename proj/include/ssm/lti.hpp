#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ssm/analytic.hpp"
#include "ssm/exp_plan.hpp"

namespace ssm {

/// xdot = A x + B u + C with constant matrices.
struct LtiSystem {
  Matrix a;
  Matrix b;
  Vector c;

  LtiSystem(Matrix a_in, Matrix b_in, Vector c_in)
      : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)) {
    if (a.rows() != a.cols()) {
      throw std::invalid_argument("LtiSystem: A must be square");
    }
    if (b.rows() != a.rows() || c.size() != a.rows()) {
      throw std::invalid_argument("LtiSystem: inconsistent dimensions");
    }
    if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
      throw std::invalid_argument("LtiSystem: non-finite entries");
    }
  }

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }
};

/// Right-continuous piecewise-constant input signal. Pieces start at 0.
class PiecewiseConstantControl {
 public:
  PiecewiseConstantControl() = default;

  static PiecewiseConstantControl constant(const Vector& u) {
    PiecewiseConstantControl signal;
    signal.add_piece(0.0, u);
    return signal;
  }

  static PiecewiseConstantControl constant(double u) {
    Vector v(1);
    v(0) = u;
    return constant(v);
  }

  /// Appends a piece active from t_from onward. Pieces must be added in
  /// increasing time order and the first must start at 0.
  void add_piece(double t_from, const Vector& u) {
    if (pieces_.empty()) {
      if (t_from != 0.0) {
        throw std::invalid_argument("control pieces must start at t = 0");
      }
    } else {
      if (t_from <= pieces_.back().first) {
        throw std::invalid_argument("control pieces must be time-ordered");
      }
      if (u.size() != pieces_.back().second.size()) {
        throw std::invalid_argument("control pieces must share a dimension");
      }
    }
    if (!u.allFinite()) {
      throw std::invalid_argument("control value must be finite");
    }
    pieces_.emplace_back(t_from, u);
  }

  void add_piece(double t_from, double u) {
    Vector v(1);
    v(0) = u;
    add_piece(t_from, v);
  }

  bool empty() const { return pieces_.empty(); }
  int dimension() const {
    return pieces_.empty() ? 0 : static_cast<int>(pieces_.front().second.size());
  }

  const Vector& value(double t) const {
    if (pieces_.empty()) {
      throw std::logic_error("control signal has no pieces");
    }
    std::size_t i = pieces_.size() - 1;
    while (i > 0 && pieces_[i].first > t) --i;
    return pieces_[i].second;
  }

  /// Switch times strictly inside (t0, t1).
  std::vector<double> switch_times_in(double t0, double t1) const {
    std::vector<double> out;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].first > t0 && pieces_[i].first < t1) {
        out.push_back(pieces_[i].first);
      }
    }
    return out;
  }

  const std::vector<std::pair<double, Vector>>& pieces() const { return pieces_; }

 private:
  std::vector<std::pair<double, Vector>> pieces_;
};

/// Input whose channels are sums of c * t^p * e^{lambda t} terms, the same
/// basis AnalyticTrajectory uses.
struct ExponentialInput {
  std::vector<TermList> channels;

  static ExponentialInput constant(const Vector& u) {
    ExponentialInput input;
    input.channels.resize(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      input.channels[i] = {{Complex{u(i), 0.0}, 0, Complex{0.0, 0.0}}};
    }
    return input;
  }
};

/// Thrown when a closed-form route needs an eigenbasis that does not exist.
struct DefectiveMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Effective forcing w(t) = B u(t) + C as per-component term lists.
inline std::vector<TermList> forcing_terms(const LtiSystem& sys,
                                           const ExponentialInput& input) {
  if (static_cast<int>(input.channels.size()) != sys.input_dim()) {
    throw std::invalid_argument("input channel count does not match B");
  }
  std::vector<TermList> w(sys.state_dim());
  for (int i = 0; i < sys.state_dim(); ++i) {
    TermList terms;
    for (int j = 0; j < sys.input_dim(); ++j) {
      append_scaled(terms, input.channels[j], Complex{sys.b(i, j), 0.0});
    }
    terms.push_back({Complex{sys.c(i), 0.0}, 0, Complex{0.0, 0.0}});
    w[i] = simplify_terms(terms);
  }
  return w;
}

/// Free + forced response of one constant-expression span, as segment
/// component term lists in local time.
inline std::vector<TermList> span_solution(const LtiSystem& sys,
                                           const ExpPlan& plan,
                                           const Vector& x0,
                                           const std::vector<TermList>& w) {
  const int n = sys.state_dim();
  std::vector<TermList> comps(n);

  switch (plan.kind) {
    case ExpPlan::Kind::Nilpotent: {
      // e^{At} = sum_{p<k} A^p t^p / p!; the forced response reduces to
      // int (tau-s)^p w(s) ds pieces, all inside the term basis.
      Matrix a_power = Matrix::Identity(n, n);
      double factorial = 1.0;
      for (int p = 0; p < plan.nilpotency_index; ++p) {
        if (p > 0) {
          a_power = a_power * sys.a;
          factorial *= p;
        }
        const Vector free_vec = a_power * x0;
        for (int i = 0; i < n; ++i) {
          if (free_vec(i) != 0.0) {
            comps[i].push_back({Complex{free_vec(i) / factorial, 0.0}, p,
                                Complex{0.0, 0.0}});
          }
          for (int j = 0; j < n; ++j) {
            const double a_ij = a_power(i, j);
            if (a_ij == 0.0) continue;
            for (const auto& term : w[j]) {
              append_scaled(comps[i], convolve_with_power(p, term),
                            Complex{a_ij / factorial, 0.0});
            }
          }
        }
      }
      break;
    }
    case ExpPlan::Kind::Diagonalizable: {
      const ComplexVector z0 = plan.transform_inverse * x0.cast<Complex>();
      // wz = T^{-1} w, componentwise on term lists.
      std::vector<TermList> wz(n);
      for (int r = 0; r < n; ++r) {
        TermList terms;
        for (int j = 0; j < n; ++j) {
          append_scaled(terms, w[j], plan.transform_inverse(r, j));
        }
        wz[r] = simplify_terms(terms);
      }
      std::vector<TermList> z(n);
      for (int r = 0; r < n; ++r) {
        const Complex lambda = plan.eigenvalues(r);
        TermList terms;
        if (z0(r) != Complex{0.0, 0.0}) {
          terms.push_back({z0(r), 0, lambda});
        }
        for (const auto& term : wz[r]) {
          append_scaled(terms, convolve_with_mode(lambda, term), {1.0, 0.0});
        }
        z[r] = simplify_terms(terms);
      }
      for (int i = 0; i < n; ++i) {
        TermList terms;
        for (int r = 0; r < n; ++r) {
          append_scaled(terms, z[r], plan.transform(i, r));
        }
        comps[i] = simplify_terms(terms);
      }
      return comps;
    }
    case ExpPlan::Kind::General:
      throw DefectiveMatrixError(
          "closed-form LTI solution needs a nilpotent or diagonalizable A; "
          "use forced_response_quadrature or rk4_integrate");
  }
  for (auto& c : comps) c = simplify_terms(c);
  return comps;
}

}  // namespace detail

/// Closed-form solution of xdot = A x + B u + C for a piecewise-constant u,
/// one trajectory segment per constant-control interval, initial conditions
/// chained across segments.
inline AnalyticTrajectory solve_lti(const LtiSystem& sys, const Vector& x0,
                                    const PiecewiseConstantControl& u,
                                    double horizon,
                                    const ExpPlan* plan_in = nullptr) {
  if (horizon <= 0.0) {
    throw std::invalid_argument("solve_lti: horizon must be positive");
  }
  if (u.empty()) {
    throw std::invalid_argument("solve_lti: control does not cover [0, horizon]");
  }
  if (u.dimension() != sys.input_dim()) {
    throw std::invalid_argument("solve_lti: control dimension mismatch");
  }
  if (x0.size() != sys.state_dim()) {
    throw std::invalid_argument("solve_lti: state dimension mismatch");
  }
  const ExpPlan plan = plan_in ? *plan_in : classify_matrix(sys.a);

  std::vector<double> boundaries{0.0};
  for (double t : u.switch_times_in(0.0, horizon)) boundaries.push_back(t);
  boundaries.push_back(horizon);

  std::vector<TrajectorySegment> segments;
  Vector x = x0;
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    TrajectorySegment seg;
    seg.t_begin = boundaries[k];
    seg.t_end = boundaries[k + 1];
    const auto w = detail::forcing_terms(
        sys, ExponentialInput::constant(u.value(seg.t_begin)));
    seg.components = detail::span_solution(sys, plan, x, w);
    segments.push_back(seg);
    const AnalyticTrajectory partial({segments.back()});
    x = partial.state(seg.t_end);
  }
  return AnalyticTrajectory(std::move(segments));
}

/// Closed-form response to an exponential-basis input. Exact for
/// polynomial-times-exponential channels whenever A is nilpotent or
/// diagonalizable; rate/eigenvalue collisions fall into the resonance
/// branch rather than a division blowup.
inline AnalyticTrajectory convolve_exponential_input(
    const LtiSystem& sys, const Vector& x0, const ExponentialInput& input,
    double horizon, const ExpPlan* plan_in = nullptr) {
  if (horizon <= 0.0) {
    throw std::invalid_argument("convolve_exponential_input: horizon <= 0");
  }
  if (x0.size() != sys.state_dim()) {
    throw std::invalid_argument("convolve_exponential_input: state mismatch");
  }
  const ExpPlan plan = plan_in ? *plan_in : classify_matrix(sys.a);
  TrajectorySegment seg;
  seg.t_begin = 0.0;
  seg.t_end = horizon;
  seg.components =
      detail::span_solution(sys, plan, x0, detail::forcing_terms(sys, input));
  return AnalyticTrajectory({seg});
}

/// Gauss-Legendre fallback for the forced integral, valid for any A
/// (including defective ones) via the Pade exponential. Panels double until
/// the result is stable to 1e-9.
inline Vector forced_response_quadrature(const LtiSystem& sys, const Vector& x0,
                                         const ExponentialInput& input,
                                         double t) {
  // 10-point Gauss-Legendre nodes/weights on [-1, 1].
  static const std::array<double, 10> nodes = {
      -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
      -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
      0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
      0.9739065285171717};
  static const std::array<double, 10> weights = {
      0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
      0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
      0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
      0.0666713443086881};

  const int n = sys.state_dim();
  const auto w = detail::forcing_terms(sys, input);
  const auto w_at = [&](double tau) {
    Vector out(n);
    for (int i = 0; i < n; ++i) {
      const Complex v = evaluate_terms(w[i], tau);
      out(i) = v.real();
    }
    return out;
  };

  const Vector free_response = pade_exponential(sys.a * t) * x0;
  Vector previous = Vector::Zero(n);
  for (int panels = 1; panels <= 256; panels *= 2) {
    Vector forced = Vector::Zero(n);
    const double width = t / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * width;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double tau = mid + 0.5 * width * nodes[q];
        forced += (0.5 * width * weights[q]) *
                  (pade_exponential(sys.a * (t - tau)) * w_at(tau));
      }
    }
    const Vector result = free_response + forced;
    if (panels > 1 &&
        (result - previous).cwiseAbs().maxCoeff() <
            1e-9 * (1.0 + result.cwiseAbs().maxCoeff())) {
      return result;
    }
    previous = result;
  }
  return previous;
}

}  // namespace ssm
