#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ssm/exp_plan.hpp"

namespace ssm {

/// Brent-Dekker refinement of a root bracketed by [a, b] (f(a), f(b) of
/// opposite sign). Returns the abscissa with |interval| <= tol.
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-10, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    throw std::invalid_argument("brent: interval does not bracket a root");
  }
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa;
  double d = b - a;
  bool bisected = true;
  double s = b;

  for (int iter = 0; iter < max_iter; ++iter) {
    if (fb == 0.0 || std::abs(b - a) < tol) break;
    if (fa != fc && fb != fc) {
      // inverse quadratic interpolation
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double lo = (3.0 * a + b) / 4.0;
    const bool out_of_range = (s < std::min(lo, b)) || (s > std::max(lo, b));
    const bool slow = bisected ? std::abs(s - b) >= 0.5 * std::abs(b - c)
                               : std::abs(s - b) >= 0.5 * std::abs(c - d);
    const bool tiny = bisected ? std::abs(b - c) < tol : std::abs(c - d) < tol;
    if (out_of_range || slow || tiny) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }
    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if (fa * fs < 0.0) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

/// All complex roots of c[0] + c[1] t + ... + c[n] t^n as eigenvalues of the
/// companion matrix. Leading coefficients below 1e-12 * max|c| are stripped
/// before the companion matrix is formed.
inline std::vector<Complex> polynomial_roots(std::vector<double> coeffs) {
  if (coeffs.empty()) return {};
  double max_abs = 0.0;
  for (double c : coeffs) max_abs = std::max(max_abs, std::abs(c));
  if (max_abs == 0.0) return {};
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-12 * max_abs) {
    coeffs.pop_back();
  }
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree < 1) return {};

  Matrix companion = Matrix::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -coeffs[i] / coeffs[degree];
  }
  Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
  std::vector<Complex> roots;
  roots.reserve(degree);
  for (int i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

inline double evaluate_polynomial(const std::vector<double>& coeffs, double t) {
  double value = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    value = value * t + *it;
  }
  return value;
}

inline std::vector<double> differentiate_polynomial(const std::vector<double>& coeffs) {
  if (coeffs.size() <= 1) return {0.0};
  std::vector<double> out(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    out[i - 1] = coeffs[i] * static_cast<double>(i);
  }
  return out;
}

/// Real roots: companion eigenvalues with |Im| < 1e-7 (1 + |Re|), polished
/// by a couple of Newton steps. Multiple roots keep their multiplicity.
inline std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs) {
  const auto deriv = differentiate_polynomial(coeffs);
  std::vector<double> out;
  for (const Complex& root : polynomial_roots(coeffs)) {
    if (std::abs(root.imag()) >= 1e-7 * (1.0 + std::abs(root.real()))) continue;
    double t = root.real();
    for (int i = 0; i < 2; ++i) {
      const double fp = evaluate_polynomial(deriv, t);
      if (fp == 0.0) break;
      const double step = evaluate_polynomial(coeffs, t) / fp;
      if (!std::isfinite(step) || std::abs(step) > 1.0) break;
      t -= step;
    }
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Recenters p(t) into q(tau) = p(tau + shift).
inline std::vector<double> shift_polynomial(const std::vector<double>& coeffs,
                                            double shift) {
  std::vector<double> out(coeffs.size(), 0.0);
  for (std::size_t p = 0; p < coeffs.size(); ++p) {
    double binom = 1.0;
    double power = 1.0;  // shift^j
    for (std::size_t j = 0; j <= p; ++j) {
      if (j > 0) {
        binom = binom * static_cast<double>(p - j + 1) / static_cast<double>(j);
        power *= shift;
      }
      out[p - j] += coeffs[p] * binom * power;
    }
  }
  return out;
}

}  // namespace ssm
