#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ssm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Relative tolerance for declaring a matrix power zero.
inline constexpr double kNilpotentTol = 1e-12;
/// Eigenvector conditioning above which diagonalization is rejected.
inline constexpr double kConditionLimit = 1e8;
/// Largest imaginary residue tolerated when a result must be real.
inline constexpr double kImagResidueTol = 1e-9;

inline double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double one_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

/// How e^{At} will be computed for a given A.
struct ExpPlan {
  enum class Kind { Nilpotent, Diagonalizable, General };

  Kind kind = Kind::General;
  int nilpotency_index = 0;        // smallest k with A^k = 0
  ComplexVector eigenvalues;       // Diagonalizable only
  ComplexMatrix transform;         // T, eigenvectors as columns
  ComplexMatrix transform_inverse; // T^{-1}
};

/// Decides between the finite Taylor sum, the eigenvector route, and the
/// Pade fallback. Nilpotency is checked power by power against
/// kNilpotentTol * ||A||_inf, with an exact-zero short circuit.
inline ExpPlan classify_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("classify_matrix: matrix must be square");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("classify_matrix: matrix has non-finite entries");
  }
  const Eigen::Index n = a.rows();
  const double scale = inf_norm(a);

  ExpPlan plan;
  if (scale == 0.0) {
    plan.kind = ExpPlan::Kind::Nilpotent;
    plan.nilpotency_index = 1;
    return plan;
  }

  Matrix power = a;
  for (int k = 1; k <= n; ++k) {
    const double norm_k = inf_norm(power);
    if (norm_k == 0.0 || norm_k < kNilpotentTol * scale) {
      plan.kind = ExpPlan::Kind::Nilpotent;
      plan.nilpotency_index = k;
      return plan;
    }
    power = power * a;
  }

  Eigen::EigenSolver<Matrix> solver(a);
  if (solver.info() == Eigen::Success) {
    const ComplexMatrix t = solver.eigenvectors();
    Eigen::JacobiSVD<ComplexMatrix> svd(t);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin > 0.0 && smax / smin < kConditionLimit) {
      plan.kind = ExpPlan::Kind::Diagonalizable;
      plan.eigenvalues = solver.eigenvalues();
      plan.transform = t;
      plan.transform_inverse = t.partialPivLu().solve(
          ComplexMatrix::Identity(n, n));
      return plan;
    }
  }

  plan.kind = ExpPlan::Kind::General;
  return plan;
}

/// Scaling-and-squaring with the [13/13] Pade approximant (Higham 2005).
inline Matrix pade_exponential(const Matrix& a) {
  static const double b[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  static const double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm = one_norm(a);
  int squarings = 0;
  Matrix as = a;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    as /= std::pow(2.0, squarings);
  }

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;

  Matrix f = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) f = f * f;
  return f;
}

/// e^{At} along the route picked by `plan`.
inline Matrix matrix_exponential(const Matrix& a, double t, const ExpPlan& plan) {
  const Eigen::Index n = a.rows();
  switch (plan.kind) {
    case ExpPlan::Kind::Nilpotent: {
      Matrix sum = Matrix::Identity(n, n);
      Matrix term = Matrix::Identity(n, n);
      for (int p = 1; p < plan.nilpotency_index; ++p) {
        term = term * a * (t / p);
        sum += term;
      }
      return sum;
    }
    case ExpPlan::Kind::Diagonalizable: {
      ComplexVector exp_diag(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        exp_diag(i) = std::exp(plan.eigenvalues(i) * t);
      }
      const ComplexMatrix result = plan.transform * exp_diag.asDiagonal() *
                                   plan.transform_inverse;
      const double residue = result.imag().cwiseAbs().maxCoeff();
      const double magnitude = result.real().cwiseAbs().maxCoeff();
      if (residue > kImagResidueTol * (1.0 + magnitude)) {
        throw std::runtime_error(
            "matrix_exponential: imaginary residue exceeds tolerance");
      }
      return result.real();
    }
    case ExpPlan::Kind::General:
      return pade_exponential(a * t);
  }
  throw std::logic_error("matrix_exponential: unknown plan kind");
}

inline Matrix matrix_exponential(const Matrix& a, double t) {
  return matrix_exponential(a, t, classify_matrix(a));
}

}  // namespace ssm
