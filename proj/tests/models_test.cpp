#include "ssm/models.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ssm {
namespace {

// Central finite-difference oracle for df/dx and df/du.
void finite_difference_jacobians(ModelKind kind, const Vector& x, const Vector& u,
                                 const ModelParams& params, Matrix& a, Matrix& b,
                                 double step = 1e-6) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(u.size());
  a = Matrix::Zero(n, n);
  b = Matrix::Zero(n, m);
  for (int j = 0; j < n; ++j) {
    Vector xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    a.col(j) = (model_rhs(kind, xp, u, params) - model_rhs(kind, xm, u, params)) /
               (2.0 * step);
  }
  for (int j = 0; j < m; ++j) {
    Vector up = u, um = u;
    up(j) += step;
    um(j) -= step;
    b.col(j) = (model_rhs(kind, x, up, params) - model_rhs(kind, x, um, params)) /
               (2.0 * step);
  }
}

// Relative error with a 1e-9 absolute floor: differences below the floor
// are finite-difference noise on near-zero entries and do not count.
double max_relative_error(const Matrix& got, const Matrix& want) {
  double worst = 0.0;
  for (int i = 0; i < got.rows(); ++i) {
    for (int j = 0; j < got.cols(); ++j) {
      const double diff = std::abs(got(i, j) - want(i, j));
      if (diff <= 1e-9) continue;
      worst = std::max(worst, diff / std::max(std::abs(want(i, j)), 1e-9));
    }
  }
  return worst;
}

TEST(Rhs, ConstantVelocityExamples) {
  EXPECT_EQ(rhs_constant_velocity((Vector(1) << 0).finished(),
                                  (Vector(1) << 5).finished())(0),
            5.0);
  EXPECT_EQ(rhs_constant_velocity((Vector(1) << 100).finished(),
                                  (Vector(1) << 0).finished())(0),
            0.0);
  EXPECT_EQ(rhs_constant_velocity((Vector(1) << -3).finished(),
                                  (Vector(1) << 2.5).finished())(0),
            2.5);
}

TEST(Rhs, DoubleIntegratorExamples) {
  const Vector d1 = rhs_double_integrator((Vector(2) << 0, 20).finished(),
                                          (Vector(1) << -5).finished());
  EXPECT_EQ(d1(0), 20.0);
  EXPECT_EQ(d1(1), -5.0);
  const Vector d2 = rhs_double_integrator((Vector(2) << 1, 0).finished(),
                                          (Vector(1) << 0).finished());
  EXPECT_EQ(d2(0), 0.0);
  EXPECT_EQ(d2(1), 0.0);
  const Vector d3 = rhs_double_integrator((Vector(2) << 0, 9).finished(),
                                          (Vector(1) << 2).finished());
  EXPECT_EQ(d3(0), 9.0);
  EXPECT_EQ(d3(1), 2.0);
}

TEST(Rhs, BicycleExamples) {
  const Vector straight = rhs_bicycle2d((Vector(4) << 0, 0, 0, 10).finished(),
                                        (Vector(2) << 0, 0).finished(), 2.0);
  EXPECT_NEAR(straight(0), 10.0, 1e-15);
  EXPECT_NEAR(straight(1), 0.0, 1e-15);
  EXPECT_NEAR(straight(2), 0.0, 1e-15);
  EXPECT_NEAR(straight(3), 0.0, 1e-15);

  const Vector north = rhs_bicycle2d((Vector(4) << 0, 0, M_PI / 2, 10).finished(),
                                     (Vector(2) << 0, -1).finished(), 2.0);
  EXPECT_NEAR(north(0), 0.0, 1e-14);
  EXPECT_NEAR(north(1), 10.0, 1e-14);
  EXPECT_NEAR(north(2), 0.0, 1e-15);
  EXPECT_NEAR(north(3), -1.0, 1e-15);

  const Vector turning = rhs_bicycle2d((Vector(4) << 0, 0, 0, 10).finished(),
                                       (Vector(2) << 0.1, 0).finished(), 2.5);
  EXPECT_NEAR(turning(2), 10.0 * std::tan(0.1) / 2.5, 1e-15);
}

TEST(Rhs, BicycleRejectsFoldedSteering) {
  EXPECT_THROW(rhs_bicycle2d((Vector(4) << 0, 0, 0, 1).finished(),
                             (Vector(2) << M_PI / 2, 0).finished(), 2.0),
               std::domain_error);
}

TEST(Rhs, LongitudinalExamples) {
  LongitudinalParams p;  // defaults match the curve-experiment parameters
  // at rest with no torque only rolling resistance acts
  const Vector at_rest = rhs_longitudinal((Vector(1) << 0).finished(),
                                          (Vector(2) << 0, 0).finished(), p);
  EXPECT_NEAR(at_rest(0), -p.f_roll * p.g, 1e-15);

  // direct formula evaluation at v = 9, T = 2000, alpha = 0
  const Vector hot = rhs_longitudinal((Vector(1) << 9).finished(),
                                      (Vector(2) << 2000, 0).finished(), p);
  const double expected = 2000.0 / (1500.0 * 0.25) -
                          0.5 * 1.2 * 0.25 * 2.0 * 81.0 / 1500.0 -
                          0.015 * 9.81;
  EXPECT_NEAR(hot(0), expected, 1e-12);

  // equilibrium torque balances drag and rolling resistance
  const double v = 7.0;
  const double torque_eq =
      p.r_whl * (0.5 * p.rho * p.c_d * p.s_front * v * v + p.f_roll * p.mass * p.g);
  const Vector balanced = rhs_longitudinal((Vector(1) << v).finished(),
                                           (Vector(2) << torque_eq, 0).finished(), p);
  EXPECT_NEAR(balanced(0), 0.0, 1e-14);
}

TEST(Rhs, LateralPathExamples) {
  // curvature-matched steering keeps the heading error frozen
  const double kappa = 0.02;
  const double wheelbase = 2.5;
  const double delta = std::atan(wheelbase * kappa);
  const Vector matched =
      rhs_lateral_path((Vector(3) << 0, 0, 0).finished(),
                       (Vector(3) << delta, 8.0, kappa).finished(), wheelbase);
  EXPECT_NEAR(matched(2), 0.0, 1e-14);

  // straight road
  const Vector straight =
      rhs_lateral_path((Vector(3) << 5, 0, 0).finished(),
                       (Vector(3) << 0.03, 7.0, 0.0).finished(), 2.0);
  EXPECT_NEAR(straight(0), 7.0, 1e-15);
  EXPECT_NEAR(straight(1), 0.0, 1e-15);
  EXPECT_NEAR(straight(2), 7.0 * std::tan(0.03) / 2.0, 1e-15);

  EXPECT_THROW(rhs_lateral_path((Vector(3) << 0, 50, 0).finished(),
                                (Vector(3) << 0, 5, 0.02).finished(), 2.0),
               std::domain_error);
}

TEST(Linearize, BicycleMatchesHandJacobianAtZeroHeading) {
  const Vector x0 = (Vector(4) << 0, 0, 0, 10).finished();
  const Vector u0 = (Vector(2) << 0, 0).finished();
  ModelParams params;
  params.wheelbase = 2.0;
  const LtiSystem sys = linearize(ModelKind::Bicycle2D, x0, u0, params);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 3) = 1.0;
  expected(1, 2) = 10.0;
  EXPECT_LT((sys.a - expected).norm(), 1e-14);
}

TEST(Linearize, LongitudinalDragSlope) {
  LongitudinalParams p;
  ModelParams params;
  params.longitudinal = p;
  const LtiSystem sys =
      linearize(ModelKind::Longitudinal3D, (Vector(1) << 9).finished(),
                (Vector(2) << 2000, 0).finished(), params);
  EXPECT_NEAR(sys.a(0, 0), -p.rho * p.c_d * p.s_front * 9.0 / p.mass, 1e-15);
}

// Analytic Jacobians against central finite differences on random valid
// operating points, for every analytic model family.
TEST(Linearize, JacobiansMatchFiniteDifferences) {
  std::mt19937 rng(20240507);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ModelParams params;
  params.wheelbase = 2.4;

  const std::vector<ModelKind> kinds = {
      ModelKind::ConstantVelocity1D, ModelKind::DoubleIntegrator1D,
      ModelKind::Bicycle2D, ModelKind::Longitudinal3D, ModelKind::LateralPath};
  for (ModelKind kind : kinds) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(state_dimension(kind)), u(control_dimension(kind));
      for (int i = 0; i < x.size(); ++i) x(i) = 10.0 * unit(rng);
      for (int i = 0; i < u.size(); ++i) u(i) = unit(rng);
      switch (kind) {
        case ModelKind::Bicycle2D:
          u(0) = 0.4 * unit(rng);           // steering
          x(3) = 5.0 + 5.0 * unit(rng);     // speed
          break;
        case ModelKind::Longitudinal3D:
          x(0) = 6.0 + 5.0 * unit(rng);     // forward speed
          u(0) = 300.0 * (1.0 + unit(rng)); // torque
          u(1) = 0.05 * unit(rng);          // grade
          break;
        case ModelKind::LateralPath:
          x(1) = 2.0 * unit(rng);           // lateral offset
          x(2) = 0.4 * unit(rng);           // heading error
          u(0) = 0.4 * unit(rng);           // steering
          u(1) = 5.0 + 4.0 * unit(rng);     // speed channel
          u(2) = 0.05 * unit(rng);          // curvature channel
          break;
        default:
          break;
      }
      const LtiSystem sys = linearize(kind, x, u, params);
      Matrix a_fd, b_fd;
      finite_difference_jacobians(kind, x, u, params, a_fd, b_fd);
      EXPECT_LT(max_relative_error(sys.a, a_fd), 1e-6)
          << model_name(kind) << " trial " << trial;
      EXPECT_LT(max_relative_error(sys.b, b_fd), 1e-6)
          << model_name(kind) << " trial " << trial;
    }
  }
}

// The 1D families are linear: the linearization reproduces the rhs with
// zero remainder everywhere, not just at the operating point.
TEST(Linearize, InherentlyLinearModelsAreExact) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(-10.0, 10.0);
  ModelParams params;
  for (ModelKind kind :
       {ModelKind::ConstantVelocity1D, ModelKind::DoubleIntegrator1D}) {
    Vector x0(state_dimension(kind)), u0(control_dimension(kind));
    for (int i = 0; i < x0.size(); ++i) x0(i) = unit(rng);
    for (int i = 0; i < u0.size(); ++i) u0(i) = unit(rng);
    const LtiSystem sys = linearize(kind, x0, u0, params);
    for (int trial = 0; trial < 50; ++trial) {
      Vector x(x0.size()), u(u0.size());
      for (int i = 0; i < x.size(); ++i) x(i) = unit(rng);
      for (int i = 0; i < u.size(); ++i) u(i) = unit(rng);
      const Vector linear = sys.a * x + sys.b * u + sys.c;
      const Vector exact = model_rhs(kind, x, u, params);
      EXPECT_LT((linear - exact).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

// f_l(x0, u0) = f(x0, u0): the linearization passes through the operating
// point (up to roundoff of the fold).
TEST(Linearize, PassesThroughOperatingPoint) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ModelParams params;
  params.wheelbase = 2.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x0 =
        (Vector(4) << 10 * unit(rng), 10 * unit(rng), unit(rng), 8 + 4 * unit(rng))
            .finished();
    const Vector u0 = (Vector(2) << 0.3 * unit(rng), 2 * unit(rng)).finished();
    const LtiSystem sys = linearize(ModelKind::Bicycle2D, x0, u0, params);
    const Vector back = sys.a * x0 + sys.b * u0 + sys.c;
    const Vector f0 = model_rhs(ModelKind::Bicycle2D, x0, u0, params);
    EXPECT_LT((back - f0).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// Frozen-control planar A is nilpotent with A^3 exactly zero.
TEST(Linearize, FrozenControlBicycleIsNilpotentDegreeThree) {
  ModelParams params;
  params.wheelbase = 2.5;
  const Vector x0 = (Vector(4) << 8, 2, M_PI / 4, 10).finished();
  const Vector u0 = (Vector(2) << 0.01, -0.1).finished();
  const LtiSystem sys =
      linearize(ModelKind::Bicycle2D, x0, u0, params, /*frozen_control=*/true);
  EXPECT_TRUE(sys.b.isZero(0.0));
  const Matrix a3 = sys.a * sys.a * sys.a;
  EXPECT_EQ(a3.cwiseAbs().maxCoeff(), 0.0);
  const ExpPlan plan = classify_matrix(sys.a);
  EXPECT_EQ(plan.kind, ExpPlan::Kind::Nilpotent);
  EXPECT_LE(plan.nilpotency_index, 3);
}

TEST(ComposedModels, MatchTheirParts) {
  ModelParams params;
  params.wheelbase = 2.0;
  const Vector x = (Vector(4) << 3, -1, 0.2, 7).finished();
  const Vector u = (Vector(3) << 0.05, 400, 0.03).finished();
  const Vector d = model_rhs(ModelKind::ComposedBicycle, x, u, params);
  EXPECT_NEAR(d(0), 7 * std::cos(0.2), 1e-15);
  EXPECT_NEAR(d(1), 7 * std::sin(0.2), 1e-15);
  EXPECT_NEAR(d(2), 7 * std::tan(0.05) / 2.0, 1e-15);
  EXPECT_NEAR(d(3),
              longitudinal_acceleration(7, 400, 0.03, params.longitudinal), 1e-15);

  const Vector xp = (Vector(4) << 10, 0.5, -0.1, 6).finished();
  const Vector up = (Vector(4) << 0.02, 300, 0.0, 0.01).finished();
  const Vector dp = model_rhs(ModelKind::ComposedPath, xp, up, params);
  const Vector lat = rhs_lateral_path(xp.head(3), (Vector(3) << 0.02, 6, 0.01).finished(), 2.0);
  EXPECT_NEAR(dp(0), lat(0), 1e-15);
  EXPECT_NEAR(dp(1), lat(1), 1e-15);
  EXPECT_NEAR(dp(2), lat(2), 1e-15);
}

}  // namespace
}  // namespace ssm
