#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssm/lti.hpp"

namespace ssm {

/// Movement-model catalog. The first five are the analytic catalog; the
/// Composed* families pair planar kinematics with the force-balance
/// longitudinal model for simulation scenarios.
enum class ModelKind {
  ConstantVelocity1D,   // state [p],           control [v]
  DoubleIntegrator1D,   // state [p, v],        control [a]
  Bicycle2D,            // state [x, y, th, v], control [delta, a]
  Longitudinal3D,       // state [v],           control [T_whl, alpha]
  LateralPath,          // state [s, e, th_e],  control [delta, v, kappa]
  ComposedBicycle,      // state [x, y, th, v], control [delta, T_whl, alpha]
  ComposedPath,         // state [s, e, th_e, v], control [delta, T_whl, alpha, kappa]
};

/// Force-balance constants of the longitudinal model.
struct LongitudinalParams {
  double mass = 1500.0;    // kg
  double rho = 1.2;        // kg/m^3
  double c_d = 0.25;       // drag coefficient
  double s_front = 2.0;    // m^2 frontal area
  double r_whl = 0.25;     // m wheel radius
  double f_roll = 0.015;   // rolling resistance coefficient
  double g = 9.81;         // m/s^2

  void validate() const {
    if (mass <= 0 || rho <= 0 || c_d <= 0 || s_front <= 0 || r_whl <= 0 ||
        f_roll <= 0 || g <= 0) {
      throw std::invalid_argument("LongitudinalParams: all values must be positive");
    }
  }
};

struct BoundingCircle {
  double offset = 0.0;  // m along the body axis from the C.G.
  double radius = 1.0;  // m
};

struct VehicleGeometry {
  double wheelbase = 2.0;                 // m
  std::vector<BoundingCircle> circles{{0.0, 1.0}};
  double body_length = 2.0;               // m, for 1D gap conventions
  std::optional<double> mass;             // kg, for DeltaV

  void validate() const {
    if (wheelbase <= 0.0) throw std::invalid_argument("wheelbase must be positive");
    if (circles.empty()) throw std::invalid_argument("at least one bounding circle");
    for (const auto& c : circles) {
      if (c.radius <= 0.0) throw std::invalid_argument("circle radius must be positive");
    }
    if (body_length <= 0.0) throw std::invalid_argument("body length must be positive");
    if (mass && *mass <= 0.0) throw std::invalid_argument("mass must be positive");
  }

  double max_radius() const {
    double r = 0.0;
    for (const auto& c : circles) r = std::max(r, c.radius);
    return r;
  }
};

/// Everything a model evaluation may need beyond state and control.
struct ModelParams {
  double wheelbase = 2.0;
  LongitudinalParams longitudinal;
};

inline int state_dimension(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConstantVelocity1D: return 1;
    case ModelKind::DoubleIntegrator1D: return 2;
    case ModelKind::Bicycle2D: return 4;
    case ModelKind::Longitudinal3D: return 1;
    case ModelKind::LateralPath: return 3;
    case ModelKind::ComposedBicycle: return 4;
    case ModelKind::ComposedPath: return 4;
  }
  throw std::logic_error("state_dimension: unknown model");
}

inline int control_dimension(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConstantVelocity1D: return 1;
    case ModelKind::DoubleIntegrator1D: return 1;
    case ModelKind::Bicycle2D: return 2;
    case ModelKind::Longitudinal3D: return 2;
    case ModelKind::LateralPath: return 3;
    case ModelKind::ComposedBicycle: return 3;
    case ModelKind::ComposedPath: return 4;
  }
  throw std::logic_error("control_dimension: unknown model");
}

inline std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConstantVelocity1D: return "constant_velocity";
    case ModelKind::DoubleIntegrator1D: return "double_integrator";
    case ModelKind::Bicycle2D: return "bicycle";
    case ModelKind::Longitudinal3D: return "longitudinal";
    case ModelKind::LateralPath: return "lateral_path";
    case ModelKind::ComposedBicycle: return "composed_bicycle";
    case ModelKind::ComposedPath: return "composed_path";
  }
  return "?";
}

inline std::vector<std::string> state_labels(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConstantVelocity1D: return {"p"};
    case ModelKind::DoubleIntegrator1D: return {"p", "v"};
    case ModelKind::Bicycle2D: return {"x", "y", "theta", "v"};
    case ModelKind::Longitudinal3D: return {"v"};
    case ModelKind::LateralPath: return {"s", "e_cg", "theta_e"};
    case ModelKind::ComposedBicycle: return {"x", "y", "theta", "v"};
    case ModelKind::ComposedPath: return {"s", "e_cg", "theta_e", "v"};
  }
  throw std::logic_error("state_labels: unknown model");
}

inline std::vector<std::string> control_labels(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConstantVelocity1D: return {"v"};
    case ModelKind::DoubleIntegrator1D: return {"a"};
    case ModelKind::Bicycle2D: return {"delta", "a"};
    case ModelKind::Longitudinal3D: return {"T_whl", "alpha"};
    case ModelKind::LateralPath: return {"delta", "v", "kappa"};
    case ModelKind::ComposedBicycle: return {"delta", "T_whl", "alpha"};
    case ModelKind::ComposedPath: return {"delta", "T_whl", "alpha", "kappa"};
  }
  throw std::logic_error("control_labels: unknown model");
}

namespace detail {
inline void check_steering(double delta) {
  if (!(std::abs(delta) < M_PI / 2.0)) {
    throw std::domain_error("steering angle must satisfy |delta| < pi/2");
  }
}
}  // namespace detail

inline Vector rhs_constant_velocity(const Vector& /*x*/, const Vector& u) {
  Vector d(1);
  d(0) = u(0);
  return d;
}

inline Vector rhs_double_integrator(const Vector& x, const Vector& u) {
  Vector d(2);
  d(0) = x(1);
  d(1) = u(0);
  return d;
}

inline Vector rhs_bicycle2d(const Vector& x, const Vector& u, double wheelbase) {
  detail::check_steering(u(0));
  const double theta = x(2);
  const double v = x(3);
  Vector d(4);
  d(0) = v * std::cos(theta);
  d(1) = v * std::sin(theta);
  d(2) = v * std::tan(u(0)) / wheelbase;
  d(3) = u(1);
  return d;
}

inline double longitudinal_acceleration(double v, double torque, double alpha,
                                        const LongitudinalParams& p) {
  return torque / (p.mass * p.r_whl) -
         0.5 * p.rho * p.c_d * p.s_front * v * v / p.mass -
         p.f_roll * std::cos(alpha) * p.g - p.g * std::sin(alpha);
}

inline Vector rhs_longitudinal(const Vector& x, const Vector& u,
                               const LongitudinalParams& p) {
  Vector d(1);
  d(0) = longitudinal_acceleration(x(0), u(0), u(1), p);
  return d;
}

inline Vector rhs_lateral_path(const Vector& x, const Vector& u, double wheelbase) {
  detail::check_steering(u(0));
  const double e = x(1);
  const double theta_e = x(2);
  const double v = u(1);
  const double kappa = u(2);
  const double denom = 1.0 - e * kappa;
  if (std::abs(denom) <= 1e-6) {
    throw std::domain_error("lateral path model: 1 - e_cg*kappa is singular");
  }
  Vector d(3);
  d(0) = v * std::cos(theta_e) / denom;
  d(1) = v * std::sin(theta_e);
  d(2) = v * (std::tan(u(0)) / wheelbase - kappa * std::cos(theta_e) / denom);
  return d;
}

/// Unified right-hand side f(x, u) for every catalog entry.
inline Vector model_rhs(ModelKind kind, const Vector& x, const Vector& u,
                        const ModelParams& params) {
  switch (kind) {
    case ModelKind::ConstantVelocity1D:
      return rhs_constant_velocity(x, u);
    case ModelKind::DoubleIntegrator1D:
      return rhs_double_integrator(x, u);
    case ModelKind::Bicycle2D:
      return rhs_bicycle2d(x, u, params.wheelbase);
    case ModelKind::Longitudinal3D:
      return rhs_longitudinal(x, u, params.longitudinal);
    case ModelKind::LateralPath:
      return rhs_lateral_path(x, u, params.wheelbase);
    case ModelKind::ComposedBicycle: {
      Vector bike_u(2);
      bike_u << u(0), longitudinal_acceleration(x(3), u(1), u(2), params.longitudinal);
      return rhs_bicycle2d(x, bike_u, params.wheelbase);
    }
    case ModelKind::ComposedPath: {
      Vector lat_x = x.head(3);
      Vector lat_u(3);
      lat_u << u(0), x(3), u(3);
      Vector d(4);
      d.head(3) = rhs_lateral_path(lat_x, lat_u, params.wheelbase);
      d(3) = longitudinal_acceleration(x(3), u(1), u(2), params.longitudinal);
      return d;
    }
  }
  throw std::logic_error("model_rhs: unknown model");
}

namespace detail {

inline void analytic_jacobians(ModelKind kind, const Vector& x, const Vector& u,
                               const ModelParams& params, Matrix& a, Matrix& b) {
  const int n = state_dimension(kind);
  const int m = control_dimension(kind);
  a = Matrix::Zero(n, n);
  b = Matrix::Zero(n, m);
  switch (kind) {
    case ModelKind::ConstantVelocity1D:
      b(0, 0) = 1.0;
      return;
    case ModelKind::DoubleIntegrator1D:
      a(0, 1) = 1.0;
      b(1, 0) = 1.0;
      return;
    case ModelKind::Bicycle2D: {
      check_steering(u(0));
      const double theta = x(2);
      const double v = x(3);
      const double cos_d = std::cos(u(0));
      a(0, 2) = -v * std::sin(theta);
      a(0, 3) = std::cos(theta);
      a(1, 2) = v * std::cos(theta);
      a(1, 3) = std::sin(theta);
      a(2, 3) = std::tan(u(0)) / params.wheelbase;
      b(2, 0) = v / (params.wheelbase * cos_d * cos_d);
      b(3, 1) = 1.0;
      return;
    }
    case ModelKind::Longitudinal3D: {
      const auto& p = params.longitudinal;
      const double v = x(0);
      const double alpha = u(1);
      a(0, 0) = -p.rho * p.c_d * p.s_front * v / p.mass;
      b(0, 0) = 1.0 / (p.mass * p.r_whl);
      b(0, 1) = p.f_roll * std::sin(alpha) * p.g - p.g * std::cos(alpha);
      return;
    }
    case ModelKind::LateralPath: {
      check_steering(u(0));
      const double e = x(1);
      const double theta_e = x(2);
      const double v = u(1);
      const double kappa = u(2);
      const double denom = 1.0 - e * kappa;
      if (std::abs(denom) <= 1e-6) {
        throw std::domain_error("lateral path model: 1 - e_cg*kappa is singular");
      }
      const double denom2 = denom * denom;
      const double cos_e = std::cos(theta_e);
      const double sin_e = std::sin(theta_e);
      const double cos_d = std::cos(u(0));
      a(0, 1) = v * cos_e * kappa / denom2;
      a(0, 2) = -v * sin_e / denom;
      a(1, 2) = v * cos_e;
      a(2, 1) = -v * cos_e * kappa * kappa / denom2;
      a(2, 2) = v * kappa * sin_e / denom;
      b(0, 1) = cos_e / denom;
      b(0, 2) = v * cos_e * e / denom2;
      b(1, 1) = sin_e;
      b(2, 0) = v / (params.wheelbase * cos_d * cos_d);
      b(2, 1) = std::tan(u(0)) / params.wheelbase - kappa * cos_e / denom;
      b(2, 2) = -v * cos_e / denom2;
      return;
    }
    case ModelKind::ComposedBicycle:
    case ModelKind::ComposedPath:
      throw std::invalid_argument(
          "linearize: composed simulation families have no single-matrix form");
  }
  throw std::logic_error("analytic_jacobians: unknown model");
}

}  // namespace detail

/// Taylor linearization at (x0, u0): A = df/dx, B = df/du,
/// C = f(x0,u0) - A x0 - B u0. With frozen_control the B u0 contribution is
/// folded into C and B reported as zero, matching the invariant-control
/// assumption under which the planar model's A is nilpotent.
inline LtiSystem linearize(ModelKind kind, const Vector& x0, const Vector& u0,
                           const ModelParams& params, bool frozen_control = false) {
  if (x0.size() != state_dimension(kind) || u0.size() != control_dimension(kind)) {
    throw std::invalid_argument("linearize: state/control dimension mismatch");
  }
  Matrix a, b;
  detail::analytic_jacobians(kind, x0, u0, params, a, b);
  const Vector f0 = model_rhs(kind, x0, u0, params);
  if (frozen_control) {
    const Vector c = f0 - a * x0;
    return LtiSystem(a, Matrix::Zero(a.rows(), b.cols()), c);
  }
  const Vector c = f0 - a * x0 - b * u0;
  return LtiSystem(a, b, c);
}

}  // namespace ssm
