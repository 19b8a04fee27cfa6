#pragma once

// Branching mechanism phi, immigration mechanism psi, the Riccati system
// dv/dt = -phi(v), v(0) = lambda, and the transition Laplace transform
//   E[exp(-<lambda, X_t>) | X_0 = x] = exp(-<x, v(t, lambda)> - int_0^t psi(v(s, lambda)) ds).

#include "cbi/model.hpp"
#include "cbi/ode.hpp"
#include "cbi/quadrature.hpp"

namespace cbi {

Vector phi(const CbiParams& params, const Vector& lambda);

/// <beta, lambda> - int (e^{-<lambda,z>} - 1) nu(dz)
double psi(const CbiParams& params, const Vector& lambda);

/// Compensated form <beta~, lambda> - int (e^{-<lambda,z>} - 1 + <lambda,z>) nu(dz).
/// Agrees with `psi` for atomic nu.
double psi_compensated(const CbiParams& params, const Vector& lambda);

/// Analytic gradient beta~_i + int z_i (e^{-<lambda,z>} - 1) nu(dz); equals
/// beta~ at lambda = 0, which is the limit from the interior.
Vector psi_grad(const CbiParams& params, const Vector& lambda);

struct VSolveOptions {
  /// atol is relative to max(|lambda|_inf, 1e-300): v(t, lambda) scales with
  /// lambda, so a fixed absolute floor would swamp small initial data.
  OdeOptions ode{.rtol = 1e-10, .atol = 1e-12, .max_steps = 2'000'000, .nonnegative = true, .max_clip = 1e-8};
  QuadratureSpec quad{};
};

class VSolution {
 public:
  VSolution(Vector lambda, double t_max, DenseSolution dense, double psi_integral)
      : lambda_(std::move(lambda)), t_max_(t_max), dense_(std::move(dense)), psi_integral_(psi_integral) {}

  const Vector& lambda() const noexcept { return lambda_; }
  double t_max() const noexcept { return t_max_; }
  /// v(s, lambda) for s in [0, t_max]
  Vector operator()(double s) const { return dense_(s); }
  Vector final_value() const { return dense_.final_state(); }
  /// int_0^{t_max} psi(v(s, lambda)) ds
  double psi_integral() const noexcept { return psi_integral_; }
  const OdeStats& solver_stats() const noexcept { return dense_.stats(); }

 private:
  Vector lambda_;
  double t_max_;
  DenseSolution dense_;
  double psi_integral_;
};

VSolution solve_v(const CbiParams& params, double t, const Vector& lambda, const VSolveOptions& opts = {});

/// <x, v(t, lambda)> + int_0^t psi(v(s, lambda)) ds, i.e. -log of the Laplace transform.
double laplace_exponent(const CbiParams& params, double t, const Vector& x, const Vector& lambda,
                        const VSolveOptions& opts = {});

double laplace_transform(const CbiParams& params, double t, const Vector& x, const Vector& lambda,
                         const VSolveOptions& opts = {});

/// lim_{lambda -> 0} d v_k / d lambda_i = (e^{t Btilde})(i, k); returned as the
/// full matrix indexed (i, k).
Matrix v_jacobian_limit(const CbiParams& params, double t);

/// lim_{lambda -> 0} d^2 v_k / d lambda_i d lambda_j (0-based indices).
double v_hessian_limit(const CbiParams& params, double t, int i, int j, int k, const QuadratureSpec& quad = {});

/// Finite-difference probe of a lambda -> 0 limit. `at_eps` is the central
/// difference at lambda = eps * direction; `extrapolated` removes the linear
/// term in eps using eps and eps/2 (Richardson).
struct JacobianProbe {
  Matrix limit;
  Matrix at_eps;
  Matrix extrapolated;
  double deviation_at_eps = 0.0;       // max |at_eps - limit|
  double deviation_extrapolated = 0.0; // max |extrapolated - limit|
};

struct HessianProbe {
  double limit = 0.0;
  double at_eps = 0.0;
  double extrapolated = 0.0;
  double deviation_at_eps = 0.0;
  double deviation_extrapolated = 0.0;
};

struct ProbeOptions {
  double eps = 1e-4;
  double step_ratio = 1e-2;  // difference step h = step_ratio * eps
  VSolveOptions solve{.ode = {.rtol = 1e-13, .atol = 1e-15, .max_steps = 2'000'000, .nonnegative = true, .max_clip = 1e-8}};
};

JacobianProbe probe_v_jacobian(const CbiParams& params, double t, const ProbeOptions& opts = {});
HessianProbe probe_v_hessian(const CbiParams& params, double t, int i, int j, int k, const ProbeOptions& opts = {});

}  // namespace cbi
