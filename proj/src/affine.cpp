#include "cbi/affine.hpp"

#include <algorithm>
#include <cmath>

#include "cbi/error.hpp"
#include "cbi/matops.hpp"
#include "cbi/moments.hpp"

namespace cbi {

namespace {

void require_lambda(const CbiParams& p, const Vector& lambda, const char* what) {
  if (lambda.size() != p.d)
    throw Error(Errc::dimension_mismatch, std::string(what) + ": lambda must have length d = " + std::to_string(p.d));
  if (!lambda.allFinite() || (lambda.array() < 0.0).any())
    throw Error(Errc::invalid_argument, std::string(what) + ": lambda must be finite and componentwise >= 0");
}

// phi without admissibility or argument checks; called from the ODE right-hand side.
void phi_into(const CbiParams& p, const Vector& lam, Vector& out) {
  out.noalias() = -p.B.transpose() * lam;
  for (int i = 0; i < p.d; ++i) {
    double acc = p.c(i) * lam(i) * lam(i);
    for (const auto& a : p.mu[i].atoms())
      acc += a.weight * (std::expm1(-lam.dot(a.point)) + lam(i) * std::min(1.0, a.point(i)));
    out(i) += acc;
  }
}

double psi_raw(const CbiParams& p, const Vector& lam) {
  double acc = p.beta.dot(lam);
  for (const auto& a : p.nu.atoms()) acc -= a.weight * std::expm1(-lam.dot(a.point));
  return acc;
}

}  // namespace

Vector phi(const CbiParams& p, const Vector& lambda) {
  require_admissible(p);
  require_lambda(p, lambda, "phi");
  Vector out(p.d);
  phi_into(p, lambda, out);
  return out;
}

double psi(const CbiParams& p, const Vector& lambda) {
  require_admissible(p);
  require_lambda(p, lambda, "psi");
  return psi_raw(p, lambda);
}

double psi_compensated(const CbiParams& p, const Vector& lambda) {
  require_admissible(p);
  require_lambda(p, lambda, "psi_compensated");
  double acc = effective_immigration(p).dot(lambda);
  for (const auto& a : p.nu.atoms()) {
    const double s = lambda.dot(a.point);
    acc -= a.weight * (std::expm1(-s) + s);
  }
  return acc;
}

Vector psi_grad(const CbiParams& p, const Vector& lambda) {
  require_admissible(p);
  require_lambda(p, lambda, "psi_grad");
  Vector g = effective_immigration(p);
  for (const auto& a : p.nu.atoms()) g += a.weight * std::expm1(-lambda.dot(a.point)) * a.point;
  return g;
}

VSolution solve_v(const CbiParams& p, double t, const Vector& lambda, const VSolveOptions& opts) {
  require_admissible(p);
  require_lambda(p, lambda, "solve_v");
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::invalid_argument, "solve_v: t must be finite and >= 0");

  OdeOptions ode = opts.ode;
  const double scale = lambda.size() ? lambda.lpNorm<Eigen::Infinity>() : 0.0;
  if (scale > 0.0) {
    ode.atol *= scale;
    ode.max_clip *= scale;
  }
  ode.nonnegative = true;

  auto rhs = [&p](double, const Vector& v, Vector& dv) {
    phi_into(p, v, dv);
    dv = -dv;
  };
  DenseSolution dense = dopri5(rhs, lambda, 0.0, t, ode);
  if (!dense.final_state().allFinite()) throw Error(Errc::solver_failure, "solve_v: non-finite solution");

  double psi_int = 0.0;
  if (t > 0.0) psi_int = integrate([&](double s) { return psi_raw(p, dense(s)); }, 0.0, t, opts.quad);
  return VSolution(lambda, t, std::move(dense), psi_int);
}

double laplace_exponent(const CbiParams& p, double t, const Vector& x, const Vector& lambda,
                        const VSolveOptions& opts) {
  if (x.size() != p.d) throw Error(Errc::dimension_mismatch, "laplace_transform: x must have length d");
  if (!x.allFinite() || (x.array() < 0.0).any())
    throw Error(Errc::invalid_argument, "laplace_transform: x must be componentwise >= 0");
  const auto sol = solve_v(p, t, lambda, opts);
  return x.dot(sol.final_value()) + sol.psi_integral();
}

double laplace_transform(const CbiParams& p, double t, const Vector& x, const Vector& lambda,
                         const VSolveOptions& opts) {
  return std::exp(-laplace_exponent(p, t, x, lambda, opts));
}

Matrix v_jacobian_limit(const CbiParams& p, double t) {
  require_admissible(p);
  return mat_exp(effective_drift(p), t);
}

double v_hessian_limit(const CbiParams& p, double t, int i, int j, int k, const QuadratureSpec& quad) {
  require_admissible(p);
  if (i < 0 || j < 0 || k < 0 || i >= p.d || j >= p.d || k >= p.d)
    throw Error(Errc::invalid_argument, "v_hessian_limit: index out of range");
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "v_hessian_limit: t must be >= 0");
  gauss_legendre(quad.order);
  if (t == 0.0) return 0.0;
  const Matrix bt = effective_drift(p);
  const Matrix btT = bt.transpose();
  const auto cs = branching_covariances(p);
  const Matrix outer = mat_exp(btT, t);
  // -e_k^T e^{t Bt^T} int_0^t e^{-u Bt^T} sum_l e_l e_i^T e^{u Bt} C_l e^{u Bt^T} e_j du
  const double integral = integrate(
      [&](double u) {
        const Vector left = (outer * mat_exp(btT, -u)).row(k).transpose();  // e_k^T e^{tBt^T} e^{-uBt^T}
        const Matrix e = mat_exp(bt, u);
        double acc = 0.0;
        for (int l = 0; l < p.d; ++l) acc += left(l) * (e * cs[l] * e.transpose())(i, j);
        return acc;
      },
      0.0, t, quad);
  return -integral;
}

namespace {

Vector v_at(const CbiParams& p, double t, const Vector& lambda, const VSolveOptions& o) {
  return solve_v(p, t, lambda, o).final_value();
}

Matrix central_jacobian(const CbiParams& p, double t, const Vector& lam, double h, const VSolveOptions& o) {
  Matrix jac(p.d, p.d);
  for (int i = 0; i < p.d; ++i) {
    Vector up = lam, dn = lam;
    up(i) += h;
    dn(i) -= h;
    jac.row(i) = ((v_at(p, t, up, o) - v_at(p, t, dn, o)) / (2.0 * h)).transpose();
  }
  return jac;
}

double central_second(const CbiParams& p, double t, const Vector& lam, double h, int i, int j, int k,
                      const VSolveOptions& o) {
  if (i == j) {
    Vector up = lam, dn = lam;
    up(i) += h;
    dn(i) -= h;
    return (v_at(p, t, up, o)(k) - 2.0 * v_at(p, t, lam, o)(k) + v_at(p, t, dn, o)(k)) / (h * h);
  }
  auto shifted = [&](double si, double sj) {
    Vector l = lam;
    l(i) += si * h;
    l(j) += sj * h;
    return v_at(p, t, l, o)(k);
  };
  return (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h * h);
}

void check_probe(const ProbeOptions& o) {
  if (!(o.eps > 0.0) || !(o.step_ratio > 0.0) || o.step_ratio >= 0.5)
    throw Error(Errc::invalid_argument, "probe: need eps > 0 and 0 < step_ratio < 0.5");
}

}  // namespace

JacobianProbe probe_v_jacobian(const CbiParams& p, double t, const ProbeOptions& o) {
  check_probe(o);
  JacobianProbe r;
  r.limit = v_jacobian_limit(p, t);
  const Vector ones = Vector::Ones(p.d);
  const double e = o.eps;
  r.at_eps = central_jacobian(p, t, e * ones, o.step_ratio * e, o.solve);
  const Matrix half = central_jacobian(p, t, 0.5 * e * ones, o.step_ratio * 0.5 * e, o.solve);
  r.extrapolated = 2.0 * half - r.at_eps;
  r.deviation_at_eps = (r.at_eps - r.limit).cwiseAbs().maxCoeff();
  r.deviation_extrapolated = (r.extrapolated - r.limit).cwiseAbs().maxCoeff();
  return r;
}

HessianProbe probe_v_hessian(const CbiParams& p, double t, int i, int j, int k, const ProbeOptions& o) {
  check_probe(o);
  HessianProbe r;
  r.limit = v_hessian_limit(p, t, i, j, k);
  const Vector ones = Vector::Ones(p.d);
  const double e = o.eps;
  r.at_eps = central_second(p, t, e * ones, o.step_ratio * e, i, j, k, o.solve);
  const double half = central_second(p, t, 0.5 * e * ones, o.step_ratio * 0.5 * e, i, j, k, o.solve);
  r.extrapolated = 2.0 * half - r.at_eps;
  r.deviation_at_eps = std::abs(r.at_eps - r.limit);
  r.deviation_extrapolated = std::abs(r.extrapolated - r.limit);
  return r;
}

}  // namespace cbi
