#include "cbi/moments.hpp"

#include <algorithm>
#include <cmath>

#include "cbi/error.hpp"

namespace cbi {

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
    case Criticality::not_irreducible: return "not-irreducible";
  }
  return "unknown";
}

Matrix effective_drift(const CbiParams& p) {
  Matrix bt = p.B;
  for (int j = 0; j < p.d; ++j)
    for (int i = 0; i < p.d; ++i)
      bt(i, j) += p.mu[j].integrate([&](const Vector& z) {
        return std::max(0.0, z(i) - (i == j ? 1.0 : 0.0));
      });
  return bt;
}

Vector effective_immigration(const CbiParams& p) {
  Vector bt = p.beta;
  for (const auto& a : p.nu.atoms()) bt += a.weight * a.point;
  return bt;
}

std::vector<Matrix> branching_covariances(const CbiParams& p) {
  std::vector<Matrix> cs;
  for (int k = 0; k < p.d; ++k) {
    Matrix ck = Matrix::Zero(p.d, p.d);
    ck(k, k) = 2.0 * p.c(k);
    for (const auto& a : p.mu[k].atoms()) ck += a.weight * a.point * a.point.transpose();
    cs.push_back(std::move(ck));
  }
  return cs;
}

DerivedQuantities derive(const CbiParams& p, double tol) {
  require_admissible(p);
  DerivedQuantities dq;
  dq.btilde = effective_drift(p);
  dq.beta_tilde = effective_immigration(p);
  dq.big_c = branching_covariances(p);
  dq.spectrum = spectral(dq.btilde);
  if (!is_irreducible(dq.btilde)) {
    dq.classification = Criticality::not_irreducible;
  } else {
    const double s = dq.spectrum.spectral_abscissa;
    dq.classification = std::abs(s) <= tol ? Criticality::critical
                        : s < 0.0          ? Criticality::subcritical
                                           : Criticality::supercritical;
  }
  if (dq.classification == Criticality::critical) {
    dq.perron = perron_pair(dq.btilde, tol);
    Matrix cbar = Matrix::Zero(p.d, p.d);
    for (int k = 0; k < p.d; ++k) cbar += dq.perron->u_right(k) * dq.big_c[k];
    dq.cbar = cbar;
  }
  return dq;
}

Vector mean(const CbiParams& p, const Vector& x, double t, const QuadratureSpec& quad) {
  require_admissible(p);
  if (x.size() != p.d) throw Error(Errc::dimension_mismatch, "mean: x must have length d");
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "mean: t must be >= 0");
  const Matrix bt = effective_drift(p);
  return mat_exp(bt, t) * x + exp_integral(bt, effective_immigration(p), t, quad);
}

Matrix variance_no_immigration(const CbiParams& p, const Vector& z, double t, const QuadratureSpec& quad) {
  require_admissible(p);
  if (!p.nu.empty() || (p.beta.array() != 0.0).any())
    throw Error(Errc::invalid_argument,
                "variance_no_immigration: parameters carry immigration (nonzero beta or nu)");
  if (z.size() != p.d) throw Error(Errc::dimension_mismatch, "variance_no_immigration: z must have length d");
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "variance_no_immigration: t must be >= 0");
  gauss_legendre(quad.order);
  if (t == 0.0) return Matrix::Zero(p.d, p.d);
  const Matrix bt = effective_drift(p);
  const auto cs = branching_covariances(p);
  return integrate(
      [&](double u) -> Matrix {
        const Vector w = mat_exp(bt, t - u) * z;
        const Matrix e = mat_exp(bt, u);
        Matrix inner = Matrix::Zero(p.d, p.d);
        for (int l = 0; l < p.d; ++l) inner += w(l) * cs[l];
        return e * inner * e.transpose();
      },
      0.0, t, quad);
}

CbiParams without_immigration(const CbiParams& p) {
  CbiParams q = p;
  q.beta = Vector::Zero(p.beta.size());
  q.nu = JumpMeasure{};
  return q;
}

}  // namespace cbi
