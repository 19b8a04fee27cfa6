#pragma once

// Effective drift Btilde, effective immigration beta~, the branching
// covariance matrices C_k, and the closed-form first and second moments.

#include <optional>
#include <string>
#include <vector>

#include "cbi/matops.hpp"
#include "cbi/model.hpp"

namespace cbi {

enum class Criticality { subcritical, critical, supercritical, not_irreducible };

std::string to_string(Criticality c);

struct DerivedQuantities {
  Matrix btilde;
  Vector beta_tilde;
  std::vector<Matrix> big_c;       // C_1 .. C_d
  SpectralSummary spectrum;        // of btilde
  Criticality classification = Criticality::not_irreducible;
  std::optional<PerronPair> perron;  // critical only
  std::optional<Matrix> cbar;        // critical only
};

/// btilde(i,j) = B(i,j) + int (z_i - delta_ij)^+ mu_j(dz)
Matrix effective_drift(const CbiParams& params);
/// beta + int z nu(dz)
Vector effective_immigration(const CbiParams& params);
/// 2 c_k e_k e_k^T + int z z^T mu_k(dz)
std::vector<Matrix> branching_covariances(const CbiParams& params);

DerivedQuantities derive(const CbiParams& params, double critical_tol = kDefaultCriticalityTol);

/// E(X_t | X_0 = x) = e^{t Btilde} x + int_0^t e^{u Btilde} beta~ du.
Vector mean(const CbiParams& params, const Vector& x, double t, const QuadratureSpec& quad = {});

/// Conditional covariance of the pure branching process (beta = 0, nu = 0):
///   sum_l int_0^t (e_l^T e^{(t-u)Btilde} z) e^{u Btilde} C_l e^{u Btilde^T} du.
/// Rejects parameters carrying immigration.
Matrix variance_no_immigration(const CbiParams& params, const Vector& z, double t,
                               const QuadratureSpec& quad = {});

/// Copy of `params` with beta = 0 and nu = 0 (the branching part alone).
CbiParams without_immigration(const CbiParams& params);

}  // namespace cbi
