#pragma once

// Dense small-dimension matrix utilities.

#include <complex>
#include <vector>

#include "cbi/quadrature.hpp"
#include "cbi/types.hpp"

namespace cbi {

struct SpectralSummary {
  std::vector<std::complex<double>> eigenvalues;
  double spectral_radius = 0.0;    // max |lambda|
  double spectral_abscissa = 0.0;  // max Re(lambda)
};

/// Strictly positive eigenvectors of e^{Btilde} at eigenvalue 1, normalized by
/// sum(u_right) = 1 and <u_left, u_right> = 1.
struct PerronPair {
  Vector u_right;
  Vector u_left;
};

/// |s(A)| at or below this counts as critical.
inline constexpr double kDefaultCriticalityTol = 1e-9;

/// e^{tA} by scaling and squaring with a [13/13] Pade approximant.
/// Throws Errc::numeric_range when the result overflows.
Matrix mat_exp(const Matrix& a, double t = 1.0);

SpectralSummary spectral(const Matrix& a);

/// Strong connectivity of the off-diagonal positivity graph; 1x1 is always
/// irreducible.
bool is_irreducible(const Matrix& a);

/// Requires irreducible `btilde` with |s(btilde)| <= tol. Vectors come from
/// the right and left kernels of btilde, which are the eigenvalue-1
/// eigenspaces of e^{btilde}.
PerronPair perron_pair(const Matrix& btilde, double tol = kDefaultCriticalityTol);

/// int_0^t e^{sA} M e^{sA^T} ds by Gauss-Legendre on [0, t].
Matrix exp_integral(const Matrix& a, const Matrix& m, double t, const QuadratureSpec& quad = {});

/// int_0^t e^{sA} w ds by Gauss-Legendre on [0, t].
Vector exp_integral(const Matrix& a, const Vector& w, double t, const QuadratureSpec& quad = {});

}  // namespace cbi
