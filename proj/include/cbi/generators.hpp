#pragma once

// Discrete infinitesimal generators of the scaled step process n^{-1} X_{floor(nt)}
// on exponential test functions, their corrected n -> infinity limit, the
// generator of X on C^2_c test functions, and the scaled generator of
// n^{-1} X_{nt} together with its compensated limit.

#include <cstdint>
#include <string>
#include <vector>

#include "cbi/affine.hpp"
#include "cbi/model.hpp"
#include "cbi/test_function.hpp"

namespace cbi {

/// Riccati solves for generator work need more digits than the defaults:
/// the quantities of interest are O(1/n) differences of O(1) exponents.
inline VSolveOptions generator_solve_options() {
  return VSolveOptions{.ode = {.rtol = 1e-13, .atol = 1e-15, .max_steps = 2'000'000, .nonnegative = true, .max_clip = 1e-8},
                       .quad = {}};
}

/// n [ E(e_lambda(X_1 / n) | X_0 = n x) - e_lambda(x) ], evaluated exactly through
/// the transition Laplace transform with v(1, lambda / n).
double discrete_gen_exp(const CbiParams& params, std::int64_t n, const Vector& x, const Vector& lambda,
                        const VSolveOptions& opts = generator_solve_options());

/// n (e^{-<lambda,x>} - e^{-<lambda, e^{Btilde} x>}): the term added to the
/// discrete generator to make it converge.
double prop31_correction(const CbiParams& params, std::int64_t n, const Vector& x, const Vector& lambda);

/// e_lambda(e^{Btilde} x) [ 1/2 sum_l int_0^1 (e_l^T e^{(1-s)Btilde} x) lambda^T e^{s Btilde} C_l e^{s Btilde^T} lambda ds
///                          - lambda^T int_0^1 e^{s Btilde} beta~ ds ]
double prop31_limit(const CbiParams& params, const Vector& x, const Vector& lambda, const QuadratureSpec& quad = {});

enum class Verdict { converges, diverges_linearly, indeterminate };
std::string to_string(Verdict v);

struct ConvergenceTable {
  std::vector<std::int64_t> n_values;
  std::vector<double> raw;
  std::vector<double> corrected;
  std::vector<double> gap;  // |corrected - limit_formula|
  double limit_formula = 0.0;
  Verdict verdict = Verdict::indeterminate;
  double fitted_slope = 0.0;    // a in raw(n)/n ~ a + b/n over the top half of n_values
  double expected_slope = 0.0;  // e^{-<lambda, e^{Btilde}x>} - e^{-<lambda,x>}
};

struct ConvergenceOptions {
  double converge_tol = 1e-3;     // final gap bound for "converges"
  double slope_threshold = 1e-6;  // |fitted slope| above this is a nonzero limit of raw(n)/n
  double drift_tol = 0.10;        // relative drift of raw(n)/n between the last two n
  double gap_floor = 1e-10;       // gaps below this count as converged noise
  VSolveOptions solve = generator_solve_options();
  QuadratureSpec quad{};
};

inline const std::vector<std::int64_t> kDefaultNList{10, 100, 1000, 10000};

ConvergenceTable prop31_corrected_sequence(const CbiParams& params, const Vector& x, const Vector& lambda,
                                           const std::vector<std::int64_t>& n_list = kDefaultNList,
                                           const ConvergenceOptions& opts = {});

/// Both algebraic forms of the generator of X applied to f at x: the standard
/// form (diffusion c_i x_i f''_ii, drift beta + Bx, jump compensator 1 ^ z_i)
/// and the second-order compensated form built from C_i and Btilde.
struct GeneratorForms {
  double standard = 0.0;
  double compensated = 0.0;
};
GeneratorForms generator_forms(const CbiParams& params, const TestFunction& f, const Vector& x);

/// Standard form; throws Errc::numeric_range if the two forms disagree by more
/// than 1e-10 relative to the largest term.
double generator_apply(const CbiParams& params, const TestFunction& f, const Vector& x);

/// Generator of n^{-1} X_{nt}: n (A f_n)(n x) with f_n(y) = f(y / n).
double scaled_gen_apply(const CbiParams& params, std::int64_t n, const TestFunction& f, const Vector& x);

/// 1/2 sum_i x_i sum_{k,l} (C_i)_{kl} f''_{kl}(x) + <beta~, grad f(x)>
double cignc_limit(const CbiParams& params, const TestFunction& f, const Vector& x);

/// n <Btilde x, grad f(x)>, the divergent part of scaled_gen_apply.
double scaled_drift_term(const CbiParams& params, std::int64_t n, const TestFunction& f, const Vector& x);

/// <lambda, x> == <lambda, e^{Btilde} x> within tol.
bool convergence_criterion(const CbiParams& params, const Vector& x, const Vector& lambda, double tol = 1e-10);

/// <Btilde x, grad f(x)> == 0 within tol.
bool drift_criterion(const CbiParams& params, const TestFunction& f, const Vector& x, double tol = 1e-10);

}  // namespace cbi
