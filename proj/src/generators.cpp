#include "cbi/generators.hpp"

#include <algorithm>
#include <cmath>

#include "cbi/error.hpp"
#include "cbi/matops.hpp"
#include "cbi/moments.hpp"

namespace cbi {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converges: return "converges";
    case Verdict::diverges_linearly: return "diverges-linearly";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

namespace {

void require_point(const CbiParams& p, const Vector& x, const char* what) {
  if (x.size() != p.d) throw Error(Errc::dimension_mismatch, std::string(what) + ": x must have length d");
  if (!x.allFinite() || (x.array() < 0.0).any())
    throw Error(Errc::invalid_argument, std::string(what) + ": x must be finite and componentwise >= 0");
}

void require_n(std::int64_t n) {
  if (n < 1) throw Error(Errc::invalid_argument, "n must be a positive integer");
}

// <n x, v(1, lambda/n)> + int_0^1 psi(v(s, lambda/n)) ds
double scaled_exponent(const CbiParams& p, std::int64_t n, const Vector& x, const Vector& lambda,
                       const VSolveOptions& opts) {
  const double nn = static_cast<double>(n);
  const auto sol = solve_v(p, 1.0, lambda / nn, opts);
  return nn * x.dot(sol.final_value()) + sol.psi_integral();
}

}  // namespace

double discrete_gen_exp(const CbiParams& p, std::int64_t n, const Vector& x, const Vector& lambda,
                        const VSolveOptions& opts) {
  require_n(n);
  require_point(p, x, "discrete_gen_exp");
  const double a = lambda.dot(x);
  const double expo = scaled_exponent(p, n, x, lambda, opts);
  // n (e^{-expo} - e^{-a}) without cancellation
  return static_cast<double>(n) * std::exp(-a) * std::expm1(a - expo);
}

double prop31_correction(const CbiParams& p, std::int64_t n, const Vector& x, const Vector& lambda) {
  require_n(n);
  require_admissible(p);
  require_point(p, x, "prop31_correction");
  const double a = lambda.dot(x);
  const double a1 = lambda.dot(mat_exp(effective_drift(p), 1.0) * x);
  return static_cast<double>(n) * std::exp(-a) * (-std::expm1(a - a1));
}

double prop31_limit(const CbiParams& p, const Vector& x, const Vector& lambda, const QuadratureSpec& quad) {
  require_admissible(p);
  require_point(p, x, "prop31_limit");
  if (lambda.size() != p.d) throw Error(Errc::dimension_mismatch, "prop31_limit: lambda must have length d");
  const Matrix bt = effective_drift(p);
  const Vector beta_t = effective_immigration(p);
  const auto cs = branching_covariances(p);

  const double quadratic = integrate(
      [&](double s) {
        const Vector w = mat_exp(bt, 1.0 - s) * x;
        const Vector el = mat_exp(bt, s).transpose() * lambda;  // e^{s Bt^T} lambda
        double acc = 0.0;
        for (int l = 0; l < p.d; ++l) acc += w(l) * el.dot(cs[l] * el);
        return acc;
      },
      0.0, 1.0, quad);
  const double linear = lambda.dot(exp_integral(bt, beta_t, 1.0, quad));
  const double e_lam = std::exp(-lambda.dot(mat_exp(bt, 1.0) * x));
  return e_lam * (0.5 * quadratic - linear);
}

ConvergenceTable prop31_corrected_sequence(const CbiParams& p, const Vector& x, const Vector& lambda,
                                           const std::vector<std::int64_t>& n_list, const ConvergenceOptions& o) {
  require_admissible(p);
  require_point(p, x, "prop31_corrected_sequence");
  if (n_list.empty()) throw Error(Errc::invalid_argument, "prop31: n_list is empty");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    require_n(n_list[k]);
    if (k > 0 && n_list[k] <= n_list[k - 1]) throw Error(Errc::invalid_argument, "prop31: n_list must be increasing");
  }

  ConvergenceTable tab;
  tab.n_values = n_list;
  tab.limit_formula = prop31_limit(p, x, lambda, o.quad);
  const double a = lambda.dot(x);
  const double a1 = lambda.dot(mat_exp(effective_drift(p), 1.0) * x);
  tab.expected_slope = std::exp(-a1) - std::exp(-a);

  for (const auto n : n_list) {
    const double nn = static_cast<double>(n);
    const double expo = scaled_exponent(p, n, x, lambda, o.solve);
    tab.raw.push_back(nn * std::exp(-a) * std::expm1(a - expo));
    tab.corrected.push_back(nn * std::exp(-a1) * std::expm1(a1 - expo));
    tab.gap.push_back(std::abs(tab.corrected.back() - tab.limit_formula));
  }

  // raw(n)/n ~ slope + b/n, least squares over the top half of n_list
  const std::size_t m = n_list.size();
  const std::size_t first = m / 2;
  if (m - first == 1) {
    tab.fitted_slope = tab.raw.back() / static_cast<double>(n_list.back());
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(m - first);
    for (std::size_t k = first; k < m; ++k) {
      const double u = 1.0 / static_cast<double>(n_list[k]);
      const double y = tab.raw[k] / static_cast<double>(n_list[k]);
      sx += u;
      sy += y;
      sxx += u * u;
      sxy += u * y;
    }
    const double b = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    tab.fitted_slope = (sy - b * sx) / cnt;
  }

  const bool nonzero_slope = std::abs(tab.fitted_slope) > o.slope_threshold;
  bool stable_ratio = false;
  if (m >= 2) {
    const double r1 = tab.raw[m - 1] / static_cast<double>(n_list[m - 1]);
    const double r0 = tab.raw[m - 2] / static_cast<double>(n_list[m - 2]);
    stable_ratio = r1 != 0.0 && std::abs(r1 - r0) / std::abs(r1) < o.drift_tol;
  }
  const bool slope_matches = std::abs(tab.fitted_slope - tab.expected_slope) <= o.drift_tol * std::abs(tab.expected_slope);

  bool gaps_shrink = true;
  for (std::size_t k = 1; k < m; ++k)
    if (tab.gap[k] > o.gap_floor && tab.gap[k] >= tab.gap[k - 1]) gaps_shrink = false;

  if (nonzero_slope && stable_ratio && slope_matches)
    tab.verdict = Verdict::diverges_linearly;
  else if (!nonzero_slope && gaps_shrink && tab.gap.back() <= o.converge_tol)
    tab.verdict = Verdict::converges;
  else
    tab.verdict = Verdict::indeterminate;
  return tab;
}

namespace {

void require_function(const CbiParams& p, const TestFunction& f, const Vector& x, const char* what) {
  require_point(p, x, what);
  if (f.dim() != p.d) throw Error(Errc::dimension_mismatch, std::string(what) + ": test function dimension != d");
}

}  // namespace

GeneratorForms generator_forms(const CbiParams& p, const TestFunction& f, const Vector& x) {
  require_admissible(p);
  require_function(p, f, x, "generator_apply");
  const double fx = f.value(x);
  const Vector grad = f.gradient(x);
  const Matrix hess = f.hessian(x);

  double immigration_jumps = 0.0;
  for (const auto& a : p.nu.atoms()) immigration_jumps += a.weight * (f.value(x + a.point) - fx);

  GeneratorForms out;
  {
    double diffusion = 0.0, branching = 0.0;
    for (int i = 0; i < p.d; ++i) {
      diffusion += p.c(i) * x(i) * hess(i, i);
      double acc = 0.0;
      for (const auto& a : p.mu[i].atoms())
        acc += a.weight * (f.value(x + a.point) - fx - grad(i) * std::min(1.0, a.point(i)));
      branching += x(i) * acc;
    }
    out.standard = diffusion + (p.beta + p.B * x).dot(grad) + immigration_jumps + branching;
  }
  {
    const auto cs = branching_covariances(p);
    const Matrix bt = effective_drift(p);
    double second = 0.0, branching = 0.0;
    for (int i = 0; i < p.d; ++i) {
      second += x(i) * (cs[i].cwiseProduct(hess)).sum();
      double acc = 0.0;
      for (const auto& a : p.mu[i].atoms()) {
        const Vector& z = a.point;
        acc += a.weight * (f.value(x + z) - fx - z.dot(grad) - 0.5 * z.dot(hess * z));
      }
      branching += x(i) * acc;
    }
    out.compensated = 0.5 * second + (p.beta + bt * x).dot(grad) + immigration_jumps + branching;
  }
  return out;
}

double generator_apply(const CbiParams& p, const TestFunction& f, const Vector& x) {
  const auto forms = generator_forms(p, f, x);
  const double scale = std::max({1.0, std::abs(forms.standard), std::abs(forms.compensated)});
  if (std::abs(forms.standard - forms.compensated) > 1e-10 * scale)
    throw Error(Errc::numeric_range, "generator_apply: standard and compensated forms disagree (" +
                                         std::to_string(forms.standard) + " vs " +
                                         std::to_string(forms.compensated) + ")");
  return forms.standard;
}

double scaled_gen_apply(const CbiParams& p, std::int64_t n, const TestFunction& f, const Vector& x) {
  require_n(n);
  require_function(p, f, x, "scaled_gen_apply");
  const double nn = static_cast<double>(n);
  return nn * generator_apply(p, f.rescaled(nn), nn * x);
}

double cignc_limit(const CbiParams& p, const TestFunction& f, const Vector& x) {
  require_admissible(p);
  require_function(p, f, x, "cignc_limit");
  const auto cs = branching_covariances(p);
  const Matrix hess = f.hessian(x);
  double second = 0.0;
  for (int i = 0; i < p.d; ++i) second += x(i) * (cs[i].cwiseProduct(hess)).sum();
  return 0.5 * second + effective_immigration(p).dot(f.gradient(x));
}

double scaled_drift_term(const CbiParams& p, std::int64_t n, const TestFunction& f, const Vector& x) {
  require_n(n);
  require_admissible(p);
  require_function(p, f, x, "scaled_drift_term");
  return static_cast<double>(n) * (effective_drift(p) * x).dot(f.gradient(x));
}

bool convergence_criterion(const CbiParams& p, const Vector& x, const Vector& lambda, double tol) {
  require_admissible(p);
  require_point(p, x, "convergence_criterion");
  if (lambda.size() != p.d) throw Error(Errc::dimension_mismatch, "convergence_criterion: lambda must have length d");
  return std::abs(lambda.dot(x) - lambda.dot(mat_exp(effective_drift(p), 1.0) * x)) <= tol;
}

bool drift_criterion(const CbiParams& p, const TestFunction& f, const Vector& x, double tol) {
  require_admissible(p);
  require_function(p, f, x, "drift_criterion");
  return std::abs((effective_drift(p) * x).dot(f.gradient(x))) <= tol;
}

}  // namespace cbi
