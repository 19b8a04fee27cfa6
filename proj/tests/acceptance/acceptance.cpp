// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../unit/fixtures.hpp"
#include "cbi/affine.hpp"
#include "cbi/generators.hpp"
#include "cbi/matops.hpp"
#include "cbi/moments.hpp"
#include "cbi/simulate.hpp"

using namespace cbi;
using namespace fixtures;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// (t, lambda) grid on (0,2] x (0,5]
template <class F>
double grid_max(F&& err) {
  double worst = 0.0;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j) worst = std::max(worst, err(0.2 * i, 0.5 * j));
  return worst;
}

Outcome riccati_oracle() {
  const auto p = fix_a();
  const double worst = grid_max([&](double t, double l) {
    const auto sol = solve_v(p, t, vec({l}));
    return std::abs(sol(t)(0) - l / (1.0 + l * t));
  });
  return {worst <= 1e-8, "max abs error " + fmt("%.3e", worst)};
}

Outcome laplace_exactness() {
  const auto p = fix_a();
  double worst = 0.0;
  for (double x : {0.5, 1.0, 2.0})
    worst = std::max(worst, grid_max([&](double t, double l) {
      const double exact = std::exp(-x * l / (1.0 + l * t)) / (1.0 + l * t);
      return std::abs(laplace_transform(p, t, vec({x}), vec({l})) - exact);
    }));
  return {worst <= 1e-8, "max abs error " + fmt("%.3e", worst)};
}

Outcome corrected_sequence() {
  const auto t = prop31_corrected_sequence(fix_a(), vec({2.0}), vec({1.0}));
  const double final_gap = std::abs(t.corrected.back() - std::exp(-2.0));
  bool ok = final_gap <= 1e-3;
  std::string ratios;
  for (std::size_t k = 0; k + 1 < t.gap.size(); ++k) {
    const double r = t.gap[k] / t.gap[k + 1];
    ok = ok && r >= 8.0 && r <= 12.0;
    ratios += fmt(" %.3f", r);
  }
  return {ok, "gap(1e4) " + fmt("%.3e", final_gap) + ", ratios" + ratios};
}

Outcome dichotomy() {
  const auto p = crit2();
  const Matrix e = mat_exp(effective_drift(p));
  const std::vector<Vector> lambdas{vec({1.0, 0.0}), vec({0.0, 1.0}), vec({1.0, 1.0}), vec({0.3, 2.0}),
                                    vec({2.0, 0.5})};
  int ray_ok = 0, ray_total = 0;
  for (double delta : {0.1, 1.0, 10.0})
    for (const auto& l : lambdas) {
      ++ray_total;
      ray_ok += prop31_corrected_sequence(p, delta * vec({0.5, 0.5}), l).verdict == Verdict::converges;
    }

  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  int div_ok = 0, div_total = 0;
  double worst_drift = 0.0;
  while (div_total < 20) {
    const Vector x = vec({u(rng), u(rng)}), l = vec({u(rng), u(rng)});
    if (std::abs(l.dot(x) - l.dot(e * x)) < 0.1) continue;
    ++div_total;
    const auto t = prop31_corrected_sequence(p, x, l);
    const double a3 = t.raw[2] / 1e3, a4 = t.raw[3] / 1e4;
    const double drift = std::abs(a4 - a3) / std::abs(a4);
    worst_drift = std::max(worst_drift, drift);
    div_ok += t.verdict == Verdict::diverges_linearly && drift < 0.10 && std::abs(a4) > 0.0;
  }
  return {ray_ok == ray_total && div_ok == div_total,
          "rays " + std::to_string(ray_ok) + "/" + std::to_string(ray_total) + " converge, off-ray " +
              std::to_string(div_ok) + "/" + std::to_string(div_total) + " diverge linearly, worst drift " +
              fmt("%.3e", worst_drift)};
}

Outcome scaled_generator() {
  double worst = 0.0, worst_bessel = 0.0;
  {
    const auto p = fix_a();
    const auto f = bump(vec({1.0}), 0.8, 1.0);
    for (double x : {0.4, 0.7, 1.0, 1.3, 1.6}) {
      const Vector xv = vec({x});
      const double lim = cignc_limit(p, f, xv);
      worst = std::max(worst, std::abs(scaled_gen_apply(p, 10000, f, xv) - scaled_drift_term(p, 10000, f, xv) - lim));
      const double bessel = x * f.hessian(xv)(0, 0) + f.gradient(xv)(0);
      worst_bessel = std::max(worst_bessel, std::abs(lim - bessel));
    }
  }
  {
    const auto p = crit2();
    const auto f = bump(vec({1.0, 0.8}), 0.9, 1.0);
    const std::vector<Vector> xs{vec({1.0, 0.8}), vec({1.3, 0.8}), vec({0.8, 1.1}), vec({1.2, 0.4}), vec({0.6, 0.7})};
    for (const auto& x : xs)
      worst = std::max(worst, std::abs(scaled_gen_apply(p, 10000, f, x) - scaled_drift_term(p, 10000, f, x) -
                                       cignc_limit(p, f, x)));
  }
  return {worst <= 1e-3 && worst_bessel <= 1e-10,
          "max gap at n=1e4 " + fmt("%.3e", worst) + ", squared Bessel check " + fmt("%.3e", worst_bessel)};
}

Outcome derivative_limits() {
  ProbeOptions jo;
  jo.eps = 1e-4;
  double jac_raw = 0.0, jac = 0.0;
  for (const auto& p : {fix_a(), crit2(), jump1(), jump2()}) {
    const auto pr = probe_v_jacobian(p, 1.0, jo);
    jac = std::max(jac, pr.deviation_extrapolated);
    jac_raw = std::max(jac_raw, pr.deviation_at_eps);
  }
  ProbeOptions ho;
  ho.eps = 1e-3;
  const auto h = probe_v_hessian(fix_a(), 1.0, 0, 0, 0, ho);
  const bool limit_ok = std::abs(h.limit + 2.0) < 1e-12;
  return {jac <= 1e-5 && h.deviation_extrapolated <= 1e-4 && limit_ok,
          "jacobian dev " + fmt("%.3e", jac) + " (plain " + fmt("%.3e", jac_raw) + "), hessian " +
              fmt("%.8f", h.extrapolated) + " dev " + fmt("%.3e", h.deviation_extrapolated) + " (plain " +
              fmt("%.3e", h.deviation_at_eps) + ")"};
}

Outcome two_forms() {
  const auto fx = all();
  std::mt19937_64 rng(20261015);
  std::uniform_int_distribution<std::size_t> pick(0, fx.size() - 1);
  std::uniform_real_distribution<double> radius(0.3, 2.5), amp(0.5, 3.0);
  double worst = 0.0;
  int nonzero = 0;
  for (int k = 0; k < 100; ++k) {
    const auto& p = fx[pick(rng)];
    const Vector c = uniform(rng, p.d, 0.0, 3.0);
    const double r = radius(rng);
    const auto f = bump(c, r, amp(rng));
    const Vector x = (c + uniform(rng, p.d, -r, r)).cwiseMax(0.0);
    const auto g = generator_forms(p, f, x);
    const double scale = std::max({1.0, std::abs(g.standard), std::abs(g.compensated)});
    worst = std::max(worst, std::abs(g.standard - g.compensated) / scale);
    nonzero += g.standard != 0.0;
  }
  return {worst <= 1e-10, "max scaled discrepancy " + fmt("%.3e", worst) + " over 100 triples (" +
                              std::to_string(nonzero) + " nonzero)"};
}

Outcome monte_carlo() {
  struct Case {
    const char* name;
    CbiParams p;
    Vector x0;
    std::vector<Vector> lambdas;
  };
  const std::vector<Vector> l1{vec({0.25}), vec({0.5}), vec({1.0}), vec({2.0}), vec({4.0})};
  const std::vector<Vector> l2{vec({0.5, 0.5}), vec({1.0, 0.0}), vec({0.0, 1.0}), vec({1.0, 2.0}), vec({2.0, 0.5})};
  const std::vector<Case> cases{{"single-type", fix_a(), vec({1.0}), l1},
                                {"two-type", crit2(), vec({1.0, 0.0}), l2},
                                {"jumps", jump1(), vec({1.0}), l1}};
  int checks = 0, passed = 0;
  double worst_z = 0.0;
  auto record = [&](double diff, double se) {
    const double z = std::abs(diff) / se;
    worst_z = std::max(worst_z, z);
    ++checks;
    passed += z <= 3.0;
  };
  std::uint64_t seed = 20261015;
  for (const auto& c : cases) {
    PathConfig cfg;
    cfg.x0 = c.x0;
    cfg.horizon = 1.0;
    cfg.dt = 1e-3;
    cfg.n_paths = 10000;
    cfg.record_every = 0;
    cfg.record_jumps = false;
    cfg.seed = seed++;
    const auto paths = simulate_cbi(c.p, cfg);
    const auto st = terminal_stats(paths);
    const Vector m = mean(c.p, c.x0, 1.0);
    for (int i = 0; i < c.p.d; ++i) record(st.mean(i) - m(i), st.mean_se(i));
    for (const auto& l : c.lambdas) {
      const auto e = empirical_laplace(paths, l);
      record(e.value - laplace_transform(c.p, 1.0, c.x0, l), e.se);
    }

    cfg.seed = seed++;
    const auto q = without_immigration(c.p);
    const auto vs = terminal_stats(simulate_cbi(q, cfg));
    const Matrix v = variance_no_immigration(q, c.x0, 1.0);
    for (int i = 0; i < c.p.d; ++i)
      for (int j = i; j < c.p.d; ++j) record(vs.covariance(i, j) - v(i, j), vs.covariance_se(i, j));
  }
  return {passed == checks, std::to_string(passed) + "/" + std::to_string(checks) + " within 3 SE, worst |z| " +
                                fmt("%.2f", worst_z)};
}

Outcome perron() {
  const Matrix b = mat2(-1.0, 1.0, 1.0, -1.0);
  const auto s = cbi::spectral(b);
  const auto pp = perron_pair(b);
  const double r = (pp.u_right - vec({0.5, 0.5})).cwiseAbs().maxCoeff();
  const double l = (pp.u_left - vec({1.0, 1.0})).cwiseAbs().maxCoeff();
  const bool ok = std::abs(s.spectral_abscissa) <= 1e-12 && r <= 1e-10 && l <= 1e-10 && is_irreducible(b) &&
                  !is_irreducible(mat2(0.0, 1.0, 0.0, 0.0));
  return {ok, "s " + fmt("%.3e", s.spectral_abscissa) + ", u_right dev " + fmt("%.3e", r) + ", u_left dev " +
                  fmt("%.3e", l)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"riccati closed form", 1.0, riccati_oracle},
      {"laplace closed form", 0.0, laplace_exactness},
      {"corrected discrete generator", 10.0, corrected_sequence},
      {"ray dichotomy", 0.0, dichotomy},
      {"scaled generator limit", 0.0, scaled_generator},
      {"derivative limits at zero", 0.0, derivative_limits},
      {"generator two-form identity", 0.0, two_forms},
      {"monte carlo consistency", 120.0, monte_carlo},
      {"spectral and perron", 0.0, perron},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto& c = criteria[k];
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    if (!in_time) o.detail += ", over the runtime budget";
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %zu %s: %s (%.3f s)\n", pass ? "PASS" : "FAIL", k + 1, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
