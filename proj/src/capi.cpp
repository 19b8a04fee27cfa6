#include "cbi/cbi.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "cbi/affine.hpp"
#include "cbi/error.hpp"
#include "cbi/generators.hpp"
#include "cbi/io.hpp"
#include "cbi/matops.hpp"
#include "cbi/moments.hpp"
#include "cbi/simulate.hpp"
#include "cbi/test_function.hpp"

struct cbi_params {
  cbi::CbiParams value;
};

struct cbi_vsolution {
  cbi::VSolution value;
};

struct cbi_table {
  cbi::ConvergenceTable value;
};

struct cbi_test_function {
  cbi::TestFunction value;
};

struct cbi_paths {
  std::vector<cbi::SamplePath> paths;  // limit paths are stored as [scalar, ray...] states
};

namespace {

thread_local std::string g_last_error;

cbi_status map_code(cbi::Errc c) {
  switch (c) {
    case cbi::Errc::invalid_argument: return CBI_ERR_INVALID_ARGUMENT;
    case cbi::Errc::dimension_mismatch: return CBI_ERR_DIMENSION;
    case cbi::Errc::inadmissible: return CBI_ERR_INADMISSIBLE;
    case cbi::Errc::numeric_range: return CBI_ERR_NUMERIC_RANGE;
    case cbi::Errc::solver_failure: return CBI_ERR_SOLVER;
    case cbi::Errc::classification: return CBI_ERR_CLASSIFICATION;
    case cbi::Errc::parse: return CBI_ERR_PARSE;
  }
  return CBI_ERR_INTERNAL;
}

cbi_status fail(cbi_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
cbi_status guarded(F&& body) {
  try {
    body();
    return CBI_OK;
  } catch (const cbi::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CBI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CBI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CBI_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (!p) throw cbi::Error(cbi::Errc::invalid_argument, std::string("null pointer: ") + name);
}

void need_dim(const cbi_params* p, std::size_t d) {
  if (static_cast<std::size_t>(p->value.d) != d)
    throw cbi::Error(cbi::Errc::dimension_mismatch, "vector length " + std::to_string(d) +
                                                        " does not match model dimension " +
                                                        std::to_string(p->value.d));
}

cbi::Vector vec(const double* x, std::size_t d) {
  need(x, "vector");
  return Eigen::Map<const cbi::Vector>(x, static_cast<Eigen::Index>(d));
}

cbi::Matrix mat(const double* a, std::size_t d) {
  need(a, "matrix");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(a, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

void put(const cbi::Vector& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
}

void put(const cbi::Matrix& m, double* out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cbi::QuadratureSpec quad_spec(int order) { return order > 0 ? cbi::QuadratureSpec{order} : cbi::QuadratureSpec{}; }

cbi::VSolveOptions solve_options(const cbi_solver_options* o, const cbi::VSolveOptions& base) {
  cbi::VSolveOptions out = base;
  if (o) {
    if (!(o->rtol > 0.0) || !(o->atol > 0.0))
      throw cbi::Error(cbi::Errc::invalid_argument, "solver tolerances must be positive");
    out.ode.rtol = o->rtol;
    out.ode.atol = o->atol;
    out.quad = quad_spec(o->quad_order);
  }
  return out;
}

cbi::PathConfig path_config(const cbi_path_config* cfg) {
  need(cfg, "cfg");
  cbi::PathConfig pc;
  pc.x0 = vec(cfg->x0, cfg->d);
  pc.horizon = cfg->horizon;
  pc.dt = cfg->dt;
  pc.seed = cfg->seed;
  pc.n_paths = cfg->n_paths;
  pc.record_every = cfg->record_every;
  pc.record_jumps = cfg->record_jumps != 0;
  return pc;
}

const cbi::SamplePath& path_at(const cbi_paths* paths, std::size_t i) {
  need(paths, "paths");
  if (i >= paths->paths.size()) throw cbi::Error(cbi::Errc::invalid_argument, "path index out of range");
  return paths->paths[i];
}

}  // namespace

extern "C" {

const char* cbi_version(void) { return "1.0.0"; }

const char* cbi_last_error(void) { return g_last_error.c_str(); }

const char* cbi_status_name(cbi_status status) {
  switch (status) {
    case CBI_OK: return "ok";
    case CBI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CBI_ERR_DIMENSION: return "dimension mismatch";
    case CBI_ERR_INADMISSIBLE: return "inadmissible parameters";
    case CBI_ERR_NUMERIC_RANGE: return "numeric range";
    case CBI_ERR_SOLVER: return "solver failure";
    case CBI_ERR_CLASSIFICATION: return "classification";
    case CBI_ERR_PARSE: return "parse error";
    case CBI_ERR_NULL_POINTER: return "null pointer";
    case CBI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void cbi_string_free(char* s) { std::free(s); }

void cbi_solver_options_default(cbi_solver_options* opts) {
  if (!opts) return;
  const cbi::VSolveOptions d;
  *opts = {d.ode.rtol, d.ode.atol, d.quad.order};
}

void cbi_generator_options_default(cbi_solver_options* opts) {
  if (!opts) return;
  const auto d = cbi::generator_solve_options();
  *opts = {d.ode.rtol, d.ode.atol, d.quad.order};
}

cbi_status cbi_params_from_json(const char* json_text, cbi_params** out) {
  if (!json_text || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cbi_params{cbi::params_from_json_text(json_text)}; });
}

cbi_status cbi_params_load(const char* path, cbi_params** out) {
  if (!path || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cbi_params{cbi::params_from_file(path)}; });
}

void cbi_params_free(cbi_params* params) { delete params; }

cbi_status cbi_params_dim(const cbi_params* params, int* out_d) {
  if (!params || !out_d) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out_d = params->value.d;
  return CBI_OK;
}

cbi_status cbi_params_to_json(const cbi_params* params, char** out_json) {
  if (!params || !out_json) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out_json = dup_string(cbi::params_to_json(params->value).dump()); });
}

cbi_status cbi_validate(const cbi_params* params, int* out_admissible, char** out_report_json) {
  if (!params || !out_admissible) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    const auto report = cbi::validate(params->value);
    if (out_report_json) *out_report_json = dup_string(cbi::report_to_json(report).dump());
    *out_admissible = report.admissible ? 1 : 0;
  });
}

cbi_status cbi_derive(const cbi_params* params, double critical_tol, char** out_json) {
  if (!params || !out_json) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    const auto dq = cbi::derive(params->value, critical_tol);
    nlohmann::json j;
    j["btilde"] = cbi::matrix_to_json(dq.btilde);
    j["beta_tilde"] = cbi::vector_to_json(dq.beta_tilde);
    j["C"] = nlohmann::json::array();
    for (const auto& c : dq.big_c) j["C"].push_back(cbi::matrix_to_json(c));
    auto eig = nlohmann::json::array();
    for (const auto& z : dq.spectrum.eigenvalues) eig.push_back({z.real(), z.imag()});
    j["spectrum"] = {{"eigenvalues", eig},
                     {"spectral_radius", dq.spectrum.spectral_radius},
                     {"spectral_abscissa", dq.spectrum.spectral_abscissa}};
    j["classification"] = cbi::to_string(dq.classification);
    j["critical_tol"] = critical_tol;
    if (dq.perron) {
      j["u_right"] = cbi::vector_to_json(dq.perron->u_right);
      j["u_left"] = cbi::vector_to_json(dq.perron->u_left);
    } else {
      j["u_right"] = nullptr;
      j["u_left"] = nullptr;
    }
    j["cbar"] = dq.cbar ? cbi::matrix_to_json(*dq.cbar) : nlohmann::json(nullptr);
    *out_json = dup_string(j.dump());
  });
}

cbi_status cbi_mat_exp(const double* a, size_t d, double t, double* out) {
  if (!a || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { put(cbi::mat_exp(mat(a, d), t), out); });
}

cbi_status cbi_is_irreducible(const double* a, size_t d, int* out) {
  if (!a || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = cbi::is_irreducible(mat(a, d)) ? 1 : 0; });
}

cbi_status cbi_mean(const cbi_params* params, const double* x, size_t d, double t, int quad_order,
                    double* out_mean) {
  if (!params || !x || !out_mean) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    put(cbi::mean(params->value, vec(x, d), t, quad_spec(quad_order)), out_mean);
  });
}

cbi_status cbi_variance_no_immigration(const cbi_params* params, const double* z, size_t d, double t,
                                       int quad_order, double* out_cov) {
  if (!params || !z || !out_cov) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    put(cbi::variance_no_immigration(params->value, vec(z, d), t, quad_spec(quad_order)), out_cov);
  });
}

cbi_status cbi_phi(const cbi_params* params, const double* lambda, size_t d, double* out) {
  if (!params || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    put(cbi::phi(params->value, vec(lambda, d)), out);
  });
}

cbi_status cbi_psi(const cbi_params* params, const double* lambda, size_t d, double* out) {
  if (!params || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::psi(params->value, vec(lambda, d));
  });
}

cbi_status cbi_psi_grad(const cbi_params* params, const double* lambda, size_t d, double* out) {
  if (!params || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    put(cbi::psi_grad(params->value, vec(lambda, d)), out);
  });
}

cbi_status cbi_vsolve(const cbi_params* params, double t, const double* lambda, size_t d,
                      const cbi_solver_options* opts, cbi_vsolution** out) {
  if (!params || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    auto sol = cbi::solve_v(params->value, t, vec(lambda, d), solve_options(opts, cbi::VSolveOptions{}));
    *out = new cbi_vsolution{std::move(sol)};
  });
}

cbi_status cbi_vsolution_eval(const cbi_vsolution* sol, double s, double* out_v, size_t d) {
  if (!sol || !out_v) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    if (static_cast<std::size_t>(sol->value.lambda().size()) != d)
      throw cbi::Error(cbi::Errc::dimension_mismatch, "output length does not match solution dimension");
    if (!(s >= 0.0 && s <= sol->value.t_max()))
      throw cbi::Error(cbi::Errc::invalid_argument, "evaluation time outside [0, t]");
    put(sol->value(s), out_v);
  });
}

cbi_status cbi_vsolution_psi_integral(const cbi_vsolution* sol, double* out) {
  if (!sol || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out = sol->value.psi_integral();
  return CBI_OK;
}

cbi_status cbi_vsolution_stats(const cbi_vsolution* sol, cbi_solver_stats* out) {
  if (!sol || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  const auto& s = sol->value.solver_stats();
  *out = {static_cast<long>(s.accepted), static_cast<long>(s.rejected), static_cast<long>(s.rhs_evals),
          static_cast<long>(s.clip_events), s.clipped_total, s.max_error_estimate};
  return CBI_OK;
}

void cbi_vsolution_free(cbi_vsolution* sol) { delete sol; }

cbi_status cbi_laplace(const cbi_params* params, double t, const double* x, const double* lambda, size_t d,
                       const cbi_solver_options* opts, double* out) {
  if (!params || !x || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::laplace_transform(params->value, t, vec(x, d), vec(lambda, d),
                                  solve_options(opts, cbi::VSolveOptions{}));
  });
}

cbi_status cbi_v_jacobian_limit(const cbi_params* params, double t, double* out) {
  if (!params || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { put(cbi::v_jacobian_limit(params->value, t), out); });
}

cbi_status cbi_v_hessian_limit(const cbi_params* params, double t, int i, int j, int k, int quad_order,
                               double* out) {
  if (!params || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = cbi::v_hessian_limit(params->value, t, i, j, k, quad_spec(quad_order)); });
}

cbi_status cbi_discrete_gen_exp(const cbi_params* params, int64_t n, const double* x, const double* lambda,
                                size_t d, const cbi_solver_options* opts, double* out) {
  if (!params || !x || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::discrete_gen_exp(params->value, n, vec(x, d), vec(lambda, d),
                                 solve_options(opts, cbi::generator_solve_options()));
  });
}

cbi_status cbi_prop31_limit(const cbi_params* params, const double* x, const double* lambda, size_t d,
                            int quad_order, double* out) {
  if (!params || !x || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::prop31_limit(params->value, vec(x, d), vec(lambda, d), quad_spec(quad_order));
  });
}

cbi_status cbi_prop31_table(const cbi_params* params, const double* x, const double* lambda, size_t d,
                            const int64_t* n_list, size_t count, const cbi_solver_options* opts,
                            cbi_table** out) {
  if (!params || !x || !lambda || !out || (count && !n_list)) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    cbi::ConvergenceOptions co;
    co.solve = solve_options(opts, cbi::generator_solve_options());
    co.quad = co.solve.quad;
    std::vector<std::int64_t> ns(n_list, n_list + count);
    if (ns.empty()) ns = cbi::kDefaultNList;
    *out = new cbi_table{cbi::prop31_corrected_sequence(params->value, vec(x, d), vec(lambda, d), ns, co)};
  });
}

cbi_status cbi_table_size(const cbi_table* table, size_t* out) {
  if (!table || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out = table->value.n_values.size();
  return CBI_OK;
}

cbi_status cbi_table_row(const cbi_table* table, size_t row, int64_t* n, double* raw, double* corrected,
                         double* gap) {
  if (!table) return fail(CBI_ERR_NULL_POINTER, "null argument");
  const auto& t = table->value;
  if (row >= t.n_values.size()) return fail(CBI_ERR_INVALID_ARGUMENT, "row index out of range");
  if (n) *n = t.n_values[row];
  if (raw) *raw = t.raw[row];
  if (corrected) *corrected = t.corrected[row];
  if (gap) *gap = t.gap[row];
  return CBI_OK;
}

cbi_status cbi_table_summary(const cbi_table* table, double* limit, cbi_verdict* verdict, double* fitted_slope,
                             double* expected_slope) {
  if (!table) return fail(CBI_ERR_NULL_POINTER, "null argument");
  const auto& t = table->value;
  if (limit) *limit = t.limit_formula;
  if (verdict) *verdict = static_cast<cbi_verdict>(static_cast<int>(t.verdict));
  if (fitted_slope) *fitted_slope = t.fitted_slope;
  if (expected_slope) *expected_slope = t.expected_slope;
  return CBI_OK;
}

void cbi_table_free(cbi_table* table) { delete table; }

cbi_status cbi_convergence_criterion(const cbi_params* params, const double* x, const double* lambda, size_t d,
                                     double tol, int* out) {
  if (!params || !x || !lambda || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::convergence_criterion(params->value, vec(x, d), vec(lambda, d), tol) ? 1 : 0;
  });
}

cbi_status cbi_bump_new(const double* center, size_t d, double radius, double amplitude,
                        cbi_test_function** out) {
  if (!center || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = new cbi_test_function{cbi::bump(vec(center, d), radius, amplitude)}; });
}

cbi_status cbi_poly_bump_new(const double* center, size_t d, double radius, double amplitude, double a0,
                             const double* g, const double* h, cbi_test_function** out) {
  if (!center || !g || !h || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    *out = new cbi_test_function{cbi::poly_bump(vec(center, d), radius, amplitude, a0, vec(g, d), mat(h, d))};
  });
}

cbi_status cbi_test_function_eval(const cbi_test_function* f, const double* x, size_t d, double* value,
                                  double* grad, double* hess) {
  if (!f || !x) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    if (static_cast<std::size_t>(f->value.dim()) != d)
      throw cbi::Error(cbi::Errc::dimension_mismatch, "point dimension does not match test function");
    const auto p = vec(x, d);
    if (value) *value = f->value.value(p);
    if (grad) put(f->value.gradient(p), grad);
    if (hess) put(f->value.hessian(p), hess);
  });
}

void cbi_test_function_free(cbi_test_function* f) { delete f; }

cbi_status cbi_generator_apply(const cbi_params* params, const cbi_test_function* f, const double* x, size_t d,
                               double* out) {
  if (!params || !f || !x || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::generator_apply(params->value, f->value, vec(x, d));
  });
}

cbi_status cbi_generator_forms(const cbi_params* params, const cbi_test_function* f, const double* x, size_t d,
                               double* standard, double* compensated) {
  if (!params || !f || !x) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    const auto forms = cbi::generator_forms(params->value, f->value, vec(x, d));
    if (standard) *standard = forms.standard;
    if (compensated) *compensated = forms.compensated;
  });
}

cbi_status cbi_scaled_gen_apply(const cbi_params* params, int64_t n, const cbi_test_function* f, const double* x,
                                size_t d, double* out) {
  if (!params || !f || !x || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::scaled_gen_apply(params->value, n, f->value, vec(x, d));
  });
}

cbi_status cbi_scaled_drift_term(const cbi_params* params, int64_t n, const cbi_test_function* f,
                                 const double* x, size_t d, double* out) {
  if (!params || !f || !x || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::scaled_drift_term(params->value, n, f->value, vec(x, d));
  });
}

cbi_status cbi_cignc_limit(const cbi_params* params, const cbi_test_function* f, const double* x, size_t d,
                           double* out) {
  if (!params || !f || !x || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::cignc_limit(params->value, f->value, vec(x, d));
  });
}

cbi_status cbi_drift_criterion(const cbi_params* params, const cbi_test_function* f, const double* x, size_t d,
                               double tol, int* out) {
  if (!params || !f || !x || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, d);
    *out = cbi::drift_criterion(params->value, f->value, vec(x, d), tol) ? 1 : 0;
  });
}

cbi_status cbi_simulate(const cbi_params* params, const cbi_path_config* cfg, cbi_paths** out) {
  if (!params || !cfg || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, cfg->d);
    *out = new cbi_paths{cbi::simulate_cbi(params->value, path_config(cfg))};
  });
}

cbi_status cbi_simulate_scaled(const cbi_params* params, int64_t n, const cbi_path_config* cfg, cbi_paths** out) {
  if (!params || !cfg || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, cfg->d);
    *out = new cbi_paths{cbi::simulate_scaled_step(params->value, n, path_config(cfg))};
  });
}

cbi_status cbi_simulate_limit(const cbi_params* params, const cbi_path_config* cfg, cbi_paths** out) {
  if (!params || !cfg || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    need_dim(params, cfg->d);
    auto limit = cbi::simulate_limit_diffusion(params->value, path_config(cfg));
    std::vector<cbi::SamplePath> paths;
    paths.reserve(limit.size());
    for (auto& lp : limit) {
      cbi::SamplePath sp;
      sp.times = std::move(lp.times);
      sp.states.resize(lp.ray.rows(), lp.ray.cols() + 1);
      for (Eigen::Index r = 0; r < lp.ray.rows(); ++r) {
        sp.states(r, 0) = lp.scalar[static_cast<std::size_t>(r)];
        sp.states.row(r).tail(lp.ray.cols()) = lp.ray.row(r);
      }
      paths.push_back(std::move(sp));
    }
    *out = new cbi_paths{std::move(paths)};
  });
}

cbi_status cbi_limit_coefficients(const cbi_params* params, double* drift, double* diffusion, double* u_right,
                                  double* u_left) {
  if (!params) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    const auto lc = cbi::limit_coefficients(params->value);
    if (drift) *drift = lc.drift;
    if (diffusion) *diffusion = lc.diffusion;
    if (u_right) put(lc.u_right, u_right);
    if (u_left) put(lc.u_left, u_left);
  });
}

cbi_status cbi_paths_count(const cbi_paths* paths, size_t* out) {
  if (!paths || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out = paths->paths.size();
  return CBI_OK;
}

cbi_status cbi_paths_dim(const cbi_paths* paths, size_t* out) {
  if (!paths || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  *out = paths->paths.empty() ? 0 : static_cast<size_t>(paths->paths.front().states.cols());
  return CBI_OK;
}

cbi_status cbi_paths_length(const cbi_paths* paths, size_t path, size_t* out) {
  if (!paths || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = path_at(paths, path).times.size(); });
}

cbi_status cbi_paths_times(const cbi_paths* paths, size_t path, const double** out) {
  if (!paths || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = path_at(paths, path).times.data(); });
}

cbi_status cbi_paths_states(const cbi_paths* paths, size_t path, const double** out) {
  if (!paths || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = path_at(paths, path).states.data(); });
}

cbi_status cbi_paths_jump_count(const cbi_paths* paths, size_t path, size_t* out) {
  if (!paths || !out) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] { *out = path_at(paths, path).jumps.size(); });
}

cbi_status cbi_paths_jump(const cbi_paths* paths, size_t path, size_t index, double* time, int* source,
                          double* jump) {
  if (!paths) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    const auto& p = path_at(paths, path);
    if (index >= p.jumps.size()) throw cbi::Error(cbi::Errc::invalid_argument, "jump index out of range");
    const auto& ev = p.jumps[index];
    if (time) *time = ev.time;
    if (source) *source = ev.source;
    if (jump) put(ev.jump, jump);
  });
}

cbi_status cbi_paths_terminal_stats(const cbi_paths* paths, double* mean, double* mean_se, double* cov,
                                    double* cov_se) {
  if (!paths) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    const auto ts = cbi::terminal_stats(paths->paths);
    if (mean) put(ts.mean, mean);
    if (mean_se) put(ts.mean_se, mean_se);
    if (cov) put(ts.covariance, cov);
    if (cov_se) put(ts.covariance_se, cov_se);
  });
}

cbi_status cbi_paths_empirical_laplace(const cbi_paths* paths, const double* lambda, size_t dim, double* value,
                                       double* se) {
  if (!paths || !lambda) return fail(CBI_ERR_NULL_POINTER, "null argument");
  return guarded([&] {
    if (!paths->paths.empty() && static_cast<std::size_t>(paths->paths.front().states.cols()) != dim)
      throw cbi::Error(cbi::Errc::dimension_mismatch, "lambda length does not match path dimension");
    const auto ev = cbi::empirical_laplace(paths->paths, vec(lambda, dim));
    if (value) *value = ev.value;
    if (se) *se = ev.se;
  });
}

void cbi_paths_free(cbi_paths* paths) { delete paths; }

}  // extern "C"
