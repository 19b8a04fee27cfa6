// cbi-cli: command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbi/cbi.h"

using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kValidation = 2,
  kSolver = 3,
  kUsage = 4,
  kParse = 5,
  kDimension = 6,
  kInvalid = 7,
  kClassification = 8,
  kInternal = 9,
};

struct Failure {
  int code;
  std::string message;
};

int exit_for(cbi_status s) {
  switch (s) {
    case CBI_OK: return kOk;
    case CBI_ERR_INADMISSIBLE: return kValidation;
    case CBI_ERR_SOLVER: return kSolver;
    case CBI_ERR_PARSE: return kParse;
    case CBI_ERR_DIMENSION: return kDimension;
    case CBI_ERR_INVALID_ARGUMENT:
    case CBI_ERR_NUMERIC_RANGE:
    case CBI_ERR_NULL_POINTER: return kInvalid;
    case CBI_ERR_CLASSIFICATION: return kClassification;
    case CBI_ERR_INTERNAL: return kInternal;
  }
  return kInternal;
}

void check(cbi_status s) {
  if (s != CBI_OK) throw Failure{exit_for(s), std::string(cbi_status_name(s)) + ": " + cbi_last_error()};
}

std::string owned(char* s) {
  std::string out(s);
  cbi_string_free(s);
  return out;
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ParamsPtr = std::unique_ptr<cbi_params, Deleter<cbi_params, cbi_params_free>>;
using SolutionPtr = std::unique_ptr<cbi_vsolution, Deleter<cbi_vsolution, cbi_vsolution_free>>;
using TablePtr = std::unique_ptr<cbi_table, Deleter<cbi_table, cbi_table_free>>;
using FunctionPtr = std::unique_ptr<cbi_test_function, Deleter<cbi_test_function, cbi_test_function_free>>;
using PathsPtr = std::unique_ptr<cbi_paths, Deleter<cbi_paths, cbi_paths_free>>;

std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size() || !std::isfinite(v))
      throw Failure{kInvalid, flag + ": '" + text + "' is not a comma-separated list of numbers"};
    out.push_back(v);
  }
  if (out.empty()) throw Failure{kInvalid, flag + " is empty"};
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& text, const std::string& flag) {
  std::vector<std::int64_t> out;
  for (double v : parse_reals(text, flag)) {
    if (v < 1 || v != std::floor(v) || v > 9.0e15) throw Failure{kInvalid, flag + " entries must be positive integers"};
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Options shared by every command.
struct Common {
  std::string params_file;
  std::string out;
  double tol = 0.0;  // 0: command default
  double atol = 0.0;
  int quad_order = 32;
};

struct Context {
  ParamsPtr params;
  int d = 0;
  json params_json;
};

Context load(const Common& c, bool require_admissible = true) {
  Context ctx;
  cbi_params* raw = nullptr;
  check(cbi_params_load(c.params_file.c_str(), &raw));
  ctx.params.reset(raw);
  check(cbi_params_dim(raw, &ctx.d));
  char* js = nullptr;
  check(cbi_params_to_json(raw, &js));
  ctx.params_json = json::parse(owned(js));
  if (require_admissible) {
    int ok = 0;
    char* report = nullptr;
    check(cbi_validate(raw, &ok, &report));
    const auto rep = json::parse(owned(report));
    if (!ok) {
      std::string why;
      for (const auto& v : rep["violations"]) why += "\n  " + v.get<std::string>();
      throw Failure{kValidation, "parameters are not admissible:" + why};
    }
  }
  return ctx;
}

std::vector<double> vector_arg(const std::string& text, const std::string& flag, int d) {
  auto v = parse_reals(text, flag);
  if (static_cast<int>(v.size()) != d)
    throw Failure{kDimension, flag + " has " + std::to_string(v.size()) + " entries but the model has d = " +
                                  std::to_string(d)};
  return v;
}

cbi_solver_options solver(const Common& c, bool generator) {
  cbi_solver_options o;
  if (generator)
    cbi_generator_options_default(&o);
  else
    cbi_solver_options_default(&o);
  if (c.tol > 0) o.rtol = c.tol;
  if (c.atol > 0) o.atol = c.atol;
  o.quad_order = c.quad_order;
  return o;
}

json config_json(const Common& c, const Context& ctx, const cbi_solver_options* o) {
  json j{{"params_file", c.params_file}, {"params", ctx.params_json}, {"quad_order", c.quad_order}};
  if (o) j["solver"] = {{"rtol", o->rtol}, {"atol_relative", o->atol}, {"quad_order", o->quad_order}};
  if (!c.out.empty()) j["out"] = c.out;
  return j;
}

void emit_json(const json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{kParse, "cannot write " + path};
  f << text;
}

class CsvSink {
 public:
  explicit CsvSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Failure{kParse, "cannot write " + path};
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// CSV goes to --out (or stdout); the JSON report goes to --report, else stdout
// when the CSV went to a file, else stderr.
void emit_summary(const json& report, const std::string& out, const std::string& report_path) {
  if (!report_path.empty())
    emit_json(report, report_path);
  else if (!out.empty())
    emit_json(report, "");
  else
    std::cerr << report.dump(2) << "\n";
}

void add_common(CLI::App* cmd, Common& c, bool solver_opts) {
  cmd->add_option("--params", c.params_file, "parameter document (JSON)")->required();
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--quad-order", c.quad_order, "Gauss-Legendre nodes")->check(CLI::PositiveNumber);
  if (solver_opts) {
    cmd->add_option("--tol", c.tol, "ODE relative tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--atol", c.atol, "ODE absolute tolerance relative to max|lambda|")->check(CLI::PositiveNumber);
  }
}

// ---------------------------------------------------------------------------

int cmd_validate(const Common& c) {
  auto ctx = load(c, false);
  int ok = 0;
  char* report = nullptr;
  check(cbi_validate(ctx.params.get(), &ok, &report));
  json j{{"command", "validate"}, {"config", config_json(c, ctx, nullptr)}, {"report", json::parse(owned(report))}};
  emit_json(j, c.out);
  return ok ? kOk : kValidation;
}

int cmd_derive(const Common& c, double critical_tol) {
  auto ctx = load(c);
  char* out = nullptr;
  check(cbi_derive(ctx.params.get(), critical_tol, &out));
  auto cfg = config_json(c, ctx, nullptr);
  cfg["critical_tol"] = critical_tol;
  emit_json({{"command", "derive"}, {"config", cfg}, {"derived", json::parse(owned(out))}}, c.out);
  return kOk;
}

int cmd_vsolve(const Common& c, double t, const std::string& lambda_text, int grid) {
  auto ctx = load(c);
  const auto lambda = vector_arg(lambda_text, "--lambda", ctx.d);
  const auto o = solver(c, false);
  cbi_vsolution* raw = nullptr;
  check(cbi_vsolve(ctx.params.get(), t, lambda.data(), lambda.size(), &o, &raw));
  SolutionPtr sol(raw);
  std::vector<double> v(lambda.size());
  check(cbi_vsolution_eval(raw, t, v.data(), v.size()));
  double integral = 0.0;
  check(cbi_vsolution_psi_integral(raw, &integral));
  cbi_solver_stats st;
  check(cbi_vsolution_stats(raw, &st));
  json path = json::array();
  for (int k = 0; k <= grid && grid > 0; ++k) {
    const double s = t * k / grid;
    std::vector<double> vs(lambda.size());
    check(cbi_vsolution_eval(raw, s, vs.data(), vs.size()));
    path.push_back({{"s", s}, {"v", vs}});
  }
  auto cfg = config_json(c, ctx, &o);
  cfg["t"] = t;
  cfg["lambda"] = lambda;
  cfg["grid"] = grid;
  json result{{"v", v},
              {"psi_integral", integral},
              {"stats",
               {{"accepted_steps", st.accepted_steps},
                {"rejected_steps", st.rejected_steps},
                {"rhs_evals", st.rhs_evals},
                {"clip_events", st.clip_events},
                {"clipped_total", st.clipped_total},
                {"max_error_estimate", st.max_error_estimate}}}};
  if (grid > 0) result["path"] = path;
  emit_json({{"command", "vsolve"}, {"config", cfg}, {"result", result}}, c.out);
  return kOk;
}

int cmd_laplace(const Common& c, double t, const std::string& x_text, const std::string& lambda_text) {
  auto ctx = load(c);
  const auto x = vector_arg(x_text, "--x", ctx.d);
  const auto lambda = vector_arg(lambda_text, "--lambda", ctx.d);
  const auto o = solver(c, false);
  double value = 0.0;
  check(cbi_laplace(ctx.params.get(), t, x.data(), lambda.data(), x.size(), &o, &value));
  auto cfg = config_json(c, ctx, &o);
  cfg["t"] = t;
  cfg["x"] = x;
  cfg["lambda"] = lambda;
  emit_json({{"command", "laplace"}, {"config", cfg}, {"result", {{"value", value}, {"exponent", -std::log(value)}}}},
            c.out);
  return kOk;
}

int cmd_dgen(const Common& c, std::int64_t n, const std::string& x_text, const std::string& lambda_text) {
  auto ctx = load(c);
  const auto x = vector_arg(x_text, "--x", ctx.d);
  const auto lambda = vector_arg(lambda_text, "--lambda", ctx.d);
  if (n < 1) throw Failure{kInvalid, "--n must be a positive integer"};
  const auto o = solver(c, true);
  double value = 0.0, limit = 0.0;
  int converges = 0;
  check(cbi_discrete_gen_exp(ctx.params.get(), n, x.data(), lambda.data(), x.size(), &o, &value));
  check(cbi_prop31_limit(ctx.params.get(), x.data(), lambda.data(), x.size(), c.quad_order, &limit));
  check(cbi_convergence_criterion(ctx.params.get(), x.data(), lambda.data(), x.size(), 1e-10, &converges));
  auto cfg = config_json(c, ctx, &o);
  cfg["n"] = n;
  cfg["x"] = x;
  cfg["lambda"] = lambda;
  emit_json({{"command", "dgen"},
             {"config", cfg},
             {"result", {{"value", value}, {"limit_formula", limit}, {"convergence_criterion", converges != 0}}}},
            c.out);
  return kOk;
}

const char* verdict_name(cbi_verdict v) {
  switch (v) {
    case CBI_VERDICT_CONVERGES: return "converges";
    case CBI_VERDICT_DIVERGES_LINEARLY: return "diverges-linearly";
    case CBI_VERDICT_INDETERMINATE: return "indeterminate";
  }
  return "indeterminate";
}

int cmd_prop31(const Common& c, const std::string& x_text, const std::string& lambda_text,
               const std::string& n_text, const std::string& report_path) {
  auto ctx = load(c);
  const auto x = vector_arg(x_text, "--x", ctx.d);
  const auto lambda = vector_arg(lambda_text, "--lambda", ctx.d);
  const auto ns = parse_ints(n_text, "--n-list");
  const auto o = solver(c, true);
  cbi_table* raw = nullptr;
  check(cbi_prop31_table(ctx.params.get(), x.data(), lambda.data(), x.size(), ns.data(), ns.size(), &o, &raw));
  TablePtr table(raw);
  double limit = 0.0, slope = 0.0, expected = 0.0;
  cbi_verdict verdict;
  check(cbi_table_summary(raw, &limit, &verdict, &slope, &expected));

  CsvSink sink(c.out);
  auto& os = sink.stream();
  os << "n,raw,corrected,limit,gap\n";
  json rows = json::array();
  for (std::size_t k = 0; k < ns.size(); ++k) {
    std::int64_t n = 0;
    double r = 0, corr = 0, gap = 0;
    check(cbi_table_row(raw, k, &n, &r, &corr, &gap));
    os << n << ',' << fmt(r) << ',' << fmt(corr) << ',' << fmt(limit) << ',' << fmt(gap) << '\n';
    rows.push_back({{"n", n}, {"raw", r}, {"corrected", corr}, {"gap", gap}});
  }
  os.flush();

  auto cfg = config_json(c, ctx, &o);
  cfg["x"] = x;
  cfg["lambda"] = lambda;
  cfg["n_list"] = ns;
  emit_summary({{"command", "prop31"},
                {"config", cfg},
                {"result",
                 {{"limit_formula", limit},
                  {"verdict", verdict_name(verdict)},
                  {"fitted_slope", slope},
                  {"expected_slope", expected},
                  {"rows", rows}}}},
               c.out, report_path);
  return kOk;
}

struct BumpArgs {
  std::string center;
  double radius = 1.0;
  double amplitude = 1.0;
};

int cmd_cgen(const Common& c, const std::string& x_text, const std::string& n_text, const BumpArgs& b,
             const std::string& report_path) {
  auto ctx = load(c);
  const auto x = vector_arg(x_text, "--x", ctx.d);
  const auto ns = parse_ints(n_text, "--n-list");
  std::vector<double> center;
  if (b.center.empty()) {
    center = x;
    for (auto& v : center) v += 0.25 / std::sqrt(static_cast<double>(ctx.d));
  } else {
    center = vector_arg(b.center, "--center", ctx.d);
  }
  cbi_test_function* rawf = nullptr;
  check(cbi_bump_new(center.data(), center.size(), b.radius, b.amplitude, &rawf));
  FunctionPtr f(rawf);

  double standard = 0, compensated = 0, limit = 0;
  int drift_ok = 0;
  check(cbi_generator_forms(ctx.params.get(), rawf, x.data(), x.size(), &standard, &compensated));
  check(cbi_cignc_limit(ctx.params.get(), rawf, x.data(), x.size(), &limit));
  check(cbi_drift_criterion(ctx.params.get(), rawf, x.data(), x.size(), 1e-10, &drift_ok));

  CsvSink sink(c.out);
  auto& os = sink.stream();
  os << "n,scaled,drift_term,compensated,limit,gap\n";
  json rows = json::array();
  for (auto n : ns) {
    double scaled = 0, drift = 0;
    check(cbi_scaled_gen_apply(ctx.params.get(), n, rawf, x.data(), x.size(), &scaled));
    check(cbi_scaled_drift_term(ctx.params.get(), n, rawf, x.data(), x.size(), &drift));
    const double comp = scaled - drift;
    const double gap = std::abs(comp - limit);
    os << n << ',' << fmt(scaled) << ',' << fmt(drift) << ',' << fmt(comp) << ',' << fmt(limit) << ',' << fmt(gap)
       << '\n';
    rows.push_back({{"n", n}, {"scaled", scaled}, {"drift_term", drift}, {"compensated", comp}, {"gap", gap}});
  }
  os.flush();

  auto cfg = config_json(c, ctx, nullptr);
  cfg["x"] = x;
  cfg["n_list"] = ns;
  cfg["test_function"] = {{"kind", "bump"}, {"center", center}, {"radius", b.radius}, {"amplitude", b.amplitude}};
  emit_summary({{"command", "cgen"},
                {"config", cfg},
                {"result",
                 {{"generator_standard", standard},
                  {"generator_compensated", compensated},
                  {"limit", limit},
                  {"drift_criterion", drift_ok != 0},
                  {"rows", rows}}}},
               c.out, report_path);
  return kOk;
}

struct SimArgs {
  std::string x0;
  double horizon = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  int paths = 100;
  int record_every = 1;
  std::int64_t n = 100;
  std::string lambda;
  std::string report;
};

enum class SimKind { base, scaled, limit };

void write_paths(std::ostream& os, const cbi_paths* paths, SimKind kind, int d) {
  std::size_t count = 0, dim = 0;
  check(cbi_paths_count(paths, &count));
  check(cbi_paths_dim(paths, &dim));
  os << "path_id,t";
  if (kind == SimKind::limit) os << ",x";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  os << '\n';
  for (std::size_t p = 0; p < count; ++p) {
    std::size_t len = 0;
    const double* times = nullptr;
    const double* states = nullptr;
    check(cbi_paths_length(paths, p, &len));
    check(cbi_paths_times(paths, p, &times));
    check(cbi_paths_states(paths, p, &states));
    for (std::size_t r = 0; r < len; ++r) {
      os << p << ',' << fmt(times[r]);
      for (std::size_t k = 0; k < dim; ++k) os << ',' << fmt(states[r * dim + k]);
      os << '\n';
    }
  }
}

json check_entry(double empirical, double se, double expected) {
  const double z = se > 0 ? (empirical - expected) / se : (empirical == expected ? 0.0 : INFINITY);
  return {{"empirical", empirical}, {"se", se}, {"expected", expected}, {"z", z}, {"within_3se", std::abs(z) <= 3.0}};
}

int cmd_simulate(const Common& c, const SimArgs& s, SimKind kind) {
  auto ctx = load(c);
  const int d = ctx.d;
  const auto x0 = s.x0.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0) : vector_arg(s.x0, "--x", d);
  if (kind == SimKind::scaled && s.n < 1) throw Failure{kInvalid, "--n must be a positive integer"};
  cbi_path_config pc{x0.data(), x0.size(), s.horizon, s.dt, s.seed, s.paths, s.record_every, 0};
  cbi_paths* raw = nullptr;
  if (kind == SimKind::base)
    check(cbi_simulate(ctx.params.get(), &pc, &raw));
  else if (kind == SimKind::scaled)
    check(cbi_simulate_scaled(ctx.params.get(), s.n, &pc, &raw));
  else
    check(cbi_simulate_limit(ctx.params.get(), &pc, &raw));
  PathsPtr paths(raw);

  {
    CsvSink sink(c.out);
    write_paths(sink.stream(), raw, kind, d);
    sink.stream().flush();
  }

  std::size_t dim = 0;
  check(cbi_paths_dim(raw, &dim));
  json checks = json::object();
  if (s.paths >= 2) {
    std::vector<double> mean(dim), se(dim), cov(dim * dim);
    check(cbi_paths_terminal_stats(raw, mean.data(), se.data(), cov.data(), nullptr));
    std::vector<double> expected(dim);
    std::vector<double> lambda;
    if (!s.lambda.empty()) lambda = vector_arg(s.lambda, "--lambda", d);
    std::optional<double> laplace_expected;
    std::vector<double> lambda_state = lambda;  // lambda in state coordinates

    if (kind == SimKind::base) {
      check(cbi_mean(ctx.params.get(), x0.data(), x0.size(), s.horizon, c.quad_order, expected.data()));
      if (!lambda.empty()) {
        double v = 0;
        cbi_solver_options o = solver(c, false);
        check(cbi_laplace(ctx.params.get(), s.horizon, x0.data(), lambda.data(), lambda.size(), &o, &v));
        laplace_expected = v;
      }
    } else if (kind == SimKind::scaled) {
      const double n = static_cast<double>(s.n);
      const double steps = std::floor(n * s.horizon + 1e-9);
      std::vector<double> nx(x0);
      for (auto& v : nx) v *= n;
      check(cbi_mean(ctx.params.get(), nx.data(), nx.size(), steps, c.quad_order, expected.data()));
      for (auto& v : expected) v /= n;
      if (!lambda.empty()) {
        std::vector<double> ln(lambda);
        for (auto& v : ln) v /= n;
        double v = 0;
        cbi_solver_options o = solver(c, false);
        check(cbi_laplace(ctx.params.get(), steps, nx.data(), ln.data(), ln.size(), &o, &v));
        laplace_expected = v;
      }
    } else {
      double drift = 0, diffusion = 0;
      std::vector<double> ur(static_cast<std::size_t>(d)), ul(static_cast<std::size_t>(d));
      check(cbi_limit_coefficients(ctx.params.get(), &drift, &diffusion, ur.data(), ul.data()));
      double start = 0;
      for (int i = 0; i < d; ++i) start += ul[static_cast<std::size_t>(i)] * x0[static_cast<std::size_t>(i)];
      const double m = start + drift * s.horizon;
      expected[0] = m;
      for (int i = 0; i < d; ++i) expected[static_cast<std::size_t>(i) + 1] = m * ur[static_cast<std::size_t>(i)];
      if (!lambda.empty()) {
        // Laplace transform of dX = b dt + sqrt(a X) dW: the d = 1 CBI with c = a/2, beta = b.
        double l = 0;
        for (int i = 0; i < d; ++i) l += lambda[static_cast<std::size_t>(i)] * ur[static_cast<std::size_t>(i)];
        const double half = diffusion / 2.0;
        const double den = 1.0 + half * l * s.horizon;
        laplace_expected = std::exp(-start * l / den) * std::pow(den, -drift / half);
        lambda_state.assign(dim, 0.0);
        std::copy(lambda.begin(), lambda.end(), lambda_state.begin() + 1);
      }
    }
    json mean_checks = json::array();
    for (std::size_t k = 0; k < dim; ++k) mean_checks.push_back(check_entry(mean[k], se[k], expected[k]));
    checks["terminal_mean"] = mean_checks;
    if (laplace_expected) {
      double v = 0, lse = 0;
      check(cbi_paths_empirical_laplace(raw, lambda_state.data(), lambda_state.size(), &v, &lse));
      checks["laplace"] = check_entry(v, lse, *laplace_expected);
      checks["laplace"]["lambda"] = lambda;
    }
  }

  const char* name = kind == SimKind::base ? "simulate" : kind == SimKind::scaled ? "simulate-scaled" : "simulate-limit";
  auto cfg = config_json(c, ctx, nullptr);
  cfg["x0"] = x0;
  cfg["horizon"] = s.horizon;
  cfg["dt"] = s.dt;
  cfg["seed"] = s.seed;
  cfg["paths"] = s.paths;
  cfg["record_every"] = s.record_every;
  if (kind == SimKind::scaled) cfg["n"] = s.n;
  if (!s.lambda.empty()) cfg["lambda"] = s.lambda;
  emit_summary({{"command", name}, {"config", cfg}, {"moment_check", checks}}, c.out, s.report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for multi-type continuous-state branching processes with immigration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cbi_version()));

  Common common;
  double t = 1.0;
  std::string x, lambda, n_list = "10,100,1000,10000", report;
  std::int64_t n = 1;
  int grid = 0;
  double critical_tol = 1e-9;
  BumpArgs bump;
  SimArgs sim;

  auto* validate = app.add_subcommand("validate", "check admissibility and moment conditions");
  add_common(validate, common, false);

  auto* derive = app.add_subcommand("derive", "effective drift, covariances, spectrum and Perron pair");
  add_common(derive, common, false);
  derive->add_option("--critical-tol", critical_tol, "criticality tolerance on the spectral abscissa");

  auto* vsolve = app.add_subcommand("vsolve", "solve the Riccati system for v(t, lambda)");
  add_common(vsolve, common, true);
  vsolve->add_option("--t", t)->required();
  vsolve->add_option("--lambda", lambda)->required();
  vsolve->add_option("--grid", grid, "also report v on this many uniform intervals")->check(CLI::NonNegativeNumber);

  auto* laplace = app.add_subcommand("laplace", "transition Laplace transform");
  add_common(laplace, common, true);
  laplace->add_option("--t", t)->required();
  laplace->add_option("--x", x)->required();
  laplace->add_option("--lambda", lambda)->required();

  auto* dgen = app.add_subcommand("dgen", "discrete generator on an exponential test function");
  add_common(dgen, common, true);
  dgen->add_option("--n", n)->required();
  dgen->add_option("--x", x)->required();
  dgen->add_option("--lambda", lambda)->required();

  auto* prop31 = app.add_subcommand("prop31", "corrected discrete generator sequence (CSV)");
  add_common(prop31, common, true);
  prop31->add_option("--x", x)->required();
  prop31->add_option("--lambda", lambda)->required();
  prop31->add_option("--n-list", n_list);
  prop31->add_option("--report", report, "JSON summary path");

  auto* cgen = app.add_subcommand("cgen", "scaled generator sweep on a bump test function (CSV)");
  add_common(cgen, common, false);
  cgen->add_option("--x", x)->required();
  cgen->add_option("--n-list", n_list);
  cgen->add_option("--center", bump.center, "bump center (default: x shifted by 0.25/sqrt(d) per coordinate)");
  cgen->add_option("--radius", bump.radius)->check(CLI::PositiveNumber);
  cgen->add_option("--amplitude", bump.amplitude);
  cgen->add_option("--report", report, "JSON summary path");

  auto add_sim = [&](CLI::App* cmd) {
    add_common(cmd, common, true);
    cmd->add_option("--x", sim.x0, "initial state (default 0)");
    cmd->add_option("--t", sim.horizon, "horizon")->check(CLI::PositiveNumber);
    cmd->add_option("--dt", sim.dt, "time step")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", sim.seed);
    cmd->add_option("--paths", sim.paths)->check(CLI::PositiveNumber);
    cmd->add_option("--record-every", sim.record_every, "record every k-th step (0: endpoints only)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda", sim.lambda, "probe for the empirical Laplace transform");
    cmd->add_option("--report", sim.report, "JSON summary path");
  };
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths of X (CSV)");
  add_sim(simulate);
  auto* simulate_scaled = app.add_subcommand("simulate-scaled", "paths of n^-1 X_floor(nt) (CSV)");
  add_sim(simulate_scaled);
  simulate_scaled->add_option("--n", sim.n)->check(CLI::PositiveNumber);
  auto* simulate_limit = app.add_subcommand("simulate-limit", "paths of the limiting diffusion on the Perron ray (CSV)");
  add_sim(simulate_limit);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
    if (!known) {
      std::cerr << "error: unknown command '" << argv[1] << "'\nRun with --help for more information.\n";
      return kUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(common);
    if (*derive) return cmd_derive(common, critical_tol);
    if (*vsolve) return cmd_vsolve(common, t, lambda, grid);
    if (*laplace) return cmd_laplace(common, t, x, lambda);
    if (*dgen) return cmd_dgen(common, n, x, lambda);
    if (*prop31) return cmd_prop31(common, x, lambda, n_list, report);
    if (*cgen) return cmd_cgen(common, x, n_list, bump, report);
    if (*simulate) return cmd_simulate(common, sim, SimKind::base);
    if (*simulate_scaled) return cmd_simulate(common, sim, SimKind::scaled);
    if (*simulate_limit) return cmd_simulate(common, sim, SimKind::limit);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
