#include "cbi/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "cbi/error.hpp"
#include "cbi/matops.hpp"
#include "cbi/moments.hpp"

namespace cbi {

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32)};
  return std::mt19937_64(seq);
}

namespace {

// Discrete jump law of a finite atomic measure.
struct JumpLaw {
  double mass = 0.0;
  std::vector<double> cumulative;  // normalized, last entry == 1
  std::vector<Vector> points;

  explicit JumpLaw(const JumpMeasure& m) {
    for (const auto& a : m.atoms()) {
      mass += a.weight;
      cumulative.push_back(mass);
      points.push_back(a.point);
    }
    for (auto& c : cumulative) c /= mass;
  }
  const Vector& draw(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), points.size() - 1);
    return points[k];
  }
};

int poisson(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  if (mean > 30.0) return std::poisson_distribution<int>(mean)(rng);
  // inversion; mean is small for the step sizes in use
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double p = std::exp(-mean), cdf = p;
  int k = 0;
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

class Stepper {
 public:
  explicit Stepper(const CbiParams& p) : p_(p), nu_(p.nu) {
    comp_ = Vector::Zero(p.d);
    for (int i = 0; i < p.d; ++i) {
      mu_.emplace_back(p.mu[i]);
      comp_(i) = p.mu[i].integrate([i](const Vector& z) { return std::min(1.0, z(i)); });
    }
  }

  // One Euler step of length dt from x (componentwise >= 0) at time t.
  void step(Vector& x, double t, double dt, std::mt19937_64& rng, std::vector<JumpEvent>* log) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Vector drift = p_.beta + p_.B * x - comp_.cwiseProduct(x);
    Vector next = x + dt * drift;
    const double sq = std::sqrt(dt);
    for (int i = 0; i < p_.d; ++i) {
      const double noise = gauss(rng);
      next(i) += std::sqrt(2.0 * p_.c(i) * x(i)) * sq * noise;
    }
    std::uniform_real_distribution<double> when(0.0, dt);
    if (nu_.mass > 0.0) {
      const int k = poisson(nu_.mass * dt, rng);
      for (int j = 0; j < k; ++j) {
        const Vector& z = nu_.draw(rng);
        next += z;
        if (log) log->push_back({t + when(rng), -1, z});
      }
    }
    for (int i = 0; i < p_.d; ++i) {
      if (mu_[i].mass <= 0.0 || x(i) <= 0.0) continue;
      const int k = poisson(x(i) * mu_[i].mass * dt, rng);
      for (int j = 0; j < k; ++j) {
        const Vector& z = mu_[i].draw(rng);
        next += z;
        if (log) log->push_back({t + when(rng), i, z});
      }
    }
    if (!next.allFinite()) throw Error(Errc::numeric_range, "simulate: state became non-finite");
    x = next.cwiseMax(0.0);
  }

 private:
  const CbiParams& p_;
  JumpLaw nu_;
  std::vector<JumpLaw> mu_;
  Vector comp_;
};

void check_config(const CbiParams& p, const PathConfig& cfg) {
  if (cfg.x0.size() != p.d) throw Error(Errc::dimension_mismatch, "simulate: x0 must have length d");
  if (!cfg.x0.allFinite() || (cfg.x0.array() < 0.0).any())
    throw Error(Errc::invalid_argument, "simulate: x0 must be componentwise >= 0");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(Errc::invalid_argument, "simulate: dt must be > 0");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
    throw Error(Errc::invalid_argument, "simulate: horizon must be > 0");
  if (!(cfg.dt < cfg.horizon)) throw Error(Errc::invalid_argument, "simulate: dt must be smaller than the horizon");
  if (cfg.n_paths < 1) throw Error(Errc::invalid_argument, "simulate: n_paths must be >= 1");
  if (cfg.record_every < 0) throw Error(Errc::invalid_argument, "simulate: record_every must be >= 0");
}

std::vector<long> recorded_steps(long steps, int every) {
  std::vector<long> out;
  if (every == 0) {
    out = {0, steps};
  } else {
    for (long k = 0; k < steps; k += every) out.push_back(k);
    out.push_back(steps);
  }
  return out;
}

// Runs one path over `steps` steps of size dt, recording the listed steps.
SamplePath run_path(const Stepper& stepper, const Vector& x0, long steps, double dt, const std::vector<long>& rec,
                    std::mt19937_64& rng, bool record_jumps) {
  SamplePath path;
  path.states.resize(static_cast<Eigen::Index>(rec.size()), x0.size());
  path.times.reserve(rec.size());
  Vector x = x0;
  std::size_t r = 0;
  for (long k = 0; k <= steps; ++k) {
    if (r < rec.size() && rec[r] == k) {
      path.times.push_back(static_cast<double>(k) * dt);
      path.states.row(static_cast<Eigen::Index>(r)) = x.transpose();
      ++r;
    }
    if (k == steps) break;
    stepper.step(x, static_cast<double>(k) * dt, dt, rng, record_jumps ? &path.jumps : nullptr);
  }
  return path;
}

}  // namespace

std::vector<SamplePath> simulate_cbi(const CbiParams& p, const PathConfig& cfg) {
  require_admissible(p);
  check_config(p, cfg);
  const long steps = static_cast<long>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
  const double dt = cfg.horizon / static_cast<double>(steps);
  const auto rec = recorded_steps(steps, cfg.record_every);
  const Stepper stepper(p);
  std::vector<SamplePath> out;
  out.reserve(static_cast<std::size_t>(cfg.n_paths));
  for (int k = 0; k < cfg.n_paths; ++k) {
    auto rng = path_engine(cfg.seed, static_cast<std::uint64_t>(k));
    out.push_back(run_path(stepper, cfg.x0, steps, dt, rec, rng, cfg.record_jumps));
  }
  return out;
}

std::vector<SamplePath> simulate_scaled_step(const CbiParams& p, std::int64_t n, const PathConfig& cfg) {
  require_admissible(p);
  check_config(p, cfg);
  if (n < 1) throw Error(Errc::invalid_argument, "simulate_scaled_step: n must be >= 1");
  const double nn = static_cast<double>(n);
  const long per_unit = static_cast<long>(std::ceil(1.0 / cfg.dt - 1e-9));
  const double dt = 1.0 / static_cast<double>(per_unit);
  const long units = static_cast<long>(std::floor(nn * cfg.horizon + 1e-9));
  const long steps = units * per_unit;
  std::vector<long> rec;
  for (long k = 0; k <= units; ++k) rec.push_back(k * per_unit);

  const Stepper stepper(p);
  const Vector x0 = nn * cfg.x0;
  std::vector<SamplePath> out;
  out.reserve(static_cast<std::size_t>(cfg.n_paths));
  for (int k = 0; k < cfg.n_paths; ++k) {
    auto rng = path_engine(cfg.seed, static_cast<std::uint64_t>(k));
    SamplePath base = run_path(stepper, x0, steps, dt, rec, rng, cfg.record_jumps);
    for (auto& t : base.times) t /= nn;  // integer time j maps to j/n
    base.states /= nn;
    for (auto& j : base.jumps) {
      j.time /= nn;
      j.jump /= nn;
    }
    out.push_back(std::move(base));
  }
  return out;
}

LimitCoefficients limit_coefficients(const CbiParams& p) {
  const auto dq = derive(p);
  if (dq.classification != Criticality::critical)
    throw Error(Errc::classification,
                "limit diffusion requires a critical irreducible process; classification is " +
                    to_string(dq.classification));
  const auto& pp = *dq.perron;
  return LimitCoefficients{pp.u_left.dot(dq.beta_tilde), (*dq.cbar * pp.u_left).dot(pp.u_left), pp.u_right,
                           pp.u_left};
}

std::vector<LimitPath> simulate_limit_diffusion(const CbiParams& p, const PathConfig& cfg) {
  check_config(p, cfg);
  const auto co = limit_coefficients(p);
  const long steps = static_cast<long>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
  const double dt = cfg.horizon / static_cast<double>(steps);
  const double sq = std::sqrt(dt);
  const auto rec = recorded_steps(steps, cfg.record_every);
  const double start = co.u_left.dot(cfg.x0);

  std::vector<LimitPath> out;
  out.reserve(static_cast<std::size_t>(cfg.n_paths));
  for (int k = 0; k < cfg.n_paths; ++k) {
    auto rng = path_engine(cfg.seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> gauss(0.0, 1.0);
    LimitPath path;
    path.ray.resize(static_cast<Eigen::Index>(rec.size()), p.d);
    double x = start;
    std::size_t r = 0;
    for (long s = 0; s <= steps; ++s) {
      if (r < rec.size() && rec[r] == s) {
        path.times.push_back(static_cast<double>(s) * dt);
        path.scalar.push_back(x);
        path.ray.row(static_cast<Eigen::Index>(r)) = (x * co.u_right).transpose();
        ++r;
      }
      if (s == steps) break;
      const double xp = std::max(x, 0.0);
      x = std::max(0.0, x + co.drift * dt + std::sqrt(co.diffusion * xp) * sq * gauss(rng));
    }
    out.push_back(std::move(path));
  }
  return out;
}

TerminalStats terminal_stats(const std::vector<SamplePath>& paths) {
  if (paths.size() < 2) throw Error(Errc::invalid_argument, "terminal_stats: need at least two paths");
  const Eigen::Index d = paths.front().states.cols();
  const double n = static_cast<double>(paths.size());
  StateMatrix last(static_cast<Eigen::Index>(paths.size()), d);
  for (std::size_t k = 0; k < paths.size(); ++k)
    last.row(static_cast<Eigen::Index>(k)) = paths[k].states.row(paths[k].states.rows() - 1);

  TerminalStats st;
  st.count = static_cast<int>(paths.size());
  st.mean = last.colwise().mean().transpose();
  const StateMatrix centered = last.rowwise() - st.mean.transpose();
  st.covariance = (centered.transpose() * centered) / (n - 1.0);
  st.mean_se = (st.covariance.diagonal() / n).cwiseSqrt();
  st.covariance_se = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Vector y = centered.col(i).cwiseProduct(centered.col(j));
      const double m = y.mean();
      st.covariance_se(i, j) = std::sqrt((y.array() - m).square().sum() / (n - 1.0) / n);
    }
  return st;
}

EmpiricalValue empirical_laplace(const std::vector<SamplePath>& paths, const Vector& lambda) {
  if (paths.size() < 2) throw Error(Errc::invalid_argument, "empirical_laplace: need at least two paths");
  const double n = static_cast<double>(paths.size());
  double s = 0.0, s2 = 0.0;
  for (const auto& path : paths) {
    const Vector xt = path.states.row(path.states.rows() - 1).transpose();
    if (xt.size() != lambda.size()) throw Error(Errc::dimension_mismatch, "empirical_laplace: lambda length");
    const double v = std::exp(-lambda.dot(xt));
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  const double var = std::max(0.0, (s2 - n * m * m) / (n - 1.0));
  return {m, std::sqrt(var / n)};
}

}  // namespace cbi
