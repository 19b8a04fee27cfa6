#pragma once

// Seeded Monte Carlo for CBI paths (Euler-Maruyama with full truncation plus
// compound Poisson jumps), the scaled step process n^{-1} X_{floor(nt)}, and
// the limiting squared-Bessel diffusion on the Perron ray.

#include <cstdint>
#include <random>
#include <vector>

#include "cbi/model.hpp"

namespace cbi {

using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PathConfig {
  Vector x0;
  double horizon = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  int n_paths = 1;
  /// Record every k-th grid point (the final point is always recorded);
  /// 0 records only the start and the end.
  int record_every = 1;
  bool record_jumps = true;
};

struct JumpEvent {
  double time;
  int source;  // -1 immigration, i >= 0 branching from type i (0-based)
  Vector jump;
};

struct SamplePath {
  std::vector<double> times;
  StateMatrix states;  // one row per recorded time
  std::vector<JumpEvent> jumps;
};

struct LimitPath {
  std::vector<double> times;
  std::vector<double> scalar;  // the one-dimensional diffusion
  StateMatrix ray;             // scalar * u_right
};

/// Per-path generator: mt19937_64 seeded from (seed, path index) through
/// std::seed_seq, so path k is the same no matter how many paths are drawn.
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path_index);

std::vector<SamplePath> simulate_cbi(const CbiParams& params, const PathConfig& cfg);

/// Simulates X on [0, n T] from X_0 = n x0 and emits t -> X_{floor(nt)} / n at
/// the jump times t = k/n of the step function. The base step is 1/ceil(1/dt)
/// so integer times lie on the grid.
std::vector<SamplePath> simulate_scaled_step(const CbiParams& params, std::int64_t n, const PathConfig& cfg);

/// Coefficients of dX = drift dt + sqrt(diffusion X^+) dW.
struct LimitCoefficients {
  double drift;      // <u_left, beta~>
  double diffusion;  // <Cbar u_left, u_left>
  Vector u_right;
  Vector u_left;
};
/// Throws Errc::classification unless the process is critical and irreducible.
LimitCoefficients limit_coefficients(const CbiParams& params);

/// Starts at <u_left, x0> (0 for the canonical x0 = 0).
std::vector<LimitPath> simulate_limit_diffusion(const CbiParams& params, const PathConfig& cfg);

struct TerminalStats {
  Vector mean;
  Vector mean_se;
  Matrix covariance;
  Matrix covariance_se;  // standard error of each sample covariance entry
  int count = 0;
};
/// Sample moments of the last recorded state of each path.
TerminalStats terminal_stats(const std::vector<SamplePath>& paths);

struct EmpiricalValue {
  double value;
  double se;
};
/// Sample mean of exp(-<lambda, X_T>) with its standard error.
EmpiricalValue empirical_laplace(const std::vector<SamplePath>& paths, const Vector& lambda);

}  // namespace cbi
