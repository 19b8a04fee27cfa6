#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the method's 4th-order
// continuous extension for dense output.

#include <functional>
#include <vector>

#include "cbi/types.hpp"

namespace cbi {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 2'000'000;
  /// Clip negative components to zero after every accepted step. The clipped
  /// amount is accumulated and the run fails if it exceeds `max_clip`.
  bool nonnegative = false;
  double max_clip = 1e-8;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  long clip_events = 0;
  double clipped_total = 0.0;
  double max_error_estimate = 0.0;  // largest scaled local error among accepted steps
};

/// y' = f(t, y), writing the derivative into the third argument.
using OdeRhs = std::function<void(double, const Vector&, Vector&)>;

class DenseSolution {
 public:
  double t_begin() const noexcept { return t0_; }
  double t_end() const noexcept { return t1_; }
  const Vector& final_state() const noexcept { return y_end_; }
  const OdeStats& stats() const noexcept { return stats_; }

  /// State at t in [t_begin, t_end]; arguments outside are clamped.
  Vector operator()(double t) const;

 private:
  friend DenseSolution dopri5(const OdeRhs&, const Vector&, double, double, const OdeOptions&);

  struct Segment {
    double t0, h;
    Vector r1, r2, r3, r4, r5;
  };
  double t0_ = 0.0, t1_ = 0.0;
  Vector y0_, y_end_;
  std::vector<Segment> segments_;
  OdeStats stats_;
  bool nonnegative_ = false;
};

/// Integrates from t0 to t1 >= t0. Throws Errc::solver_failure on step-size
/// underflow, non-finite state, step budget exhaustion, or excessive clipping.
DenseSolution dopri5(const OdeRhs& f, const Vector& y0, double t0, double t1, const OdeOptions& opts = {});

}  // namespace cbi
