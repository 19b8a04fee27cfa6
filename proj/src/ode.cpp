#include "cbi/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbi/error.hpp"

namespace cbi {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double scaled_norm(const Vector& e, const Vector& ya, const Vector& yb, const OdeOptions& o) {
  if (e.size() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double sk = o.atol + o.rtol * std::max(std::abs(ya(i)), std::abs(yb(i)));
    const double r = e(i) / sk;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(e.size()));
}

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::solver_failure, "dopri5: " + msg); }

}  // namespace

Vector DenseSolution::operator()(double t) const {
  if (segments_.empty() || t <= t0_) return y0_;
  if (t >= t1_) return y_end_;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t0; });
  const Segment& s = *std::prev(it);
  const double th = (t - s.t0) / s.h, th1 = 1.0 - th;
  Vector y = s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
  if (nonnegative_) y = y.cwiseMax(0.0);
  return y;
}

DenseSolution dopri5(const OdeRhs& f, const Vector& y0, double t0, double t1, const OdeOptions& o) {
  if (!(t1 >= t0)) fail("integration interval must satisfy t1 >= t0");
  if (!(o.rtol > 0.0) || !(o.atol > 0.0)) fail("tolerances must be positive");
  if (!y0.allFinite()) fail("initial state is not finite");

  DenseSolution sol;
  sol.t0_ = t0;
  sol.t1_ = t1;
  sol.y0_ = y0;
  sol.y_end_ = y0;
  sol.nonnegative_ = o.nonnegative;
  if (t1 == t0) return sol;

  const Eigen::Index n = y0.size();
  auto& st = sol.stats_;
  Vector y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  auto rhs = [&](double t, const Vector& yy, Vector& out) {
    f(t, yy, out);
    ++st.rhs_evals;
  };

  double t = t0;
  rhs(t, y, k1);

  // initial step (Hairer-Norsett-Wanner heuristic)
  double h;
  {
    const Vector zero = Vector::Zero(n);
    const double dn0 = scaled_norm(y, y, zero, o), dn1 = scaled_norm(k1, y, zero, o);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, t1 - t0);
    ytmp = y + h0 * k1;
    rhs(t + h0, ytmp, k2);
    const double dn2 = scaled_norm(k2 - k1, y, zero, o) / h0;
    const double m = std::max(dn1, dn2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min({100.0 * h0, h1, t1 - t0});
  }

  bool last_rejected = false;
  while (t < t1) {
    if (st.accepted + st.rejected >= o.max_steps) fail("step budget exhausted");
    if (h < 1e-14 * std::max(1.0, std::abs(t))) fail("step size underflow at t = " + std::to_string(t));
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    ytmp = y + h * a21 * k1;
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);

    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = scaled_norm(err, y, ynew, o);
    if (!std::isfinite(en) || !ynew.allFinite()) {
      ++st.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }

    if (en <= 1.0) {
      ++st.accepted;
      st.max_error_estimate = std::max(st.max_error_estimate, en);
      DenseSolution::Segment seg;
      seg.t0 = t;
      seg.h = h;
      seg.r1 = y;
      seg.r2 = ynew - y;
      seg.r3 = h * k1 - seg.r2;
      seg.r4 = seg.r2 - h * k7 - seg.r3;
      seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.segments_.push_back(std::move(seg));

      t = final_step ? t1 : t + h;
      y = ynew;
      k1 = k7;
      if (o.nonnegative && (y.array() < 0.0).any()) {
        for (Eigen::Index i = 0; i < n; ++i)
          if (y(i) < 0.0) {
            st.clipped_total += -y(i);
            ++st.clip_events;
            y(i) = 0.0;
          }
        if (st.clipped_total > o.max_clip)
          fail("cumulative negative clipping " + std::to_string(st.clipped_total) + " exceeds limit");
        rhs(t, y, k1);
      }
      double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      last_rejected = false;
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  sol.y_end_ = y;
  return sol;
}

}  // namespace cbi
