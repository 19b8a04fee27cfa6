#include "doctest.h"
#include "fixtures.hpp"

#include "cbi/error.hpp"
#include "cbi/matops.hpp"
#include "cbi/moments.hpp"
#include "cbi/simulate.hpp"

using namespace cbi;
using namespace fixtures;

namespace {

PathConfig config(const Vector& x0, int paths, double horizon = 1.0, double dt = 1e-2, std::uint64_t seed = 7) {
  PathConfig cfg;
  cfg.x0 = x0;
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.seed = seed;
  cfg.n_paths = paths;
  return cfg;
}

}  // namespace

TEST_CASE("same seed gives identical paths") {
  const auto cfg = config(vec({1.0, 0.5}), 5);
  const auto a = simulate_cbi(jump2(), cfg);
  const auto b = simulate_cbi(jump2(), cfg);
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].states == b[k].states);
    CHECK(a[k].jumps.size() == b[k].jumps.size());
  }
  // path k does not depend on how many paths are drawn
  auto fewer = cfg;
  fewer.n_paths = 2;
  CHECK(simulate_cbi(jump2(), fewer)[1].states == a[1].states);
  auto other = cfg;
  other.seed = 8;
  CHECK(simulate_cbi(jump2(), other)[0].states != a[0].states);
}

TEST_CASE("recorded grid") {
  auto cfg = config(vec({1.0}), 1, 1.0, 0.1);
  cfg.record_every = 3;
  const auto p = simulate_cbi(fix_a(), cfg)[0];
  REQUIRE(p.times.size() == 5);
  CHECK(p.times.front() == 0.0);
  CHECK(p.times[1] == doctest::Approx(0.3));
  CHECK(p.times.back() == doctest::Approx(1.0));
  CHECK(p.states(0, 0) == 1.0);
  cfg.record_every = 0;
  CHECK(simulate_cbi(fix_a(), cfg)[0].times.size() == 2);
}

TEST_CASE("process without noise, drift or immigration stays put") {
  const auto p = scalar(0.0, 0.0, 0.0);
  const auto paths = simulate_cbi(p, config(vec({2.5}), 3));
  for (const auto& path : paths) CHECK((path.states.array() == 2.5).all());
  const auto zero = simulate_cbi(crit2(), config(Vector::Zero(2), 1));
  CHECK(zero[0].states.row(zero[0].states.rows() - 1).sum() > 0.0);  // immigration moves it off 0
}

TEST_CASE("paths stay nonnegative") {
  auto p = scalar(5.0, 0.0, -3.0);
  const auto paths = simulate_cbi(p, config(vec({0.05}), 50, 2.0, 0.05));
  for (const auto& path : paths) CHECK((path.states.array() >= 0.0).all());
  const auto j = simulate_cbi(jump2(), config(vec({0.01, 0.01}), 50, 1.0, 0.05));
  for (const auto& path : j) CHECK((path.states.array() >= 0.0).all());
}

TEST_CASE("jump log matches the state increments") {
  auto p = scalar(0.0, 0.0, 0.0);
  p.nu = atoms({{3.0, vec({1.0})}});
  const auto paths = simulate_cbi(p, config(vec({0.0}), 20, 2.0, 0.01));
  for (const auto& path : paths) {
    double sum = 0.0;
    for (const auto& j : path.jumps) {
      CHECK(j.source == -1);
      CHECK(j.jump(0) == 1.0);
      sum += 1.0;
    }
    CHECK(path.states(path.states.rows() - 1, 0) == doctest::Approx(sum));
  }
}

TEST_CASE("scaled process with n = 1 is the base process at integer times") {
  auto cfg = config(vec({1.0, 0.5}), 3, 3.0, 0.01);
  const auto scaled = simulate_scaled_step(jump2(), 1, cfg);
  cfg.record_every = 100;
  const auto base = simulate_cbi(jump2(), cfg);
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    REQUIRE(scaled[k].times.size() == 4);
    CHECK(scaled[k].states == base[k].states);
  }
}

TEST_CASE("scaled process means") {
  // E[X_{nT}/n | X_0 = n x0]
  auto cfg = config(vec({1.0}), 400, 1.0, 0.05, 11);
  const std::int64_t n = 20;
  const auto stats = terminal_stats(simulate_scaled_step(fix_a(), n, cfg));
  const double expected = mean(fix_a(), vec({20.0}), 20.0)(0) / 20.0;
  CHECK(std::abs(stats.mean(0) - expected) < 4 * stats.mean_se(0));
}

TEST_CASE("critical two-type scaled process concentrates on the Perron ray") {
  auto cfg = config(vec({1.0, 0.0}), 200, 1.0, 0.02, 12);
  const auto stats = terminal_stats(simulate_scaled_step(crit2(), 100, cfg));
  const Vector ray = vec({1.0, 1.0}).normalized();
  const double cosine = stats.mean.normalized().dot(ray);
  CHECK(std::acos(std::min(1.0, cosine)) * 180.0 / M_PI < 5.0);
}

TEST_CASE("limit diffusion coefficients") {
  const auto co = limit_coefficients(crit2());
  // u_right = (1,1)/sqrt2 scaled so <u_left,u_right> = 1
  CHECK(co.u_left.dot(co.u_right) == doctest::Approx(1.0));
  CHECK(co.drift == doctest::Approx(co.u_left.dot(crit2().beta)));
  const Matrix cbar = 2.0 * Matrix(co.u_right.asDiagonal());
  CHECK(co.diffusion == doctest::Approx(co.u_left.dot(cbar * co.u_left)));

  const auto j = limit_coefficients(jump1());
  CHECK(j.u_right(0) * j.u_left(0) == doctest::Approx(1.0));
  // btilde = 0, beta~ = 0.5 + 0.5 = 1, C = 2 * 0.5 + 1 * 4 = 5
  CHECK(j.drift == doctest::Approx(j.u_left(0) * 1.0));
  CHECK(j.diffusion == doctest::Approx(5.0 * j.u_right(0) * j.u_left(0) * j.u_left(0)));

  CHECK_THROWS_AS(limit_coefficients(jump2()), Error);
  try {
    limit_coefficients(scalar(1.0, 1.0, 0.5));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::classification);
  }
}

TEST_CASE("limit diffusion paths") {
  auto p = crit2();
  p.beta = Vector::Zero(2);
  const auto zero = simulate_limit_diffusion(p, config(Vector::Zero(2), 3));
  for (const auto& path : zero) {
    for (double x : path.scalar) CHECK(x == 0.0);
    CHECK(path.ray.isZero());
  }
  const auto paths = simulate_limit_diffusion(crit2(), config(vec({1.0, 0.0}), 4));
  const auto co = limit_coefficients(crit2());
  for (const auto& path : paths) {
    CHECK(path.scalar.front() == doctest::Approx(co.u_left(0)));
    for (std::size_t r = 0; r < path.scalar.size(); ++r) {
      CHECK(path.scalar[r] >= 0.0);
      const Vector row = path.ray.row(static_cast<Eigen::Index>(r)).transpose();
      CHECK((row - path.scalar[r] * co.u_right).cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + path.scalar[r]));
    }
  }
  const auto mc = simulate_limit_diffusion(crit2(), config(vec({1.0, 0.0}), 2000, 1.0, 1e-2, 5));
  double m = 0.0;
  for (const auto& path : mc) m += path.scalar.back();
  m /= 2000.0;
  const double expected = co.u_left(0) + co.drift;
  const double sd = std::sqrt(co.diffusion * (co.u_left(0) + 0.5 * co.drift));  // var at t=1
  CHECK(std::abs(m - expected) < 4 * sd / std::sqrt(2000.0));
}

TEST_CASE("halving the step size moves the moments by less than sampling noise") {
  const auto p = jump2();
  const Vector x0 = vec({1.0, 0.5});
  auto coarse = config(x0, 4000, 1.0, 0.02, 99);
  auto fine = coarse;
  fine.dt = 0.01;
  fine.seed = 100;
  const auto a = terminal_stats(simulate_cbi(p, coarse));
  const auto b = terminal_stats(simulate_cbi(p, fine));
  for (int i = 0; i < 2; ++i) {
    const double se = std::hypot(a.mean_se(i), b.mean_se(i));
    CHECK(std::abs(a.mean(i) - b.mean(i)) < 3 * se);
  }
}

TEST_CASE("summary statistics") {
  SamplePath a, b;
  a.times = b.times = {0.0, 1.0};
  a.states.resize(2, 1);
  b.states.resize(2, 1);
  a.states << 0.0, 1.0;
  b.states << 0.0, 3.0;
  const auto s = terminal_stats({a, b});
  CHECK(s.count == 2);
  CHECK(s.mean(0) == 2.0);
  CHECK(s.covariance(0, 0) == doctest::Approx(2.0));
  CHECK(s.mean_se(0) == doctest::Approx(1.0));
  const auto l = empirical_laplace({a, b}, vec({1.0}));
  CHECK(l.value == doctest::Approx(0.5 * (std::exp(-1.0) + std::exp(-3.0))));
  CHECK_THROWS_AS(terminal_stats({a}), Error);
}

TEST_CASE("configuration errors") {
  const auto p = fix_a();
  auto cfg = config(vec({1.0}), 1);
  auto bad = cfg;
  bad.x0 = vec({1.0, 1.0});
  CHECK_THROWS_AS(simulate_cbi(p, bad), Error);
  bad = cfg;
  bad.x0 = vec({-1.0});
  CHECK_THROWS_AS(simulate_cbi(p, bad), Error);
  bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS_AS(simulate_cbi(p, bad), Error);
  bad = cfg;
  bad.n_paths = 0;
  CHECK_THROWS_AS(simulate_cbi(p, bad), Error);
  CHECK_THROWS_AS(simulate_scaled_step(p, 0, cfg), Error);
  auto inadmissible = crit2();
  inadmissible.B(0, 1) = -1.0;
  CHECK_THROWS_AS(simulate_cbi(inadmissible, config(vec({1.0, 1.0}), 1)), Error);
}
