#include "doctest.h"
#include "fixtures.hpp"

#include "cbi/error.hpp"
#include "cbi/moments.hpp"

using namespace cbi;
using namespace fixtures;

namespace {

const double e2 = std::exp(-2.0);

// Second-moment ODE for the pure branching process:
//   S' = Bt S + S Bt^T + sum_l (e^{t Bt} z)_l C_l,  S(0) = 0,
// integrated with classical RK4 on a fine fixed grid.
Matrix covariance_ode(const CbiParams& p, const Vector& z, double t, int steps = 4000) {
  const Matrix bt = effective_drift(p);
  const auto cs = branching_covariances(p);
  auto rhs = [&](double s, const Matrix& S) {
    const Vector m = mat_exp(bt, s) * z;
    Matrix out = bt * S + S * bt.transpose();
    for (int l = 0; l < p.d; ++l) out += m(l) * cs[l];
    return out;
  };
  Matrix S = Matrix::Zero(p.d, p.d);
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = k * h;
    const Matrix k1 = rhs(s, S);
    const Matrix k2 = rhs(s + h / 2, S + h / 2 * k1);
    const Matrix k3 = rhs(s + h / 2, S + h / 2 * k2);
    const Matrix k4 = rhs(s + h, S + h * k3);
    S += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return S;
}

}  // namespace

TEST_CASE("without jumps the effective quantities are the raw parameters") {
  const auto dq = derive(crit2());
  CHECK(dq.btilde.isApprox(crit2().B));
  CHECK(dq.beta_tilde.isApprox(crit2().beta));
  REQUIRE(dq.big_c.size() == 2);
  CHECK(dq.big_c[0].isApprox(mat2(2, 0, 0, 0)));
  CHECK(dq.big_c[1].isApprox(mat2(0, 0, 0, 2)));
  CHECK(dq.classification == Criticality::critical);
  REQUIRE(dq.cbar);
  CHECK(dq.cbar->isApprox(Matrix::Identity(2, 2), 1e-12));
  REQUIRE(dq.perron);
  CHECK(dq.perron->u_right.isApprox(vec({0.5, 0.5}), 1e-12));
}

TEST_CASE("a branching atom shifts the effective drift") {
  auto p = scalar(0.0, 0.0, -1.0);
  p.mu[0] = atoms({{1.0, vec({2.0})}});
  const auto dq = derive(p);
  CHECK(std::abs(dq.btilde(0, 0)) < 1e-15);
  CHECK(dq.classification == Criticality::critical);
}

TEST_CASE("jump fixture derived quantities") {
  const auto dq = derive(jump1());
  CHECK(dq.btilde(0, 0) == doctest::Approx(0.0));
  CHECK(dq.beta_tilde(0) == doctest::Approx(1.0));   // 0.5 + 0.5 * 1
  CHECK(dq.big_c[0](0, 0) == doctest::Approx(5.0));  // 2 * 0.5 + 1 * 4
  REQUIRE(dq.cbar);
  CHECK((*dq.cbar)(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("effective drift entries by hand") {
  const auto p = jump2();
  const Matrix bt = effective_drift(p);
  // mu_1 atoms (0.6 at (0.5,1)), (0.1 at (3,0)); mu_2 atom (0.4 at (0.2,0.3))
  CHECK(bt(0, 0) == doctest::Approx(-1.5 + 0.1 * 2.0));
  CHECK(bt(1, 0) == doctest::Approx(0.3 + 0.6 * 1.0));
  CHECK(bt(0, 1) == doctest::Approx(0.4 + 0.4 * 0.2));
  CHECK(bt(1, 1) == doctest::Approx(-0.8));
  const Vector bb = effective_immigration(p);
  CHECK(bb(0) == doctest::Approx(0.2 + 0.3));
  CHECK(bb(1) == doctest::Approx(0.4 + 0.3 * 0.5 + 0.2 * 2.0));
  const auto cs = branching_covariances(p);
  CHECK(cs[0](0, 0) == doctest::Approx(0.6 + 0.6 * 0.25 + 0.1 * 9.0));
  CHECK(cs[0](0, 1) == doctest::Approx(0.6 * 0.5));
  CHECK(cs[1](1, 1) == doctest::Approx(1.4 + 0.4 * 0.09));
}

TEST_CASE("derived-quantity invariants on all fixtures") {
  for (const auto& p : all()) {
    const auto dq = derive(p);
    CHECK(is_essentially_nonnegative(dq.btilde));
    CHECK(dq.beta_tilde.minCoeff() >= 0.0);
    for (const auto& c : dq.big_c) {
      CHECK(c.isApprox(c.transpose()));
      Eigen::SelfAdjointEigenSolver<Matrix> es(c);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }
    CHECK(dq.cbar.has_value() == (dq.classification == Criticality::critical));
  }
}

TEST_CASE("classification") {
  CHECK(derive(scalar(1, 0, -1)).classification == Criticality::subcritical);
  CHECK(derive(scalar(1, 0, 0.5)).classification == Criticality::supercritical);
  CHECK(derive(jump2()).classification == Criticality::subcritical);
  auto red = crit2();
  red.B = mat2(0, 1, 0, 0);
  CHECK(derive(red).classification == Criticality::not_irreducible);
  CHECK(to_string(Criticality::not_irreducible) == "not-irreducible");
}

TEST_CASE("classification ignores immigration") {
  for (auto p : all()) {
    const auto before = derive(p).classification;
    p.beta = Vector::Constant(p.d, 3.0);
    p.nu = atoms({{2.0, Vector::Constant(p.d, 1.5)}});
    CHECK(derive(p).classification == before);
  }
}

TEST_CASE("first moment") {
  CHECK(mean(crit2(), vec({0.3, 0.9}), 0.0).isApprox(vec({0.3, 0.9})));
  CHECK(mean(fix_a(), vec({2.0}), 3.0)(0) == doctest::Approx(5.0).epsilon(1e-14));
  // e^{Bt}(1,0) + int_0^1 e^{uBt}(1,0) du, both in closed form
  const Vector m = mean(crit2(), vec({1.0, 0.0}), 1.0);
  const double integral_odd = (1.0 - e2) / 2.0;
  const Vector expected = 0.5 * vec({1 + e2, 1 - e2}) + 0.5 * vec({1 + integral_odd, 1 - integral_odd});
  CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(mean(fix_a(), vec({1.0}), -1.0), Error);
  CHECK_THROWS_AS(mean(fix_a(), vec({1.0, 2.0}), 1.0), Error);
}

TEST_CASE("first moment is affine in the starting point") {
  std::mt19937_64 rng(4);
  for (const auto& p : all()) {
    const Vector x1 = uniform(rng, p.d, 0, 3), x2 = uniform(rng, p.d, 0, 3);
    const Vector m0 = mean(p, Vector::Zero(p.d), 1.3);
    const Vector lhs = mean(p, x1 + x2, 1.3) - m0;
    const Vector rhs = (mean(p, x1, 1.3) - m0) + (mean(p, x2, 1.3) - m0);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("variance of the pure branching process") {
  const auto p = scalar(1, 0, 0);
  CHECK(variance_no_immigration(p, vec({0.0}), 1.0).isZero());
  CHECK(variance_no_immigration(p, vec({1.0}), 1.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(variance_no_immigration(p, vec({3.0}), 2.0)(0, 0) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK_THROWS_AS(variance_no_immigration(fix_a(), vec({1.0}), 1.0), Error);
  CHECK_THROWS_AS(variance_no_immigration(without_immigration(jump1()), vec({1.0}), -1.0), Error);
}

TEST_CASE("variance matches the second-moment ODE") {
  std::mt19937_64 rng(8);
  for (const auto& full : all()) {
    const auto p = without_immigration(full);
    const Vector z = uniform(rng, p.d, 0.2, 2.0);
    for (double t : {0.5, 1.0, 2.0}) {
      const Matrix v = variance_no_immigration(p, z, t);
      const Matrix oracle = covariance_ode(p, z, t);
      CHECK((v - oracle).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("variance is linear in the start, symmetric and PSD") {
  std::mt19937_64 rng(10);
  for (const auto& full : all()) {
    const auto p = without_immigration(full);
    const Vector z1 = uniform(rng, p.d, 0, 2), z2 = uniform(rng, p.d, 0, 2);
    const Matrix a = variance_no_immigration(p, z1, 1.1), b = variance_no_immigration(p, z2, 1.1);
    const Matrix ab = variance_no_immigration(p, z1 + 2.0 * z2, 1.1);
    CHECK((ab - (a + 2.0 * b)).norm() < 1e-12 * std::max(1.0, ab.norm()));
    CHECK((a - a.transpose()).norm() < 1e-14 * std::max(1.0, a.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("removing immigration keeps branching data") {
  const auto p = without_immigration(jump2());
  CHECK(p.beta.isZero());
  CHECK(p.nu.empty());
  CHECK(p.mu[0].size() == 2);
  CHECK(p.B.isApprox(jump2().B));
}
