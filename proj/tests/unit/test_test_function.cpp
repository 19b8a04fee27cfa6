#include "doctest.h"
#include "fixtures.hpp"

#include "cbi/error.hpp"
#include "cbi/test_function.hpp"

using namespace cbi;
using namespace fixtures;

namespace {

// Central-difference gradient and Hessian from values and gradients.
void check_derivatives(const TestFunction& f, const Vector& x) {
  const double h = 1e-6;
  const Vector g = f.gradient(x);
  const Matrix H = f.hessian(x);
  const double gscale = std::max(1e-3, g.cwiseAbs().maxCoeff());
  const double hscale = std::max(1e-3, H.cwiseAbs().maxCoeff());
  for (int i = 0; i < f.dim(); ++i) {
    Vector up = x, dn = x;
    up(i) += h;
    dn(i) -= h;
    CHECK(std::abs((f.value(up) - f.value(dn)) / (2 * h) - g(i)) <= 1e-5 * gscale);
    const Vector col = (f.gradient(up) - f.gradient(dn)) / (2 * h);
    CHECK((col - H.col(i)).cwiseAbs().maxCoeff() <= 1e-5 * hscale);
  }
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * hscale);
}

}  // namespace

TEST_CASE("bump values") {
  const auto f = bump(vec({1.0, 2.0}), 0.5, 3.0);
  CHECK(f.value(vec({1.0, 2.0})) == doctest::Approx(3.0 * std::exp(-1.0)));
  // |x - c|^2 / r^2 = 0.5
  CHECK(f.value(vec({1.0 + 0.5 / std::sqrt(2.0), 2.0})) == doctest::Approx(3.0 * std::exp(-2.0)));
  CHECK(f.value(vec({1.6, 2.0})) == 0.0);
  CHECK(f.gradient(vec({1.6, 2.0})).isZero());
  CHECK(f.hessian(vec({1.6, 2.0})).isZero());
  CHECK(f.gradient(vec({1.0, 2.0})).isZero());
  CHECK(f.support_radius() >= vec({1.0, 2.0}).norm() + 0.5 - 1e-12);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  std::mt19937_64 rng(31);
  for (int d = 1; d <= 3; ++d) {
    const Vector c = uniform(rng, d, 0.5, 2.0);
    const auto f = bump(c, 0.8, 1.7);
    Matrix h = Matrix::Random(d, d);
    h = (h + h.transpose()).eval();
    const auto g = poly_bump(c, 0.8, 1.2, 0.4, uniform(rng, d, -1, 1), h);
    for (int k = 0; k < 10; ++k) {
      const Vector x = c + uniform(rng, d, -0.45, 0.45);
      check_derivatives(f, x);
      check_derivatives(g, x);
    }
  }
}

TEST_CASE("rescaling applies the chain rule") {
  const auto f = bump(vec({1.0, 0.5}), 1.0, 2.0);
  const auto fn = f.rescaled(10.0);
  const Vector y = vec({9.0, 6.0});
  CHECK(fn.value(y) == doctest::Approx(f.value(y / 10.0)));
  CHECK(fn.gradient(y).isApprox(f.gradient(y / 10.0) / 10.0));
  CHECK(fn.hessian(y).isApprox(f.hessian(y / 10.0) / 100.0));
  CHECK(fn.support_radius() == doctest::Approx(10.0 * f.support_radius()));
  CHECK_THROWS_AS(f.rescaled(0.0), Error);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(bump(vec({1.0}), 0.0), Error);
  CHECK_THROWS_AS(bump(Vector(), 1.0), Error);
  CHECK_THROWS_AS(poly_bump(vec({1.0, 1.0}), 1.0, 1.0, 0.0, vec({1.0}), Matrix::Zero(2, 2)), Error);
}
