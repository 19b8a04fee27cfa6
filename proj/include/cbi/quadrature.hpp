#pragma once

#include <vector>

namespace cbi {

/// Fixed-order Gauss-Legendre rule. Default order matches the integrands used
/// throughout (entire functions of the integration variable).
struct QuadratureSpec {
  int order = 32;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// Nodes and weights of the n-point rule; rules are computed once per order
/// and cached. Throws Errc::invalid_argument for n < 1.
const GaussRule& gauss_legendre(int n);

/// Integrates f over [a, b] with the given rule. `f` may return any type that
/// supports scalar multiplication and addition (double, Vector, Matrix); return
/// concrete objects, not lazy Eigen expressions.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  const auto& rule = gauss_legendre(spec.order);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  using R = std::decay_t<decltype(f(a))>;
  R acc = rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (std::size_t k = 1; k < rule.nodes.size(); ++k) acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
  acc *= half;
  return acc;
}

}  // namespace cbi
