#pragma once

#include <cmath>
#include <random>

#include "cbi/model.hpp"

namespace fixtures {

using cbi::Matrix;
using cbi::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline cbi::JumpMeasure atoms(std::initializer_list<std::pair<double, Vector>> list) {
  std::vector<cbi::Atom> out;
  for (const auto& [w, z] : list) out.push_back({w, z});
  return cbi::JumpMeasure(std::move(out));
}

inline cbi::CbiParams scalar(double c, double beta, double b) {
  cbi::CbiParams p;
  p.d = 1;
  p.c = vec({c});
  p.beta = vec({beta});
  p.B = Matrix::Constant(1, 1, b);
  p.mu.resize(1);
  return p;
}

// d = 1, c = 1, beta = 1, B = 0, no jumps.
inline cbi::CbiParams fix_a() { return scalar(1.0, 1.0, 0.0); }

// d = 2, c = (1, 1), beta = (1, 0), B = [[-1, 1], [1, -1]], no jumps.
inline cbi::CbiParams crit2() {
  cbi::CbiParams p;
  p.d = 2;
  p.c = vec({1.0, 1.0});
  p.beta = vec({1.0, 0.0});
  p.B = mat2(-1.0, 1.0, 1.0, -1.0);
  p.mu.resize(2);
  return p;
}

// d = 1 with both jump measures: c = 0.5, beta = 0.5, B = -1,
// mu = {1 at z = 2}, nu = {0.5 at z = 1}. Critical (btilde = 0).
inline cbi::CbiParams jump1() {
  auto p = scalar(0.5, 0.5, -1.0);
  p.mu[0] = atoms({{1.0, vec({2.0})}});
  p.nu = atoms({{0.5, vec({1.0})}});
  return p;
}

// d = 2 with jumps in both directions; subcritical.
inline cbi::CbiParams jump2() {
  cbi::CbiParams p;
  p.d = 2;
  p.c = vec({0.3, 0.7});
  p.beta = vec({0.2, 0.4});
  p.B = mat2(-1.5, 0.4, 0.3, -0.8);
  p.nu = atoms({{0.3, vec({1.0, 0.5})}, {0.2, vec({0.0, 2.0})}});
  p.mu = {atoms({{0.6, vec({0.5, 1.0})}, {0.1, vec({3.0, 0.0})}}), atoms({{0.4, vec({0.2, 0.3})}})};
  return p;
}

inline std::vector<cbi::CbiParams> all() { return {fix_a(), crit2(), jump1(), jump2()}; }

inline Vector uniform(std::mt19937_64& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = u(rng);
  return v;
}

}  // namespace fixtures
