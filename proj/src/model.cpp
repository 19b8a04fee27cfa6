#include "cbi/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbi/error.hpp"

namespace cbi {

double JumpMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  return m;
}

JumpMeasure JumpMeasure::scaled(double factor) const {
  auto atoms = atoms_;
  for (auto& a : atoms) a.weight *= factor;
  return JumpMeasure(std::move(atoms));
}

double ValidationReport::integral(const std::string& name) const {
  for (const auto& [key, value] : computed_integrals)
    if (key == name) return value;
  throw Error(Errc::invalid_argument, "no computed integral named '" + name + "'");
}

bool is_essentially_nonnegative(const Matrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j && !(a(i, j) >= 0.0)) return false;
  return true;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Atom checks shared by nu and mu_i. Returns true when every atom is usable
// for integration (right length, finite, positive weight, nonzero point).
bool check_atoms(const JumpMeasure& m, int d, const std::string& label,
                 std::vector<std::string>& violations) {
  bool ok = true;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& a = m.atoms()[k];
    const std::string where = label + " atom " + std::to_string(k);
    if (!std::isfinite(a.weight) || a.weight <= 0.0) {
      violations.push_back(where + ": weight " + fmt(a.weight) + " is not a positive finite number");
      ok = false;
    }
    if (a.point.size() != d) {
      violations.push_back(where + ": point has length " + std::to_string(a.point.size()) +
                           ", expected " + std::to_string(d));
      ok = false;
      continue;
    }
    if (!a.point.allFinite()) {
      violations.push_back(where + ": point has non-finite coordinates");
      ok = false;
      continue;
    }
    if ((a.point.array() < 0.0).any()) {
      violations.push_back(where + ": point has a negative coordinate (support must lie in R_+^d)");
      ok = false;
    }
    if ((a.point.array() == 0.0).all()) {
      violations.push_back(where + ": point is the origin, which lies outside R_+^d \\ {0}");
      ok = false;
    }
  }
  return ok;
}

double tail_moment(const JumpMeasure& m, int order) {
  return m.integrate([order](const Vector& z) {
    const double r = z.norm();
    return r >= 1.0 ? std::pow(r, order) : 0.0;
  });
}

}  // namespace

ValidationReport validate(const CbiParams& p) {
  ValidationReport rep;
  auto& v = rep.violations;
  const int d = p.d;

  if (d < 1) {
    v.push_back("d = " + std::to_string(d) + " must be a positive integer");
    rep.moment_order_ok = {{1, false}, {2, false}, {4, false}};
    return rep;
  }

  if (p.c.size() != d) {
    v.push_back("c has length " + std::to_string(p.c.size()) + ", expected " + std::to_string(d));
  } else {
    for (int i = 0; i < d; ++i)
      if (!std::isfinite(p.c(i)) || p.c(i) < 0.0)
        v.push_back("c[" + std::to_string(i + 1) + "] = " + fmt(p.c(i)) + " is not in R_+");
  }

  if (p.beta.size() != d) {
    v.push_back("beta has length " + std::to_string(p.beta.size()) + ", expected " + std::to_string(d));
  } else {
    for (int i = 0; i < d; ++i)
      if (!std::isfinite(p.beta(i)) || p.beta(i) < 0.0)
        v.push_back("beta[" + std::to_string(i + 1) + "] = " + fmt(p.beta(i)) + " is not in R_+");
  }

  if (p.B.rows() != d || p.B.cols() != d) {
    v.push_back("B is " + std::to_string(p.B.rows()) + "x" + std::to_string(p.B.cols()) +
                ", expected " + std::to_string(d) + "x" + std::to_string(d));
  } else if (!p.B.allFinite()) {
    v.push_back("B has non-finite entries");
  } else {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && p.B(i, j) < 0.0)
          v.push_back("B not essentially non-negative: entry (" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + ") = " + fmt(p.B(i, j)) + " < 0");
  }

  bool atoms_ok = check_atoms(p.nu, d, "nu", v);
  if (static_cast<int>(p.mu.size()) != d) {
    v.push_back("mu has " + std::to_string(p.mu.size()) + " measures, expected " + std::to_string(d));
    atoms_ok = false;
  } else {
    for (int i = 0; i < d; ++i)
      atoms_ok = check_atoms(p.mu[i], d, "mu[" + std::to_string(i + 1) + "]", v) && atoms_ok;
  }

  if (!atoms_ok) {
    rep.moment_order_ok = {{1, false}, {2, false}, {4, false}};
    rep.admissible = false;
    return rep;
  }

  auto& ints = rep.computed_integrals;
  const double nu_small = p.nu.integrate([](const Vector& z) { return std::min(1.0, z.norm()); });
  ints.emplace_back("nu: min(1,|z|)", nu_small);
  ints.emplace_back("nu: total mass", p.nu.total_mass());
  const double nu1 = tail_moment(p.nu, 1), nu2 = tail_moment(p.nu, 2), nu4 = tail_moment(p.nu, 4);
  ints.emplace_back("nu: |z| 1{|z|>=1}", nu1);
  ints.emplace_back("nu: |z|^2 1{|z|>=1}", nu2);
  ints.emplace_back("nu: |z|^4 1{|z|>=1}", nu4);
  if (!std::isfinite(nu_small)) v.push_back("nu: integral of min(1,|z|) is not finite");

  bool ok2 = std::isfinite(nu2), ok4 = std::isfinite(nu4);
  for (int i = 0; i < d; ++i) {
    const auto& m = p.mu[i];
    const std::string tag = "mu[" + std::to_string(i + 1) + "]: ";
    const double cond = m.integrate([i](const Vector& z) {
      const double r = z.norm();
      double s = std::min(r, r * r);
      for (Eigen::Index j = 0; j < z.size(); ++j)
        if (j != i) s += z(j);
      return s;
    });
    ints.emplace_back(tag + "min(|z|,|z|^2) + sum_{j!=i} z_j", cond);
    ints.emplace_back(tag + "total mass", m.total_mass());
    const double m1 = tail_moment(m, 1), m2 = tail_moment(m, 2), m4 = tail_moment(m, 4);
    ints.emplace_back(tag + "|z| 1{|z|>=1}", m1);
    ints.emplace_back(tag + "|z|^2 1{|z|>=1}", m2);
    ints.emplace_back(tag + "|z|^4 1{|z|>=1}", m4);
    if (!std::isfinite(cond)) v.push_back(tag + "branching integrability condition fails");
    ok2 = ok2 && std::isfinite(m2);
    ok4 = ok4 && std::isfinite(m4);
  }

  rep.moment_order_ok = {{1, std::isfinite(nu1)}, {2, ok2}, {4, ok4}};
  rep.admissible = v.empty();
  return rep;
}

void require_admissible(const CbiParams& params) {
  const auto rep = validate(params);
  if (rep.admissible) return;
  std::string msg = "parameters are not admissible:";
  for (const auto& s : rep.violations) msg += "\n  - " + s;
  throw Error(Errc::inadmissible, msg);
}

}  // namespace cbi
