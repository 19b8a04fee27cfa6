#pragma once

// Parameter sets of multi-type continuous-state branching processes with
// immigration (CBI), restricted to finite atomic jump measures.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cbi/types.hpp"

namespace cbi {

struct Atom {
  double weight = 0.0;
  Vector point;
};

/// Finite atomic Borel measure on R_+^d \ {0}. Every integral against it is a
/// weighted finite sum over atoms.
class JumpMeasure {
 public:
  JumpMeasure() = default;
  explicit JumpMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  std::size_t size() const noexcept { return atoms_.size(); }

  double total_mass() const;

  /// Sum of weight * g(point) over atoms.
  template <class F>
  double integrate(F&& g) const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.weight * g(a.point);
    return acc;
  }

  /// Returns a copy with every weight multiplied by `factor`.
  JumpMeasure scaled(double factor) const;

 private:
  std::vector<Atom> atoms_;
};

/// Candidate tuple (d, c, beta, B, nu, mu). Holds anything, including
/// malformed input; `validate` decides admissibility.
struct CbiParams {
  int d = 0;
  Vector c;
  Vector beta;
  Matrix B;
  JumpMeasure nu;
  std::vector<JumpMeasure> mu;
};

struct ValidationReport {
  bool admissible = false;
  std::map<int, bool> moment_order_ok;  // keys 1, 2, 4
  std::vector<std::pair<std::string, double>> computed_integrals;
  std::vector<std::string> violations;

  /// Looks up a computed integral by name; throws if absent.
  double integral(const std::string& name) const;
};

/// Checks every admissibility condition and the moment conditions of orders
/// 1, 2 and 4. Never throws on inadmissible input.
ValidationReport validate(const CbiParams& params);

/// Throws Error(Errc::inadmissible) listing the violations, if any.
void require_admissible(const CbiParams& params);

bool is_essentially_nonnegative(const Matrix& a);

}  // namespace cbi
