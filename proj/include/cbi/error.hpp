#pragma once

#include <stdexcept>
#include <string>

namespace cbi {

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  inadmissible,
  numeric_range,
  solver_failure,
  classification,
  parse,
};

/// Single exception type thrown by the numerics core. The code lets the C
/// layer and the CLI map failures to stable status values.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cbi
