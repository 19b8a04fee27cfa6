#pragma once

#include <string>

#include "json.hpp"

#include "cbi/model.hpp"

namespace cbi {

/// Parses the parameter document {d, c, beta, B, nu, mu}. Type errors and
/// ragged arrays raise Errc::parse; dimension inconsistencies are left for
/// `validate` to report.
CbiParams params_from_json(const nlohmann::json& doc);
CbiParams params_from_json_text(const std::string& text);
CbiParams params_from_file(const std::string& path);

nlohmann::json params_to_json(const CbiParams& params);
nlohmann::json report_to_json(const ValidationReport& report);

nlohmann::json vector_to_json(const Vector& v);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace cbi
