#include "cbi/io.hpp"

#include <fstream>
#include <sstream>

#include "cbi/error.hpp"

namespace cbi {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(Errc::parse, msg); }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where + " must be a number");
  return j.get<double>();
}

Vector vector_field(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_field(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? (j[0].is_array() ? j[0].size() : 0) : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = vector_field(j[r], where + "[" + std::to_string(r) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) parse_fail(where + " is ragged");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

JumpMeasure measure_field(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where + " must be a list of {weight, z} atoms");
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& a = j[k];
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (!a.is_object() || !a.contains("weight") || !a.contains("z"))
      parse_fail(w + " must be an object with keys 'weight' and 'z'");
    atoms.push_back(Atom{number(a["weight"], w + ".weight"), vector_field(a["z"], w + ".z")});
  }
  return JumpMeasure(std::move(atoms));
}

}  // namespace

CbiParams params_from_json(const json& doc) {
  if (!doc.is_object()) parse_fail("parameter document must be a JSON object");
  for (const char* key : {"d", "c", "beta", "B"})
    if (!doc.contains(key)) parse_fail(std::string("missing key '") + key + "'");
  CbiParams p;
  if (!doc["d"].is_number_integer()) parse_fail("d must be an integer");
  p.d = doc["d"].get<int>();
  p.c = vector_field(doc["c"], "c");
  p.beta = vector_field(doc["beta"], "beta");
  p.B = matrix_field(doc["B"], "B");
  if (doc.contains("nu")) p.nu = measure_field(doc["nu"], "nu");
  if (doc.contains("mu")) {
    const auto& mu = doc["mu"];
    if (!mu.is_array()) parse_fail("mu must be a list of d atom lists");
    for (std::size_t i = 0; i < mu.size(); ++i)
      p.mu.push_back(measure_field(mu[i], "mu[" + std::to_string(i) + "]"));
  } else if (p.d > 0) {
    p.mu.resize(static_cast<std::size_t>(p.d));
  }
  return p;
}

CbiParams params_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  return params_from_json(doc);
}

CbiParams params_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open parameter file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json_text(ss.str());
}

json vector_to_json(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json matrix_to_json(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(vector_to_json(m.row(r).transpose()));
  return j;
}

namespace {
json measure_to_json(const JumpMeasure& m) {
  json j = json::array();
  for (const auto& a : m.atoms()) j.push_back({{"weight", a.weight}, {"z", vector_to_json(a.point)}});
  return j;
}
}  // namespace

json params_to_json(const CbiParams& p) {
  json mu = json::array();
  for (const auto& m : p.mu) mu.push_back(measure_to_json(m));
  return {{"d", p.d},
          {"c", vector_to_json(p.c)},
          {"beta", vector_to_json(p.beta)},
          {"B", matrix_to_json(p.B)},
          {"nu", measure_to_json(p.nu)},
          {"mu", mu}};
}

json report_to_json(const ValidationReport& r) {
  json orders = json::object();
  for (const auto& [k, ok] : r.moment_order_ok) orders[std::to_string(k)] = ok;
  json ints = json::array();
  for (const auto& [name, value] : r.computed_integrals) ints.push_back({{"name", name}, {"value", value}});
  return {{"admissible", r.admissible},
          {"moment_order_ok", orders},
          {"computed_integrals", ints},
          {"violations", r.violations}};
}

}  // namespace cbi
