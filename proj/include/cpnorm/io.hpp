#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cpnorm/cp_map.hpp"
#include "cpnorm/diagnostics.hpp"
#include "cpnorm/oracle.hpp"
#include "cpnorm/power_method.hpp"

namespace cpnorm::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Kraus list plus optional metadata, as stored on disk.
struct MapFile {
  CPMap map;
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> kind;
};

/// Finite numbers as JSON numbers; infinities and NaN as strings.
inline Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline Json complex_matrix(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path, "missing field '" + key + "'");
  return *it;
}

inline Index require_dim(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key, "$");
  if (!v.is_number_integer() || v.get<long long>() < 1) field_error("$." + key, "expected a positive integer");
  return static_cast<Index>(v.get<long long>());
}

inline double require_number(const Json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(path, "expected a finite number");
  return x;
}

inline Eigen::MatrixXcd parse_complex_matrix(const Json& v, Index rows, Index cols, const std::string& path) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows)
    field_error(path, "expected an array of " + std::to_string(rows) + " rows");
  Eigen::MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<std::size_t>(i)];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      field_error(rpath, "expected a row of " + std::to_string(cols) + " entries");
    for (Index j = 0; j < cols; ++j) {
      const Json& e = row[static_cast<std::size_t>(j)];
      const std::string epath = rpath + "[" + std::to_string(j) + "]";
      if (!e.is_array() || e.size() != 2) field_error(epath, "expected [re, im] pair");
      m(i, j) = Complex(require_number(e[0], epath + "[0]"), require_number(e[1], epath + "[1]"));
    }
  }
  return m;
}

// Line and column of a byte offset, both 1-based.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parses JSON text; syntax errors report line and column.
inline Json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + path + "'");
  out << text;
}

inline void check_version(const Json& doc) {
  const Json& v = detail::require(doc, "version", "$");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
    detail::field_error("$.version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
}

inline Json map_to_json(const MapFile& file) {
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = file.map.input_dim();
  doc["m"] = file.map.output_dim();
  Json kraus = Json::array();
  for (const auto& v : file.map.kraus()) kraus.push_back(complex_matrix(v));
  doc["kraus"] = std::move(kraus);
  if (file.name || file.seed || file.kind) {
    Json meta = Json::object();
    if (file.name) meta["name"] = *file.name;
    if (file.kind) meta["kind"] = *file.kind;
    if (file.seed) meta["seed"] = *file.seed;
    doc["metadata"] = std::move(meta);
  }
  return doc;
}

inline MapFile map_from_json(const Json& doc) {
  if (!doc.is_object()) detail::field_error("$", "expected an object");
  check_version(doc);
  const Index n = detail::require_dim(doc, "n");
  const Index m = detail::require_dim(doc, "m");
  const Json& kraus = detail::require(doc, "kraus", "$");
  if (!kraus.is_array() || kraus.empty()) detail::field_error("$.kraus", "expected a non-empty array");
  std::vector<Eigen::MatrixXcd> ops;
  for (std::size_t i = 0; i < kraus.size(); ++i)
    ops.push_back(detail::parse_complex_matrix(kraus[i], m, n, "$.kraus[" + std::to_string(i) + "]"));
  MapFile file{CPMap(std::move(ops)), std::nullopt, std::nullopt, std::nullopt};
  if (auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) detail::field_error("$.metadata", "expected an object");
    if (auto f = it->find("name"); f != it->end() && f->is_string()) file.name = f->get<std::string>();
    if (auto f = it->find("kind"); f != it->end() && f->is_string()) file.kind = f->get<std::string>();
    if (auto f = it->find("seed"); f != it->end() && f->is_number_unsigned()) file.seed = f->get<std::uint64_t>();
  }
  return file;
}

inline std::string serialize_map(const MapFile& file) { return map_to_json(file).dump(2) + "\n"; }

inline MapFile parse_map(const std::string& text, const std::string& source = "<input>") {
  return map_from_json(parse_json(text, source));
}

inline MapFile load_map(const std::string& path) { return parse_map(read_file(path), path); }

/// Nonnegative real matrix file: {"version": 1, "matrix": [[...], ...]}.
inline Eigen::MatrixXd parse_nonnegative_matrix(const std::string& text, const std::string& source = "<input>") {
  const Json doc = parse_json(text, source);
  check_version(doc);
  const Json& rows = detail::require(doc, "matrix", "$");
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
    detail::field_error("$.matrix", "expected a non-empty array of rows");
  const std::size_t cols = rows[0].size();
  Eigen::MatrixXd a(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rpath = "$.matrix[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || rows[i].size() != cols)
      detail::field_error(rpath, "expected a row of " + std::to_string(cols) + " numbers");
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = detail::require_number(rows[i][j], rpath + "[" + std::to_string(j) + "]");
      if (x < 0.0) detail::field_error(rpath + "[" + std::to_string(j) + "]", "entries must be nonnegative");
      a(static_cast<Index>(i), static_cast<Index>(j)) = x;
    }
  }
  return a;
}

inline Json to_json(const StructuralVerdict& v) {
  Json j;
  j["property"] = to_string(v.property);
  j["verdict"] = to_string(v.verdict);
  j["trials"] = v.trials;
  j["margin"] = number(v.margin);
  j["witness"] = v.witness ? complex_matrix(v.witness->matrix()) : Json(nullptr);
  return j;
}

inline Json to_json(const ContractionReport& r) {
  Json j;
  j["diameter_lower_bound"] = number(r.diameter_lower_bound);
  j["kappa_phi_lower"] = number(r.kappa_phi_lower);
  j["diameter_upper_bound"] = r.diameter_upper_bound ? number(*r.diameter_upper_bound) : Json(nullptr);
  j["kappa_phi_upper"] = number(r.kappa_phi_upper);
  j["kappa_adjoint_lower"] = number(r.kappa_adjoint_lower);
  j["kappa_adjoint_upper"] = number(r.kappa_adjoint_upper);
  j["kappa_s_upper"] = r.kappa_s_upper ? number(*r.kappa_s_upper) : Json("unavailable");
  j["kappa_s_certified"] = r.kappa_s_certified;
  j["kappa_s_heuristic"] = number(r.kappa_s_heuristic);
  j["sample_count"] = r.sample_count;
  return j;
}

inline Json to_json(const ContractionBound& b) {
  Json j;
  j["value"] = number(b.value);
  j["certified"] = b.certified;
  j["exponents_in_range"] = b.exponents_in_range;
  return j;
}

inline Json to_json(const DiagnosticsReport& d) {
  Json j;
  j["fully_indecomposable"] = to_json(d.fully_indecomposable);
  j["positively_improving"] = to_json(d.positively_improving);
  j["positively_improving_adjoint"] = to_json(d.positively_improving_adjoint);
  j["contraction"] = to_json(d.contraction);
  j["contraction_bound"] = to_json(d.bound);
  j["certified_contractive"] = d.certified_contractive();
  return j;
}

inline Json to_json(const NormResult& r) {
  Json j;
  j["norm_estimate"] = number(r.norm_estimate);
  j["status"] = to_string(r.trace.status);
  j["iterations"] = r.iterations;
  const auto& last = r.trace.records.back();
  j["final_residual"] = number(last.residual);
  j["final_hilbert_step"] = number(last.hilbert_step);
  j["final_frobenius_step"] = number(last.frobenius_step);
  j["maximizer"] = complex_matrix(r.maximizer.matrix());
  j["contraction"] = to_json(r.contraction);
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const OracleResult& o) {
  Json j;
  j["method"] = to_string(o.method);
  j["best_value"] = number(o.best_value);
  j["best_from_psd_starts"] = number(o.best_from_psd_starts);
  j["best_from_hermitian_starts"] = number(o.best_from_hermitian_starts);
  j["restarts"] = o.restarts;
  j["budget_used"] = o.budget_used;
  j["best_point"] = complex_matrix(o.best_point.matrix());
  return j;
}

inline Json to_json(const CrossValidation& c) {
  Json j;
  j["status"] = to_string(c.status);
  j["power_value"] = number(c.power_value);
  j["oracle_value"] = number(c.oracle_value);
  j["gap"] = number(c.gap);
  j["tolerance"] = number(c.tolerance);
  j["certified"] = c.certified;
  j["maximizer_distance"] = c.maximizer_distance ? number(*c.maximizer_distance) : Json(nullptr);
  j["message"] = c.message;
  return j;
}

inline std::string format_double(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream ss;
  ss << std::setprecision(17) << x;
  return ss.str();
}

/// Delimited rows `k,objective,hilbert_step,frobenius_step,residual`; steps
/// are empty for k = 0.
inline void write_trace_csv(std::ostream& out, const PowerTrace& trace) {
  out << "k,objective,hilbert_step,frobenius_step,residual\n";
  for (const auto& r : trace.records)
    out << r.k << ',' << format_double(r.objective) << ',' << format_double(r.hilbert_step) << ','
        << format_double(r.frobenius_step) << ',' << format_double(r.residual) << '\n';
}

}  // namespace cpnorm::io
