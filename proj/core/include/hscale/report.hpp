#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hscale/analysis.hpp"

namespace hscale::report {

/// One inequality evaluation: PASS means slack >= -tolerance.
struct SlackRecord {
  std::string id;  // e.g. "3b.3", "3b.12", "3b.19"
  double slack = 0;
  std::string inputs_digest;
  double tolerance = 1e-10;

  bool pass() const { return slack >= -tolerance; }
};

/// A fitted constant the theory leaves unquantified; only its stability
/// across refinement is ever asserted.
struct FitRecord {
  std::string id;
  double value = 0;
  double stability_ratio = 1;  // max/min across refinement levels
};

nlohmann::json to_json(const SlackRecord& r);
nlohmann::json to_json(const FitRecord& r);

/// Verdict record with exactly the wire fields
/// {kind, value?, tail_ratio, truncation, grid_spec}.
nlohmann::json verdict_to_json(const analysis::Verdict& v);

struct ValidationResult {
  bool ok = true;
  std::string path;     // JSON pointer of the first violation
  std::string message;

  explicit operator bool() const { return ok; }
};

/// Minimal schema dialect: {"fields": {name: {"type": t, "required": bool}},
/// "closed": bool}. Types: string, number, integer, boolean, object, array.
ValidationResult validate_schema(const nlohmann::json& doc,
                                 const nlohmann::json& schema);

const nlohmann::json& verdict_schema();
const nlohmann::json& slack_record_schema();
const nlohmann::json& fit_record_schema();

struct CsvCheck {
  bool ok = true;
  std::size_t row = 0, col = 0;  // 1-based position of the first violation
  std::string message;

  explicit operator bool() const { return ok; }
};

/// Rate tables: header (k, error, bound, ratio), numeric cells, CRLF rows.
CsvCheck validate_rate_csv(const std::string& text);

/// RFC 4180 serialization of a rate table.
std::string rate_table_csv(
    const std::vector<std::array<double, 4>>& rows);

/// FNV-1a 64-bit hex digest of a canonical input string.
std::string digest(const std::string& canonical);

/// True iff every record passes; never flips a failing record.
bool aggregate_pass(const std::vector<SlackRecord>& records);

}  // namespace hscale::report
