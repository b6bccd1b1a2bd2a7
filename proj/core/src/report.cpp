#include "hscale/report.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>

namespace hscale::report {

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool type_matches(const nlohmann::json& v, const std::string& t) {
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  return false;
}

}  // namespace

nlohmann::json to_json(const SlackRecord& r) {
  return nlohmann::json{{"id", r.id},
                        {"slack", r.slack},
                        {"inputs_digest", r.inputs_digest},
                        {"tolerance", r.tolerance},
                        {"pass", r.pass()}};
}

nlohmann::json to_json(const FitRecord& r) {
  return nlohmann::json{{"id", r.id},
                        {"value", r.value},
                        {"stability_ratio", r.stability_ratio}};
}

nlohmann::json verdict_to_json(const analysis::Verdict& v) {
  nlohmann::json j;
  j["kind"] = analysis::to_string(v.kind);
  if (v.value) j["value"] = *v.value;
  j["tail_ratio"] = v.tail_ratio;
  j["truncation"] = v.truncation;
  j["grid_spec"] = nlohmann::json{{"lower", v.grid.lower},
                                  {"octaves", v.grid.octaves},
                                  {"points_per_octave", v.grid.points_per_octave},
                                  {"level", v.grid.level}};
  return j;
}

ValidationResult validate_schema(const nlohmann::json& doc,
                                 const nlohmann::json& schema) {
  if (!doc.is_object())
    return {false, "", "document is not an object"};
  const auto& fields = schema.at("fields");
  for (auto it = fields.begin(); it != fields.end(); ++it) {
    const bool required = it.value().value("required", true);
    const auto found = doc.find(it.key());
    if (found == doc.end()) {
      if (required)
        return {false, "/" + it.key(), "missing required field"};
      continue;
    }
    const std::string t = it.value().value("type", "string");
    if (!type_matches(*found, t))
      return {false, "/" + it.key(), "expected type " + t};
  }
  if (schema.value("closed", false)) {
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (!fields.contains(it.key()))
        return {false, "/" + it.key(), "unexpected field"};
  }
  return {};
}

const nlohmann::json& verdict_schema() {
  static const nlohmann::json s = nlohmann::json::parse(R"({
    "schema": "verdict", "version": 1, "closed": true,
    "fields": {
      "kind":       {"type": "string", "required": true},
      "value":      {"type": "number", "required": false},
      "tail_ratio": {"type": "number", "required": true},
      "truncation": {"type": "number", "required": true},
      "grid_spec":  {"type": "object", "required": true}
    }
  })");
  return s;
}

const nlohmann::json& slack_record_schema() {
  static const nlohmann::json s = nlohmann::json::parse(R"({
    "schema": "slack_record", "version": 1, "closed": false,
    "fields": {
      "id":            {"type": "string", "required": true},
      "slack":         {"type": "number", "required": true},
      "inputs_digest": {"type": "string", "required": true},
      "tolerance":     {"type": "number", "required": true},
      "pass":          {"type": "boolean", "required": true}
    }
  })");
  return s;
}

const nlohmann::json& fit_record_schema() {
  static const nlohmann::json s = nlohmann::json::parse(R"({
    "schema": "fit_record", "version": 1, "closed": false,
    "fields": {
      "id":              {"type": "string", "required": true},
      "value":           {"type": "number", "required": true},
      "stability_ratio": {"type": "number", "required": true}
    }
  })");
  return s;
}

CsvCheck validate_rate_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == ',') {
      row.push_back(cell);
      cell.clear();
    } else if (ch == '\n') {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      row.push_back(cell);
      cell.clear();
      rows.push_back(row);
      row.clear();
    } else {
      cell += ch;
    }
  }
  if (!cell.empty() || !row.empty()) {
    row.push_back(cell);
    rows.push_back(row);
  }
  if (rows.empty()) return {false, 1, 1, "empty document"};
  static const std::array<const char*, 4> header = {"k", "error", "bound",
                                                    "ratio"};
  if (rows[0].size() != 4) return {false, 1, rows[0].size(), "expected 4 columns"};
  for (std::size_t c = 0; c < 4; ++c)
    if (rows[0][c] != header[c])
      return {false, 1, c + 1, "bad header cell"};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4)
      return {false, r + 1, rows[r].size(), "expected 4 columns"};
    for (std::size_t c = 0; c < 4; ++c) {
      const std::string& s = rows[r][c];
      char* end = nullptr;
      std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size())
        return {false, r + 1, c + 1, "non-numeric cell"};
    }
  }
  return {};
}

std::string rate_table_csv(const std::vector<std::array<double, 4>>& rows) {
  std::string out = "k,error,bound,ratio\r\n";
  for (const auto& r : rows) {
    out += num17(r[0]);
    for (std::size_t c = 1; c < 4; ++c) {
      out += ',';
      out += num17(r[c]);
    }
    out += "\r\n";
  }
  return out;
}

std::string digest(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

bool aggregate_pass(const std::vector<SlackRecord>& records) {
  for (const auto& r : records)
    if (!r.pass()) return false;
  return true;
}

}  // namespace hscale::report
