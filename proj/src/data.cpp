#include "fairkit/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fairkit/error.hpp"
#include "fairkit/numfmt.hpp"
#include "fairkit/random.hpp"

namespace fairkit::data {

const char* to_string(Role role) {
  switch (role) {
    case Role::feature: return "feature";
    case Role::y_true: return "y_true";
    case Role::y_pred: return "y_pred";
    case Role::score: return "score";
    case Role::sensitive: return "sensitive";
  }
  return "unknown";
}

std::optional<Role> role_from_name(const std::string& name) {
  if (name == "feature") return Role::feature;
  if (name == "y_true") return Role::y_true;
  if (name == "y_pred") return Role::y_pred;
  if (name == "score") return Role::score;
  if (name == "sensitive") return Role::sensitive;
  return std::nullopt;
}

std::size_t Column::size() const {
  return is_numeric() ? numeric().size() : categorical().size();
}

const NumericColumn& Column::numeric() const {
  if (!is_numeric()) fail(ErrorCode::schema, "column '" + name + "' is not numeric");
  return std::get<NumericColumn>(values);
}

const CategoricalColumn& Column::categorical() const {
  if (is_numeric()) fail(ErrorCode::schema, "column '" + name + "' is not categorical");
  return std::get<CategoricalColumn>(values);
}

NumericColumn& Column::numeric() {
  if (!is_numeric()) fail(ErrorCode::schema, "column '" + name + "' is not numeric");
  return std::get<NumericColumn>(values);
}

CategoricalColumn& Column::categorical() {
  if (is_numeric()) fail(ErrorCode::schema, "column '" + name + "' is not categorical");
  return std::get<CategoricalColumn>(values);
}

std::string GroupKey::joined(char sep) const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) fail(ErrorCode::schema, "dataset has no columns");
  n_rows_ = columns_.front().size();
  for (const Column& col : columns_) {
    if (col.size() != n_rows_) {
      fail(ErrorCode::schema, "column '" + col.name + "' has " +
                                  std::to_string(col.size()) + " rows, expected " +
                                  std::to_string(n_rows_));
    }
  }
}

bool Dataset::has_column(const std::string& name) const {
  for (const Column& col : columns_) {
    if (col.name == name) return true;
  }
  return false;
}

const Column& Dataset::column(const std::string& name) const {
  for (const Column& col : columns_) {
    if (col.name == name) return col;
  }
  fail(ErrorCode::schema, "no column named '" + name + "'");
}

std::vector<const Column*> Dataset::columns_with_role(Role role) const {
  std::vector<const Column*> out;
  for (const Column& col : columns_) {
    if (col.role == role) out.push_back(&col);
  }
  return out;
}

std::vector<GroupKey> Dataset::group_keys() const {
  const auto sensitive = columns_with_role(Role::sensitive);
  if (sensitive.empty()) fail(ErrorCode::data, "dataset has no sensitive column");
  std::vector<GroupKey> keys(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    keys[r].parts.reserve(sensitive.size());
    for (const Column* col : sensitive) {
      if (col->is_numeric()) {
        keys[r].parts.push_back(format_double(col->numeric()[r]));
      } else {
        keys[r].parts.push_back(col->categorical()[r]);
      }
    }
  }
  return keys;
}

namespace {

// One CSV record per RFC-4180-ish rules: comma delimiter, optional
// double-quote quoting with "" escapes. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(field);
      any = true;
      break;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        const int next = in.peek();
        if (next == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      ++line_no;
      fields.push_back(field);
      any = true;
      break;
    } else if (ch == '\r') {
      // swallow; handled with the following '\n' if present
      if (in.peek() != '\n') {
        ++line_no;
        fields.push_back(field);
        any = true;
        break;
      }
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
  if (in_quotes) {
    fail(ErrorCode::parse, "unterminated quoted field near line " + std::to_string(line_no));
  }
  return any;
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return value;
}

}  // namespace

Dataset load_table(std::istream& in, const std::map<std::string, Role>& role_map) {
  std::size_t line_no = 1;
  std::vector<std::string> header;
  if (!read_record(in, header, line_no)) {
    fail(ErrorCode::parse, "empty CSV input: no header row");
  }
  std::set<std::string> seen;
  for (const std::string& name : header) {
    if (name.empty()) fail(ErrorCode::schema, "empty column name in header");
    if (!seen.insert(name).second) {
      fail(ErrorCode::schema, "duplicate column name '" + name + "' in header");
    }
  }
  for (const auto& [name, role] : role_map) {
    (void)role;
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      fail(ErrorCode::schema, "column '" + name + "' named in role map is missing from the header");
    }
  }

  const std::size_t ncols = header.size();
  std::vector<std::vector<std::string>> cells(ncols);
  std::vector<std::string> record;
  std::size_t data_row = 0;
  while (read_record(in, record, line_no)) {
    ++data_row;
    if (record.size() == 1 && record[0].empty()) {
      // trailing blank line
      --data_row;
      continue;
    }
    if (record.size() != ncols) {
      fail(ErrorCode::parse, "row " + std::to_string(data_row) + " has " +
                                 std::to_string(record.size()) + " fields, expected " +
                                 std::to_string(ncols));
    }
    for (std::size_t c = 0; c < ncols; ++c) cells[c].push_back(std::move(record[c]));
  }

  std::vector<Column> columns;
  columns.reserve(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    const std::string& name = header[c];
    Role role = Role::feature;
    if (const auto it = role_map.find(name); it != role_map.end()) role = it->second;

    for (std::size_t r = 0; r < cells[c].size(); ++r) {
      if (cells[c][r].empty()) {
        fail(ErrorCode::value,
             "missing value in column '" + name + "', row " + std::to_string(r + 1));
      }
    }

    Column col;
    col.name = name;
    col.role = role;
    if (role == Role::sensitive) {
      col.values = CategoricalColumn(std::move(cells[c]));
    } else if (role == Role::y_true || role == Role::y_pred) {
      NumericColumn vals(cells[c].size());
      for (std::size_t r = 0; r < cells[c].size(); ++r) {
        const auto v = parse_number(cells[c][r]);
        if (!v || (*v != 0.0 && *v != 1.0)) {
          fail(ErrorCode::value, "non-binary value '" + cells[c][r] + "' in column '" +
                                     name + "', row " + std::to_string(r + 1));
        }
        vals[r] = *v;
      }
      col.values = std::move(vals);
    } else if (role == Role::score) {
      NumericColumn vals(cells[c].size());
      for (std::size_t r = 0; r < cells[c].size(); ++r) {
        const auto v = parse_number(cells[c][r]);
        if (!v) {
          fail(ErrorCode::value, "non-numeric value '" + cells[c][r] + "' in score column '" +
                                     name + "', row " + std::to_string(r + 1));
        }
        vals[r] = *v;
      }
      col.values = std::move(vals);
    } else {
      // Feature columns are numeric when every cell parses, else categorical.
      NumericColumn vals(cells[c].size());
      bool numeric = true;
      for (std::size_t r = 0; r < cells[c].size(); ++r) {
        const auto v = parse_number(cells[c][r]);
        if (!v) {
          numeric = false;
          break;
        }
        vals[r] = *v;
      }
      if (numeric) {
        col.values = std::move(vals);
      } else {
        col.values = CategoricalColumn(std::move(cells[c]));
      }
    }
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns));
}

Dataset load_table(const std::string& csv_text, const std::map<std::string, Role>& role_map) {
  std::istringstream in(csv_text);
  return load_table(in, role_map);
}

namespace {

void append_csv_field(std::string& out, const std::string& value) {
  const bool needs_quotes = value.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) {
    out += value;
    return;
  }
  out.push_back('"');
  for (const char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

}  // namespace

std::string write_csv(const Dataset& dataset) {
  std::string out;
  const auto& cols = dataset.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c > 0) out.push_back(',');
    append_csv_field(out, cols[c].name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c > 0) out.push_back(',');
      if (cols[c].is_numeric()) {
        out += format_double(cols[c].numeric()[r]);
      } else {
        append_csv_field(out, cols[c].categorical()[r]);
      }
    }
    out.push_back('\n');
  }
  return out;
}

ValidationReport validate_dataset(const Dataset& dataset) {
  ValidationReport report;
  std::set<std::string> names;
  for (const Column& col : dataset.columns()) {
    if (col.name.empty()) {
      report.errors.push_back({"empty-name", "column has an empty name", col.name});
    }
    if (!names.insert(col.name).second) {
      report.errors.push_back({"duplicate-name", "duplicate column name '" + col.name + "'", col.name});
    }
    if (col.role == Role::y_true || col.role == Role::y_pred) {
      if (!col.is_numeric()) {
        report.errors.push_back({"non-binary", "label column '" + col.name + "' is not numeric", col.name});
      } else {
        for (std::size_t r = 0; r < col.size(); ++r) {
          const double v = col.numeric()[r];
          if (v != 0.0 && v != 1.0) {
            report.errors.push_back({"non-binary",
                                     "column '" + col.name + "' has non-binary value at row " +
                                         std::to_string(r + 1),
                                     col.name});
            break;
          }
        }
      }
    }
    if (col.role == Role::score) {
      if (!col.is_numeric()) {
        report.errors.push_back({"non-numeric-score", "score column '" + col.name + "' is not numeric", col.name});
      } else {
        for (std::size_t r = 0; r < col.size(); ++r) {
          if (!std::isfinite(col.numeric()[r])) {
            report.errors.push_back({"non-finite-score",
                                     "column '" + col.name + "' has a non-finite value at row " +
                                         std::to_string(r + 1),
                                     col.name});
            break;
          }
        }
      }
    }
    if (col.role == Role::sensitive) {
      const std::set<std::string> distinct(col.categorical().begin(), col.categorical().end());
      if (distinct.size() <= 1) {
        report.warnings.push_back({"single-group",
                                   "sensitive column '" + col.name + "' has a single distinct value",
                                   col.name});
      }
    }
  }

  if (!dataset.columns_with_role(Role::sensitive).empty()) {
    std::map<GroupKey, std::size_t> sizes;
    for (const GroupKey& key : dataset.group_keys()) ++sizes[key];
    for (const auto& [key, count] : sizes) {
      if (count < 10) {
        report.warnings.push_back({"small-group",
                                   "group '" + key.joined() + "' has only " +
                                       std::to_string(count) + " rows",
                                   ""});
      }
    }
  }
  return report;
}

SyntheticConfig parse_synthetic_config(const nlohmann::json& config) {
  if (!config.is_object()) fail(ErrorCode::config, "synthetic config must be a JSON object");
  static const std::set<std::string> known = {"n_rows", "group_weights", "base_rates",
                                              "score_noise", "seed"};
  for (const auto& [key, value] : config.items()) {
    (void)value;
    if (!known.count(key)) fail(ErrorCode::config, "unknown key '" + key + "' in synthetic config");
  }
  for (const std::string& key : {"n_rows", "group_weights", "base_rates"}) {
    if (!config.contains(key)) fail(ErrorCode::config, "synthetic config is missing '" + key + "'");
  }

  SyntheticConfig out;
  if (!config["n_rows"].is_number_unsigned() || config["n_rows"].get<std::uint64_t>() < 1) {
    fail(ErrorCode::config, "n_rows must be a positive integer");
  }
  out.n_rows = config["n_rows"].get<std::size_t>();
  if (!config["group_weights"].is_object() || config["group_weights"].empty()) {
    fail(ErrorCode::config, "group_weights must be a non-empty object");
  }
  for (const auto& [label, weight] : config["group_weights"].items()) {
    if (!weight.is_number()) fail(ErrorCode::config, "group weight for '" + label + "' must be a number");
    out.group_weights.emplace_back(label, weight.get<double>());
  }
  std::sort(out.group_weights.begin(), out.group_weights.end());
  for (const auto& [label, rate] : config["base_rates"].items()) {
    if (!rate.is_number()) fail(ErrorCode::config, "base rate for '" + label + "' must be a number");
    out.base_rates[label] = rate.get<double>();
  }
  out.score_noise = config.value("score_noise", 0.0);
  out.seed = config.value("seed", std::uint64_t{0});
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.n_rows < 1) fail(ErrorCode::config, "n_rows must be at least 1");
  if (config.score_noise < 0.0) fail(ErrorCode::config, "score_noise must be non-negative");
  double total = 0.0;
  for (const auto& [label, weight] : config.group_weights) {
    if (weight < 0.0) fail(ErrorCode::config, "group weight for '" + label + "' is negative");
    total += weight;
    const auto it = config.base_rates.find(label);
    if (it == config.base_rates.end()) {
      fail(ErrorCode::config, "no base rate for group '" + label + "'");
    }
    if (it->second < 0.0 || it->second > 1.0) {
      fail(ErrorCode::config, "base rate for group '" + label + "' must lie in [0, 1]");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCode::config, "group weights must sum to 1 (got " + format_double(total) + ")");
  }

  RandomStream rng(config.seed);
  CategoricalColumn group(config.n_rows);
  NumericColumn y_true(config.n_rows);
  NumericColumn score(config.n_rows);
  NumericColumn y_pred(config.n_rows);
  for (std::size_t r = 0; r < config.n_rows; ++r) {
    const double u = rng.next_uniform();
    double cum = 0.0;
    std::size_t pick = config.group_weights.size() - 1;
    for (std::size_t g = 0; g < config.group_weights.size(); ++g) {
      cum += config.group_weights[g].second;
      if (u < cum) {
        pick = g;
        break;
      }
    }
    const std::string& label = config.group_weights[pick].first;
    const double y = rng.next_bernoulli(config.base_rates.at(label)) ? 1.0 : 0.0;
    const double noise = rng.next_normal(config.score_noise);
    const double s = std::clamp(0.5 * y + 0.25 + noise, 0.0, 1.0);
    group[r] = label;
    y_true[r] = y;
    score[r] = s;
    y_pred[r] = s > 0.5 ? 1.0 : 0.0;
  }

  std::vector<Column> columns;
  columns.push_back({"group", std::move(group), Role::sensitive});
  columns.push_back({"y_true", std::move(y_true), Role::y_true});
  columns.push_back({"score", std::move(score), Role::score});
  columns.push_back({"y_pred", std::move(y_pred), Role::y_pred});
  return Dataset(std::move(columns));
}

}  // namespace fairkit::data
