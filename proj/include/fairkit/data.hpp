#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fairkit::data {

enum class Role { feature, y_true, y_pred, score, sensitive };

const char* to_string(Role role);
std::optional<Role> role_from_name(const std::string& name);

using NumericColumn = std::vector<double>;
using CategoricalColumn = std::vector<std::string>;

struct Column {
  std::string name;
  std::variant<NumericColumn, CategoricalColumn> values;
  Role role = Role::feature;

  bool is_numeric() const { return std::holds_alternative<NumericColumn>(values); }
  std::size_t size() const;
  const NumericColumn& numeric() const;
  const CategoricalColumn& categorical() const;
  NumericColumn& numeric();
  CategoricalColumn& categorical();

  bool operator==(const Column& other) const = default;
};

/// Identity of one intersectional group: one categorical value per sensitive
/// column, ordered as the columns appear in the dataset. Lexicographic
/// ordering gives a stable group enumeration everywhere.
struct GroupKey {
  std::vector<std::string> parts;

  auto operator<=>(const GroupKey&) const = default;
  std::string joined(char sep = '|') const;
};

/// Immutable columnar table. Construction enforces structural soundness
/// (equal column lengths, at least one column); value-level invariants are
/// enforced by load_table and reported by validate_dataset.
class Dataset {
 public:
  explicit Dataset(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;
  std::vector<const Column*> columns_with_role(Role role) const;

  /// Per-row intersectional keys over all sensitive columns (dataset order).
  /// Errors when no sensitive column exists.
  std::vector<GroupKey> group_keys() const;

  bool operator==(const Dataset& other) const = default;

 private:
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

struct ValidationIssue {
  std::string code;
  std::string message;
  std::string column;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

/// Parses CSV text (header row, comma delimiter, double-quote quoting) into a
/// Dataset. Columns named in role_map receive that role and role-appropriate
/// typing; unnamed columns become features, numeric when every cell parses as
/// a number. Missing values are rejected.
Dataset load_table(std::istream& in, const std::map<std::string, Role>& role_map);
Dataset load_table(const std::string& csv_text, const std::map<std::string, Role>& role_map);

/// Inverse of load_table up to roles: header plus rows, numeric cells in
/// shortest round-trip form, categorical cells quoted when needed.
std::string write_csv(const Dataset& dataset);

/// Enumerates every violated dataset invariant as data rather than errors.
/// Warnings flag groups smaller than 10 rows and single-valued sensitive
/// columns.
ValidationReport validate_dataset(const Dataset& dataset);

struct SyntheticConfig {
  std::size_t n_rows = 0;
  // Group labels with sampling probabilities; kept sorted by label.
  std::vector<std::pair<std::string, double>> group_weights;
  // P(y=1 | group), keyed identically to group_weights.
  std::map<std::string, double> base_rates;
  double score_noise = 0.0;
  std::uint64_t seed = 0;
};

/// Parses {"n_rows", "group_weights", "base_rates", "score_noise", "seed"};
/// unknown keys are rejected.
SyntheticConfig parse_synthetic_config(const nlohmann::json& config);

/// Deterministic synthetic dataset: columns group (sensitive), y_true, score,
/// y_pred with score = clamp(0.5*y_true + 0.25 + N(0, score_noise), 0, 1) and
/// y_pred = 1[score > 0.5].
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace fairkit::data
