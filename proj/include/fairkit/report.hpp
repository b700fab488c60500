#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fairkit/data.hpp"
#include "fairkit/metrics.hpp"

namespace fairkit::report {

struct ComparisonRow {
  std::string model_name;
  double performance = 0.0;
  double fairness = 0.0;  // disparity; lower is better
  bool pareto = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::string performance_metric;
  std::string fairness_metric;

  nlohmann::json to_json() const;
};

/// Fairness-metric names accepted at the tool boundary:
///   demographic_parity_difference
///   equalized_odds_difference
///   <base>.difference[.between_groups|.to_overall]
///   <base>.ratio[.between_groups|.to_overall]
struct FairnessMetricSpec {
  enum class Kind { demographic_parity_difference, equalized_odds_difference, derived };
  Kind kind = Kind::demographic_parity_difference;
  metrics::BaseMetric base = metrics::BaseMetric::selection_rate;
  metrics::Aggregation agg = metrics::Aggregation::difference;
  metrics::AggregationMethod method = metrics::AggregationMethod::between_groups;

  static FairnessMetricSpec parse(const std::string& name);
  std::string name() const;
  double evaluate(std::span<const int> y_true, std::span<const double> y_pred,
                  const std::vector<data::GroupKey>& groups) const;
};

/// Scores every model on the shared axes and marks Pareto rows: a row is
/// Pareto iff no other row is at least as performant and at most as disparate
/// with one of the two strict.
ComparisonTable compare_models(
    const std::vector<std::pair<std::string, std::vector<double>>>& models,
    std::span<const int> y_true, const std::vector<data::GroupKey>& groups,
    metrics::BaseMetric performance_metric, const FairnessMetricSpec& fairness_metric);

struct ReportMetadata {
  std::string version;
  std::string input_digest;
  std::string timestamp;  // informational only; never rendered
};

struct Report {
  enum class Kind { assessment, comparison };
  Kind kind = Kind::assessment;
  std::optional<metrics::MetricFrameResult> assessment;
  std::optional<ComparisonTable> comparison;
  ReportMetadata metadata;
};

enum class Format { json, csv, svg };

Format format_from_name(const std::string& name);

/// Renders the report. JSON wraps the payload with kind and metadata; CSV
/// flattens one row per group x metric (assessments) or per model
/// (comparisons); SVG is a self-contained 800x600 scatter for comparisons
/// only.
std::string render_report(const Report& report, Format format);

/// FNV-1a fingerprint of raw input bytes, rendered as "fnv1a:<hex>".
std::string input_digest(std::string_view bytes);

}  // namespace fairkit::report
