#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fairkit/data.hpp"

namespace fairkit::metrics {

enum class BaseMetric {
  accuracy,
  selection_rate,
  true_positive_rate,
  false_positive_rate,
  false_negative_rate,
  true_negative_rate,
  balanced_accuracy,
  count,
};

std::string_view to_string(BaseMetric id);
std::optional<BaseMetric> base_metric_from_name(std::string_view name);
const std::vector<BaseMetric>& all_base_metrics();

/// A metric value; empty means undefined (zero denominator). Undefined values
/// are explicit markers, never NaN arithmetic.
using MetricValue = std::optional<double>;

/// Weighted confusion-matrix metric. Predictions may be expected predictions
/// in [0, 1]; binary inputs reproduce the standard definitions exactly.
/// Errors: mismatched lengths (shape), negative/non-finite/all-zero weights
/// (weight).
MetricValue evaluate_base_metric(BaseMetric id, std::span<const int> y_true,
                                 std::span<const double> y_pred,
                                 std::span<const double> sample_weight = {});

/// Library-level escape hatch: any named metric function can be disaggregated
/// alongside the built-in registry.
struct MetricFn {
  std::string name;
  std::function<MetricValue(std::span<const int>, std::span<const double>,
                            std::span<const double>)>
      fn;
};

enum class AggregationMethod { between_groups, to_overall };
enum class UndefinedPolicy { raise, skip };

struct MetricFrameResult {
  std::vector<std::string> metric_names;
  std::vector<MetricValue> overall;                    // aligned with metric_names
  std::vector<data::GroupKey> groups;                  // lexicographically sorted
  std::vector<std::vector<MetricValue>> by_group;      // [group][metric]
  std::vector<std::size_t> group_sizes;                // aligned with groups
  std::vector<std::string> flags;

  std::size_t metric_index(std::string_view name) const;  // config error if absent
  MetricValue group_value(const data::GroupKey& key, std::string_view metric) const;

  /// {"metrics": [...], "overall": {name: value|null},
  ///  "by_group": [{"group": [...], "values": {...}, "n": int}], "flags": [...]}
  nlohmann::json to_json() const;
};

MetricFrameResult disaggregate(const std::vector<BaseMetric>& ids,
                               std::span<const int> y_true, std::span<const double> y_pred,
                               const std::vector<data::GroupKey>& groups,
                               std::span<const double> sample_weight = {});
MetricFrameResult disaggregate(const std::vector<MetricFn>& fns, std::span<const int> y_true,
                               std::span<const double> y_pred,
                               const std::vector<data::GroupKey>& groups,
                               std::span<const double> sample_weight = {});

/// between_groups: max - min of group values. to_overall: max |group - overall|.
/// Always >= 0. skipped_flag (optional) reports whether undefined values were
/// skipped.
double difference(const MetricFrameResult& result, std::string_view metric,
                  AggregationMethod method, UndefinedPolicy policy = UndefinedPolicy::skip,
                  bool* skipped_flag = nullptr);

/// between_groups: min / max of group values. to_overall: min over groups of
/// min(v/overall, overall/v). 0/0 counts as 1, x/0 and 0/x as 0.
double ratio(const MetricFrameResult& result, std::string_view metric, AggregationMethod method,
             UndefinedPolicy policy = UndefinedPolicy::skip, bool* skipped_flag = nullptr);

double demographic_parity_difference(std::span<const double> y_pred,
                                     const std::vector<data::GroupKey>& groups);

/// Max of the between-group TPR difference and FPR difference; undefined group
/// rates are skipped, a rate with no defined group value contributes nothing.
double equalized_odds_difference(std::span<const int> y_true, std::span<const double> y_pred,
                                 const std::vector<data::GroupKey>& groups);

enum class Aggregation { difference, ratio };

using DerivedMetric = std::function<double(std::span<const int>, std::span<const double>,
                                           const std::vector<data::GroupKey>&)>;

/// Scalar metric equal to disaggregating `id` and applying the aggregation.
DerivedMetric make_derived_metric(BaseMetric id, Aggregation agg, AggregationMethod method);

}  // namespace fairkit::metrics
