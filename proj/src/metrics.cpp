#include "fairkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "fairkit/error.hpp"

namespace fairkit::metrics {

std::string_view to_string(BaseMetric id) {
  switch (id) {
    case BaseMetric::accuracy: return "accuracy";
    case BaseMetric::selection_rate: return "selection_rate";
    case BaseMetric::true_positive_rate: return "true_positive_rate";
    case BaseMetric::false_positive_rate: return "false_positive_rate";
    case BaseMetric::false_negative_rate: return "false_negative_rate";
    case BaseMetric::true_negative_rate: return "true_negative_rate";
    case BaseMetric::balanced_accuracy: return "balanced_accuracy";
    case BaseMetric::count: return "count";
  }
  return "unknown";
}

std::optional<BaseMetric> base_metric_from_name(std::string_view name) {
  for (const BaseMetric id : all_base_metrics()) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

const std::vector<BaseMetric>& all_base_metrics() {
  static const std::vector<BaseMetric> ids = {
      BaseMetric::accuracy,          BaseMetric::selection_rate,
      BaseMetric::true_positive_rate, BaseMetric::false_positive_rate,
      BaseMetric::false_negative_rate, BaseMetric::true_negative_rate,
      BaseMetric::balanced_accuracy, BaseMetric::count,
  };
  return ids;
}

namespace {

struct Confusion {
  double tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0;

  double total() const { return tp + fp + tn + fn; }
  double positives() const { return tp + fn; }
  double negatives() const { return fp + tn; }
};

// Expected confusion entries under possibly fractional predictions.
Confusion weighted_confusion(std::span<const int> y_true, std::span<const double> y_pred,
                             std::span<const double> weight) {
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double w = weight.empty() ? 1.0 : weight[i];
    const double p = y_pred[i];
    if (y_true[i] == 1) {
      c.tp += w * p;
      c.fn += w * (1.0 - p);
    } else {
      c.fp += w * p;
      c.tn += w * (1.0 - p);
    }
  }
  return c;
}

MetricValue rate(double numerator, double denominator) {
  if (denominator == 0.0) return std::nullopt;
  return numerator / denominator;
}

MetricValue metric_from_confusion(BaseMetric id, const Confusion& c) {
  switch (id) {
    case BaseMetric::accuracy: return rate(c.tp + c.tn, c.total());
    case BaseMetric::selection_rate: return rate(c.tp + c.fp, c.total());
    case BaseMetric::true_positive_rate: return rate(c.tp, c.positives());
    case BaseMetric::false_positive_rate: return rate(c.fp, c.negatives());
    case BaseMetric::false_negative_rate: return rate(c.fn, c.positives());
    case BaseMetric::true_negative_rate: return rate(c.tn, c.negatives());
    case BaseMetric::balanced_accuracy: {
      const MetricValue tpr = rate(c.tp, c.positives());
      const MetricValue tnr = rate(c.tn, c.negatives());
      if (!tpr || !tnr) return std::nullopt;
      return (*tpr + *tnr) / 2.0;
    }
    case BaseMetric::count: return c.total();
  }
  return std::nullopt;
}

void check_inputs(std::span<const int> y_true, std::span<const double> y_pred,
                  std::span<const double> weight) {
  if (y_true.size() != y_pred.size()) {
    fail(ErrorCode::shape, "y_true has " + std::to_string(y_true.size()) +
                               " entries, y_pred has " + std::to_string(y_pred.size()));
  }
  if (!weight.empty()) {
    if (weight.size() != y_true.size()) {
      fail(ErrorCode::shape, "sample_weight has " + std::to_string(weight.size()) +
                                 " entries, expected " + std::to_string(y_true.size()));
    }
    double total = 0.0;
    for (const double w : weight) {
      if (!std::isfinite(w) || w < 0.0) {
        fail(ErrorCode::weight, "sample weights must be finite and non-negative");
      }
      total += w;
    }
    if (total == 0.0) fail(ErrorCode::weight, "sample weights must not all be zero");
  }
}

}  // namespace

MetricValue evaluate_base_metric(BaseMetric id, std::span<const int> y_true,
                                 std::span<const double> y_pred,
                                 std::span<const double> sample_weight) {
  check_inputs(y_true, y_pred, sample_weight);
  return metric_from_confusion(id, weighted_confusion(y_true, y_pred, sample_weight));
}

std::size_t MetricFrameResult::metric_index(std::string_view name) const {
  for (std::size_t i = 0; i < metric_names.size(); ++i) {
    if (metric_names[i] == name) return i;
  }
  fail(ErrorCode::config, "metric '" + std::string(name) + "' is not part of this result");
}

MetricValue MetricFrameResult::group_value(const data::GroupKey& key,
                                           std::string_view metric) const {
  const std::size_t m = metric_index(metric);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g] == key) return by_group[g][m];
  }
  fail(ErrorCode::config, "group '" + key.joined() + "' is not part of this result");
}

nlohmann::json MetricFrameResult::to_json() const {
  nlohmann::json out;
  out["metrics"] = metric_names;
  nlohmann::json overall_obj = nlohmann::json::object();
  for (std::size_t m = 0; m < metric_names.size(); ++m) {
    if (overall[m]) {
      overall_obj[metric_names[m]] = *overall[m];
    } else {
      overall_obj[metric_names[m]] = nullptr;
    }
  }
  out["overall"] = std::move(overall_obj);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    nlohmann::json row;
    row["group"] = groups[g].parts;
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t m = 0; m < metric_names.size(); ++m) {
      if (by_group[g][m]) {
        values[metric_names[m]] = *by_group[g][m];
      } else {
        values[metric_names[m]] = nullptr;
      }
    }
    row["values"] = std::move(values);
    row["n"] = group_sizes[g];
    rows.push_back(std::move(row));
  }
  out["by_group"] = std::move(rows);
  out["flags"] = flags;
  return out;
}

namespace {

MetricFrameResult disaggregate_impl(const std::vector<MetricFn>& fns, std::span<const int> y_true,
                                    std::span<const double> y_pred,
                                    const std::vector<data::GroupKey>& groups,
                                    std::span<const double> weight) {
  if (fns.empty()) fail(ErrorCode::config, "at least one metric is required");
  if (groups.size() != y_true.size()) {
    fail(ErrorCode::shape, "sensitive features have " + std::to_string(groups.size()) +
                               " entries, expected " + std::to_string(y_true.size()));
  }
  check_inputs(y_true, y_pred, weight);

  MetricFrameResult result;
  for (const MetricFn& fn : fns) result.metric_names.push_back(fn.name);

  for (const MetricFn& fn : fns) {
    result.overall.push_back(fn.fn(y_true, y_pred, weight));
  }

  std::map<data::GroupKey, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);

  for (const auto& [key, rows] : members) {
    std::vector<int> yt(rows.size());
    std::vector<double> yp(rows.size());
    std::vector<double> w;
    if (!weight.empty()) w.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      yt[i] = y_true[rows[i]];
      yp[i] = y_pred[rows[i]];
      if (!weight.empty()) w[i] = weight[rows[i]];
    }
    std::vector<MetricValue> values;
    values.reserve(fns.size());
    for (const MetricFn& fn : fns) values.push_back(fn.fn(yt, yp, w));
    result.groups.push_back(key);
    result.by_group.push_back(std::move(values));
    result.group_sizes.push_back(rows.size());
  }
  return result;
}

MetricFn wrap_base_metric(BaseMetric id) {
  return {std::string(to_string(id)),
          [id](std::span<const int> yt, std::span<const double> yp, std::span<const double> w) {
            return metric_from_confusion(id, weighted_confusion(yt, yp, w));
          }};
}

}  // namespace

MetricFrameResult disaggregate(const std::vector<BaseMetric>& ids, std::span<const int> y_true,
                               std::span<const double> y_pred,
                               const std::vector<data::GroupKey>& groups,
                               std::span<const double> sample_weight) {
  std::vector<MetricFn> fns;
  fns.reserve(ids.size());
  for (const BaseMetric id : ids) fns.push_back(wrap_base_metric(id));
  return disaggregate_impl(fns, y_true, y_pred, groups, sample_weight);
}

MetricFrameResult disaggregate(const std::vector<MetricFn>& fns, std::span<const int> y_true,
                               std::span<const double> y_pred,
                               const std::vector<data::GroupKey>& groups,
                               std::span<const double> sample_weight) {
  return disaggregate_impl(fns, y_true, y_pred, groups, sample_weight);
}

namespace {

// Defined group values for a metric, enforcing the undefined-value policy.
std::vector<double> defined_group_values(const MetricFrameResult& result, std::size_t m,
                                         UndefinedPolicy policy, bool* skipped_flag) {
  std::vector<double> values;
  bool skipped = false;
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    const MetricValue& v = result.by_group[g][m];
    if (v) {
      values.push_back(*v);
    } else if (policy == UndefinedPolicy::raise) {
      fail(ErrorCode::undefined_value, "metric '" + result.metric_names[m] +
                                           "' is undefined for group '" +
                                           result.groups[g].joined() + "'");
    } else {
      skipped = true;
    }
  }
  if (values.empty()) {
    fail(ErrorCode::aggregation,
         "metric '" + result.metric_names[m] + "' is undefined for every group");
  }
  if (skipped_flag && skipped) *skipped_flag = true;
  return values;
}

double overall_or_raise(const MetricFrameResult& result, std::size_t m, UndefinedPolicy policy) {
  const MetricValue& v = result.overall[m];
  if (!v) {
    fail(policy == UndefinedPolicy::raise ? ErrorCode::undefined_value : ErrorCode::aggregation,
         "overall value of metric '" + result.metric_names[m] + "' is undefined");
  }
  return *v;
}

// min(a/b, b/a) with the 0/0 -> 1 and 0/x -> 0 conventions.
double symmetric_ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 1.0;
  if (a == 0.0 || b == 0.0) return 0.0;
  return std::min(a / b, b / a);
}

}  // namespace

double difference(const MetricFrameResult& result, std::string_view metric,
                  AggregationMethod method, UndefinedPolicy policy, bool* skipped_flag) {
  const std::size_t m = result.metric_index(metric);
  const std::vector<double> values = defined_group_values(result, m, policy, skipped_flag);
  if (method == AggregationMethod::between_groups) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
  }
  const double overall = overall_or_raise(result, m, policy);
  double worst = 0.0;
  for (const double v : values) worst = std::max(worst, std::abs(v - overall));
  return worst;
}

double ratio(const MetricFrameResult& result, std::string_view metric, AggregationMethod method,
             UndefinedPolicy policy, bool* skipped_flag) {
  const std::size_t m = result.metric_index(metric);
  const std::vector<double> values = defined_group_values(result, m, policy, skipped_flag);
  if (method == AggregationMethod::between_groups) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return symmetric_ratio(*lo, *hi);
  }
  const double overall = overall_or_raise(result, m, policy);
  double worst = 1.0;
  for (const double v : values) worst = std::min(worst, symmetric_ratio(v, overall));
  return worst;
}

double demographic_parity_difference(std::span<const double> y_pred,
                                     const std::vector<data::GroupKey>& groups) {
  std::vector<int> dummy_y(y_pred.size(), 0);
  const MetricFrameResult frame =
      disaggregate({BaseMetric::selection_rate}, dummy_y, y_pred, groups);
  return difference(frame, "selection_rate", AggregationMethod::between_groups);
}

double equalized_odds_difference(std::span<const int> y_true, std::span<const double> y_pred,
                                 const std::vector<data::GroupKey>& groups) {
  const MetricFrameResult frame = disaggregate(
      {BaseMetric::true_positive_rate, BaseMetric::false_positive_rate}, y_true, y_pred, groups);
  std::optional<double> worst;
  for (const char* name : {"true_positive_rate", "false_positive_rate"}) {
    try {
      const double d = difference(frame, name, AggregationMethod::between_groups);
      worst = worst ? std::max(*worst, d) : d;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::aggregation) throw;
      // rate undefined for every group: contributes nothing
    }
  }
  if (!worst) {
    fail(ErrorCode::aggregation, "both rates are undefined for every group");
  }
  return *worst;
}

DerivedMetric make_derived_metric(BaseMetric id, Aggregation agg, AggregationMethod method) {
  const std::string name(to_string(id));
  return [id, agg, method, name](std::span<const int> y_true, std::span<const double> y_pred,
                                 const std::vector<data::GroupKey>& groups) {
    const MetricFrameResult frame = disaggregate({id}, y_true, y_pred, groups);
    if (agg == Aggregation::difference) return difference(frame, name, method);
    return ratio(frame, name, method);
  };
}

}  // namespace fairkit::metrics
