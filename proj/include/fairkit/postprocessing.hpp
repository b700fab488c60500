#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fairkit/data.hpp"

namespace fairkit::postprocessing {

/// Atomic decision rule. threshold predicts 1 iff score > param; constant
/// ignores the score; coin predicts 1 with probability param.
struct PrimitiveRule {
  enum class Kind { threshold, constant, coin };
  Kind kind = Kind::threshold;
  double param = 0.0;

  /// P(prediction = 1) for a given score.
  double expected_positive(double score) const;

  bool operator==(const PrimitiveRule&) const = default;
};

struct WeightedRule {
  double weight = 0.0;
  PrimitiveRule rule;

  bool operator==(const WeightedRule&) const = default;
};

struct OperatingPoint {
  std::optional<double> selection_rate;  // demographic-parity policies
  std::optional<double> fpr;             // rate-based policies
  std::optional<double> tpr;

  bool operator==(const OperatingPoint&) const = default;
};

struct GroupPolicy {
  data::GroupKey group;
  std::vector<WeightedRule> mixture;  // weights sum to 1, at most 3 components
  OperatingPoint operating_point;

  bool operator==(const GroupPolicy&) const = default;
};

enum class Constraint {
  demographic_parity,
  equalized_odds,
  true_positive_rate_parity,
  false_positive_rate_parity,
};

enum class Objective { accuracy, balanced_accuracy };

const char* to_string(Constraint c);
const char* to_string(Objective o);
/// Accepts the four constraint names plus the alias false_negative_rate_parity
/// (equivalent to true_positive_rate_parity since FNR = 1 - TPR).
Constraint constraint_from_name(const std::string& name);
Objective objective_from_name(const std::string& name);

struct ThresholdPolicy {
  std::string constraint;
  std::string objective;
  std::vector<GroupPolicy> groups;  // sorted by group key

  const GroupPolicy* find(const data::GroupKey& key) const;

  nlohmann::json to_json() const;
  static ThresholdPolicy from_json(const nlohmann::json& j);

  bool operator==(const ThresholdPolicy&) const = default;
};

/// One achievable ROC point of the group's score-thresholding rule family.
/// threshold is +inf for (0,0) and -inf for (1,1).
struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Upper concave envelope of a group's ROC points, evaluated as a function of
/// FPR over [0, 1].
struct RocHull {
  std::vector<RocPoint> vertices;  // strictly increasing FPR

  double value_at(double fpr) const;
};

/// Candidate operating points for thresholds {+inf} + distinct scores + -inf,
/// with predictions made by score > threshold. Errors on single-class input.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> y_true);

RocHull upper_convex_hull(std::vector<RocPoint> points);

/// Fits a per-group randomized thresholding policy that maximizes the
/// group-size-weighted objective subject to exact parity of the constrained
/// rate(s) across groups. The search grid is grid_size+1 uniform rates
/// augmented with every exactly-achievable vertex rate, so piecewise-linear
/// optima are not missed; ties break toward the smaller constrained rate.
ThresholdPolicy fit_threshold_optimizer(std::span<const double> scores,
                                        std::span<const int> y_true,
                                        const std::vector<data::GroupKey>& groups,
                                        Constraint constraint, Objective objective,
                                        int grid_size = 1000);

/// Samples one rule per row from the group's mixture and applies it; rows
/// consume the random stream in input order. Unseen groups are an error.
std::vector<int> predict_with_policy(const ThresholdPolicy& policy,
                                     std::span<const double> scores,
                                     const std::vector<data::GroupKey>& groups,
                                     std::uint64_t seed);

/// Per-row expected prediction under the policy (no sampling).
std::vector<double> expected_with_policy(const ThresholdPolicy& policy,
                                         std::span<const double> scores,
                                         const std::vector<data::GroupKey>& groups);

/// Analytic expected rates of a mixture on the given data: selection rate
/// always, (FPR, TPR) when both classes are present.
OperatingPoint analytic_rates(const std::vector<WeightedRule>& mixture,
                              std::span<const double> scores, std::span<const int> y_true);

}  // namespace fairkit::postprocessing
