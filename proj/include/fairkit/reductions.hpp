#pragma once

#include <cstdint>
#include <memory>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "fairkit/data.hpp"

namespace fairkit::reductions {

enum class ConstraintFamily { demographic_parity, equalized_odds };

const char* to_string(ConstraintFamily family);
ConstraintFamily constraint_family_from_name(const std::string& name);

/// One signed moment term:
///   sign * (E[h | cell] - E[h | base cell]) <= eps
/// where the cell is the group (optionally intersected with Y = y_condition)
/// and the base cell conditions on Y = y_condition only (all rows for
/// demographic parity).
struct MomentTerm {
  std::size_t group = 0;  // index into ConstraintSpec::group_labels
  int y_condition = -1;   // -1: none (demographic parity); 0/1: equalized odds
  int sign = +1;
};

struct ConstraintSpec {
  ConstraintFamily family = ConstraintFamily::demographic_parity;
  double eps = 0.0;
  std::vector<data::GroupKey> group_labels;  // sorted
  std::vector<MomentTerm> terms;
  std::vector<std::string> flags;  // notes about dropped empty cells
};

/// Compiles the family against the data. Demographic parity yields 2 terms per
/// group; equalized odds 4 per group, with empty (group, y) cells dropped and
/// flagged (or rejected under strict).
ConstraintSpec compile_constraint(ConstraintFamily family, double eps,
                                  std::span<const int> y_true,
                                  const std::vector<data::GroupKey>& groups,
                                  bool strict = false);

/// gamma_j = sign_j * (mean(preds | cell_j) - mean(preds | base_j)).
/// The constraint holds iff every entry is <= eps.
std::vector<double> moment_violations(const ConstraintSpec& spec, std::span<const int> y_true,
                                      std::span<const double> preds,
                                      const std::vector<data::GroupKey>& groups);

struct LambdaVector {
  std::vector<double> values;  // one per compiled term, >= 0
  double bound = 0.0;          // l1 cap
};

/// Nonnegative multipliers with sum <= bound, from free parameters theta:
/// lambda_j = bound * exp(theta_j) / (1 + sum_k exp(theta_k)).
std::vector<double> lambda_from_theta(std::span<const double> theta, double bound);

class Classifier {
 public:
  virtual ~Classifier() = default;
  /// Per-row hard predictions in {0, 1}.
  virtual std::vector<double> predict(const Eigen::MatrixXd& X) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;
using Learner = std::function<ClassifierPtr(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                            const std::vector<double>& weights)>;

/// Cost-sensitive best response: per-example signed cost difference
///   d_i = (1 - 2 y_i)/n + sum_j lambda_j * sign_j *
///         (1[i in cell_j]/|cell_j| - 1[i in base_j]/|base_j|),
/// relabel to 1[d_i < 0] with weights |d_i| and train. All-zero costs yield a
/// constant-0 classifier (all_zero_costs set when provided).
ClassifierPtr best_response(std::span<const double> lambda, const ConstraintSpec& spec,
                            const Eigen::MatrixXd& X, std::span<const int> y_true,
                            const std::vector<data::GroupKey>& groups, const Learner& learner,
                            bool* all_zero_costs = nullptr);

struct Diagnostics {
  int iterations = 0;
  double final_gap = 0.0;
  std::vector<double> best_lambda;
  bool converged = false;
  std::vector<std::string> flags;
};

struct RandomizedClassifier {
  std::vector<std::pair<double, ClassifierPtr>> components;  // weights sum to 1
  Diagnostics diagnostics;

  /// {"components": [{"w": ..., "model": {...}}], "diagnostics": {...}}
  nlohmann::json to_json() const;
};

struct EgOptions {
  double eps = 0.05;
  double bound = 100.0;  // l1 cap B on the multipliers
  double eta0 = 2.0;     // learning-rate scale; eta_t = eta0 / sqrt(t)
  double nu = 1e-6;      // duality-gap stopping tolerance
  int max_iter = 50;
};

/// Exponentiated-gradient saddle-point solver over (randomized classifier,
/// multipliers). Returns the uniform average of iterates at the best observed
/// duality gap; non-convergence is reported via diagnostics, not an error.
RandomizedClassifier exponentiated_gradient(const Eigen::MatrixXd& X, std::span<const int> y_true,
                                            const std::vector<data::GroupKey>& groups,
                                            const Learner& learner, ConstraintFamily family,
                                            const EgOptions& options = {});

/// max over lambda in the l1 ball of radius bound of L(Q, lambda) minus min
/// over classifiers of L(h, lambda_bar); the certificate reported as
/// final_gap.
double duality_gap(const RandomizedClassifier& q, std::span<const double> lambda, double bound,
                   const ConstraintSpec& spec, const Eigen::MatrixXd& X,
                   std::span<const int> y_true, const std::vector<data::GroupKey>& groups,
                   const Learner& learner);

/// Classification error of expected predictions: mean of y(1-p) + (1-y)p.
double expected_error(std::span<const int> y_true, std::span<const double> preds);

enum class PredictMode { expectation, sample };

std::vector<double> predict_randomized(const RandomizedClassifier& q, const Eigen::MatrixXd& X,
                                       PredictMode mode, std::uint64_t seed = 0);

enum class LearnerKind { logistic_regression, decision_stump };

struct LearnerHyperparams {
  double l2 = 0.0;
  int max_epochs = 2000;
  double tol = 1e-8;
  double step = 0.5;
};

/// Built-in deterministic weighted learners. Logistic regression minimizes the
/// weighted mean log-loss plus l2*||w||^2/2 by full-batch gradient descent from
/// zero; the stump exhaustively minimizes weighted 0-1 error.
ClassifierPtr train_weighted_learner(LearnerKind kind, const Eigen::MatrixXd& X,
                                     const std::vector<int>& y, const std::vector<double>& weights,
                                     const LearnerHyperparams& hp = {});

Learner make_learner(LearnerKind kind, const LearnerHyperparams& hp = {});

ClassifierPtr classifier_from_json(const nlohmann::json& j);
RandomizedClassifier randomized_classifier_from_json(const nlohmann::json& j);

}  // namespace fairkit::reductions
