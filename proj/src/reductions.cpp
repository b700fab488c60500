#include "fairkit/reductions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "fairkit/error.hpp"
#include "fairkit/random.hpp"

namespace fairkit::reductions {

const char* to_string(ConstraintFamily family) {
  return family == ConstraintFamily::demographic_parity ? "demographic_parity"
                                                        : "equalized_odds";
}

ConstraintFamily constraint_family_from_name(const std::string& name) {
  if (name == "demographic_parity") return ConstraintFamily::demographic_parity;
  if (name == "equalized_odds") return ConstraintFamily::equalized_odds;
  fail(ErrorCode::config, "unknown constraint family '" + name + "'");
}

ConstraintSpec compile_constraint(ConstraintFamily family, double eps,
                                  std::span<const int> y_true,
                                  const std::vector<data::GroupKey>& groups, bool strict) {
  if (eps < 0.0) fail(ErrorCode::config, "eps must be non-negative");
  if (groups.empty()) fail(ErrorCode::data, "no rows to compile constraints over");
  if (y_true.size() != groups.size()) {
    fail(ErrorCode::shape, "labels and sensitive features have different lengths");
  }

  ConstraintSpec spec;
  spec.family = family;
  spec.eps = eps;

  std::map<data::GroupKey, std::array<std::size_t, 2>> cell_sizes;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto& cells = cell_sizes[groups[i]];
    ++cells[y_true[i] == 1 ? 1 : 0];
  }
  for (const auto& [key, cells] : cell_sizes) {
    (void)cells;
    spec.group_labels.push_back(key);
  }

  for (std::size_t g = 0; g < spec.group_labels.size(); ++g) {
    const auto& cells = cell_sizes.at(spec.group_labels[g]);
    if (family == ConstraintFamily::demographic_parity) {
      spec.terms.push_back({g, -1, +1});
      spec.terms.push_back({g, -1, -1});
    } else {
      for (int y = 0; y <= 1; ++y) {
        if (cells[y] == 0) {
          const std::string note = "dropped equalized-odds terms for group '" +
                                   spec.group_labels[g].joined() + "', y=" + std::to_string(y) +
                                   ": empty cell";
          if (strict) fail(ErrorCode::moment, note);
          spec.flags.push_back(note);
          continue;
        }
        spec.terms.push_back({g, y, +1});
        spec.terms.push_back({g, y, -1});
      }
    }
  }
  return spec;
}

namespace {

// Membership bookkeeping shared by moment evaluation and the best response.
// Slot 0 conditions on y=0, slot 1 on y=1, slot 2 on nothing.
struct CellIndex {
  std::vector<std::size_t> row_group;
  std::vector<std::array<double, 3>> cell_count;  // [group][slot]
  std::array<double, 3> base_count = {0.0, 0.0, 0.0};

  static int slot(int y_condition) { return y_condition < 0 ? 2 : y_condition; }
};

CellIndex build_cell_index(const ConstraintSpec& spec, std::span<const int> y_true,
                           const std::vector<data::GroupKey>& groups) {
  std::map<data::GroupKey, std::size_t> group_index;
  for (std::size_t g = 0; g < spec.group_labels.size(); ++g) {
    group_index[spec.group_labels[g]] = g;
  }
  CellIndex index;
  index.row_group.resize(groups.size());
  index.cell_count.assign(spec.group_labels.size(), {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto it = group_index.find(groups[i]);
    if (it == group_index.end()) {
      fail(ErrorCode::data, "group '" + groups[i].joined() + "' was not compiled");
    }
    index.row_group[i] = it->second;
    const int y = y_true[i] == 1 ? 1 : 0;
    index.cell_count[it->second][y] += 1.0;
    index.cell_count[it->second][2] += 1.0;
    index.base_count[y] += 1.0;
    index.base_count[2] += 1.0;
  }
  return index;
}

}  // namespace

std::vector<double> moment_violations(const ConstraintSpec& spec, std::span<const int> y_true,
                                      std::span<const double> preds,
                                      const std::vector<data::GroupKey>& groups) {
  if (preds.size() != groups.size() || preds.size() != y_true.size()) {
    fail(ErrorCode::shape, "predictions, labels and sensitive features have different lengths");
  }
  const CellIndex index = build_cell_index(spec, y_true, groups);

  std::vector<std::array<double, 3>> cell_sum(spec.group_labels.size(), {0.0, 0.0, 0.0});
  std::array<double, 3> base_sum = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int y = y_true[i] == 1 ? 1 : 0;
    cell_sum[index.row_group[i]][y] += preds[i];
    cell_sum[index.row_group[i]][2] += preds[i];
    base_sum[y] += preds[i];
    base_sum[2] += preds[i];
  }

  std::vector<double> gamma(spec.terms.size());
  for (std::size_t j = 0; j < spec.terms.size(); ++j) {
    const MomentTerm& term = spec.terms[j];
    const int slot = CellIndex::slot(term.y_condition);
    const double cell = index.cell_count[term.group][slot];
    const double base = index.base_count[slot];
    if (cell == 0.0 || base == 0.0) {
      fail(ErrorCode::moment, "empty conditioning cell for a compiled term");
    }
    gamma[j] = term.sign * (cell_sum[term.group][slot] / cell - base_sum[slot] / base);
  }
  return gamma;
}

std::vector<double> lambda_from_theta(std::span<const double> theta, double bound) {
  // Shift by the largest positive exponent so the softmax-with-slack stays
  // finite; the implicit slack coordinate has exponent 0.
  double shift = 0.0;
  for (const double t : theta) shift = std::max(shift, t);
  double denom = std::exp(-shift);
  for (const double t : theta) denom += std::exp(t - shift);
  std::vector<double> lambda(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    lambda[j] = bound * std::exp(theta[j] - shift) / denom;
  }
  return lambda;
}

namespace {

class ConstantClassifier : public Classifier {
 public:
  explicit ConstantClassifier(int value) : value_(value) {}

  std::vector<double> predict(const Eigen::MatrixXd& X) const override {
    return std::vector<double>(X.rows(), static_cast<double>(value_));
  }

  nlohmann::json to_json() const override {
    return {{"kind", "constant"}, {"params", {{"value", value_}}}};
  }

 private:
  int value_;
};

class LinearModel : public Classifier {
 public:
  LinearModel(Eigen::VectorXd weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}

  std::vector<double> predict(const Eigen::MatrixXd& X) const override {
    if (X.cols() != weights_.size()) {
      fail(ErrorCode::shape, "model expects " + std::to_string(weights_.size()) +
                                 " features, got " + std::to_string(X.cols()));
    }
    const Eigen::VectorXd z = X * weights_;
    std::vector<double> out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out[i] = z(i) + bias_ > 0.0 ? 1.0 : 0.0;  // sigma(z) > 0.5 iff z > 0
    }
    return out;
  }

  nlohmann::json to_json() const override {
    return {{"kind", "logistic_regression"},
            {"params",
             {{"weights", std::vector<double>(weights_.data(), weights_.data() + weights_.size())},
              {"bias", bias_}}}};
  }

 private:
  Eigen::VectorXd weights_;
  double bias_;
};

class DecisionStump : public Classifier {
 public:
  DecisionStump(Eigen::Index feature, double threshold, int polarity)
      : feature_(feature), threshold_(threshold), polarity_(polarity) {}

  std::vector<double> predict(const Eigen::MatrixXd& X) const override {
    if (feature_ >= X.cols()) {
      fail(ErrorCode::shape, "model splits on feature " + std::to_string(feature_) +
                                 " but input has " + std::to_string(X.cols()) + " features");
    }
    std::vector<double> out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const bool above = X(i, feature_) > threshold_;
      out[i] = (polarity_ > 0 ? above : !above) ? 1.0 : 0.0;
    }
    return out;
  }

  nlohmann::json to_json() const override {
    return {{"kind", "decision_stump"},
            {"params",
             {{"feature", feature_}, {"threshold", threshold_}, {"polarity", polarity_}}}};
  }

 private:
  Eigen::Index feature_;
  double threshold_;
  int polarity_;  // +1: predict 1 iff x > threshold; -1: predict 1 iff x <= threshold
};

ClassifierPtr train_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                             const std::vector<double>& weights, const LearnerHyperparams& hp) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::VectorXd w_norm(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += weights[i];
  for (Eigen::Index i = 0; i < n; ++i) w_norm(i) = weights[i] / total;
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) target(i) = y[i];

  Eigen::VectorXd coef = Eigen::VectorXd::Zero(d);
  double bias = 0.0;
  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    const Eigen::VectorXd z = X * coef + Eigen::VectorXd::Constant(n, bias);
    const Eigen::VectorXd sigma = (1.0 + (-z.array()).exp()).inverse().matrix();
    const Eigen::VectorXd residual = (sigma - target).cwiseProduct(w_norm);
    const Eigen::VectorXd grad = X.transpose() * residual + hp.l2 * coef;
    const double grad_bias = residual.sum();
    const double norm = std::sqrt(grad.squaredNorm() + grad_bias * grad_bias);
    if (norm <= hp.tol) break;
    coef -= hp.step * grad;
    bias -= hp.step * grad_bias;
  }
  return std::make_shared<LinearModel>(std::move(coef), bias);
}

ClassifierPtr train_stump(const Eigen::MatrixXd& X, const std::vector<int>& y,
                          const std::vector<double>& weights) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  double total_w = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total_w += weights[i];

  Eigen::Index best_feature = 0;
  double best_threshold = 0.0;
  int best_polarity = +1;
  double best_error = std::numeric_limits<double>::infinity();

  for (Eigen::Index f = 0; f < d; ++f) {
    std::vector<double> values(n);
    for (Eigen::Index i = 0; i < n; ++i) values[i] = X(i, f);
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> thresholds;
    thresholds.push_back(distinct.front() - 1.0);  // constant splits
    for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
      thresholds.push_back((distinct[k] + distinct[k + 1]) / 2.0);
    }

    for (const double theta : thresholds) {
      double err_pos = 0.0;  // predict 1 iff x > theta
      for (Eigen::Index i = 0; i < n; ++i) {
        const int pred = values[i] > theta ? 1 : 0;
        if (pred != y[i]) err_pos += weights[i];
      }
      const double err_neg = total_w - err_pos;
      for (const int polarity : {+1, -1}) {
        const double err = polarity > 0 ? err_pos : err_neg;
        if (err < best_error - 1e-15) {
          best_error = err;
          best_feature = f;
          best_threshold = theta;
          best_polarity = polarity;
        }
      }
    }
  }
  return std::make_shared<DecisionStump>(best_feature, best_threshold, best_polarity);
}

}  // namespace

ClassifierPtr train_weighted_learner(LearnerKind kind, const Eigen::MatrixXd& X,
                                     const std::vector<int>& y, const std::vector<double>& weights,
                                     const LearnerHyperparams& hp) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  if (y.size() != n || weights.size() != n) {
    fail(ErrorCode::shape, "features, labels and weights have different lengths");
  }
  if (n == 0) fail(ErrorCode::data, "cannot train on an empty dataset");
  if (!X.allFinite()) fail(ErrorCode::data, "features must be finite");
  double total = 0.0;
  for (const double w : weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::weight, "weights must be finite and non-negative");
    total += w;
  }
  if (total == 0.0) fail(ErrorCode::weight, "weights must not all be zero");

  if (kind == LearnerKind::logistic_regression) return train_logistic(X, y, weights, hp);
  return train_stump(X, y, weights);
}

Learner make_learner(LearnerKind kind, const LearnerHyperparams& hp) {
  return [kind, hp](const Eigen::MatrixXd& X, const std::vector<int>& y,
                    const std::vector<double>& weights) {
    return train_weighted_learner(kind, X, y, weights, hp);
  };
}

ClassifierPtr best_response(std::span<const double> lambda, const ConstraintSpec& spec,
                            const Eigen::MatrixXd& X, std::span<const int> y_true,
                            const std::vector<data::GroupKey>& groups, const Learner& learner,
                            bool* all_zero_costs) {
  if (lambda.size() != spec.terms.size()) {
    fail(ErrorCode::shape, "lambda has " + std::to_string(lambda.size()) + " entries, expected " +
                               std::to_string(spec.terms.size()));
  }
  const std::size_t n = y_true.size();
  if (static_cast<std::size_t>(X.rows()) != n || groups.size() != n) {
    fail(ErrorCode::shape, "features, labels and sensitive features have different lengths");
  }
  const CellIndex index = build_cell_index(spec, y_true, groups);

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = (1.0 - 2.0 * y_true[i]) / static_cast<double>(n);
  }
  for (std::size_t j = 0; j < spec.terms.size(); ++j) {
    if (lambda[j] == 0.0) continue;
    const MomentTerm& term = spec.terms[j];
    const int slot = CellIndex::slot(term.y_condition);
    const double cell = index.cell_count[term.group][slot];
    const double base = index.base_count[slot];
    for (std::size_t i = 0; i < n; ++i) {
      if (term.y_condition >= 0 && y_true[i] != term.y_condition) continue;
      const double in_cell = index.row_group[i] == term.group ? 1.0 / cell : 0.0;
      d[i] += lambda[j] * term.sign * (in_cell - 1.0 / base);
    }
  }

  std::vector<int> relabel(n);
  std::vector<double> weights(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    relabel[i] = d[i] < 0.0 ? 1 : 0;
    weights[i] = std::abs(d[i]);
    if (weights[i] > 0.0) any = true;
  }
  if (all_zero_costs) *all_zero_costs = !any;
  if (!any) return std::make_shared<ConstantClassifier>(0);
  return learner(X, relabel, weights);
}

double expected_error(std::span<const int> y_true, std::span<const double> preds) {
  double err = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    err += y_true[i] == 1 ? 1.0 - preds[i] : preds[i];
  }
  return err / static_cast<double>(y_true.size());
}

namespace {

double lagrangian(double err, std::span<const double> gamma, std::span<const double> lambda,
                  double eps) {
  double value = err;
  for (std::size_t j = 0; j < lambda.size(); ++j) value += lambda[j] * (gamma[j] - eps);
  return value;
}

// max over {lambda >= 0, sum <= bound}: attained at 0 or at bound * e_j for
// the most violated term.
double max_over_lambda(double err, std::span<const double> gamma, double eps, double bound) {
  double worst = 0.0;
  for (const double g : gamma) worst = std::max(worst, g - eps);
  return err + bound * worst;
}

double gap_of(std::span<const double> q_preds, std::span<const double> lambda_bar, double bound,
              const ConstraintSpec& spec, const Eigen::MatrixXd& X, std::span<const int> y_true,
              const std::vector<data::GroupKey>& groups, const Learner& learner) {
  const std::vector<double> gamma_q = moment_violations(spec, y_true, q_preds, groups);
  const double top = max_over_lambda(expected_error(y_true, q_preds), gamma_q, spec.eps, bound);

  const ClassifierPtr h = best_response(lambda_bar, spec, X, y_true, groups, learner);
  const std::vector<double> h_preds = h->predict(X);
  const std::vector<double> gamma_h = moment_violations(spec, y_true, h_preds, groups);
  const double bottom =
      lagrangian(expected_error(y_true, h_preds), gamma_h, lambda_bar, spec.eps);
  return top - bottom;
}

}  // namespace

double duality_gap(const RandomizedClassifier& q, std::span<const double> lambda, double bound,
                   const ConstraintSpec& spec, const Eigen::MatrixXd& X,
                   std::span<const int> y_true, const std::vector<data::GroupKey>& groups,
                   const Learner& learner) {
  std::vector<double> q_preds(y_true.size(), 0.0);
  for (const auto& [w, h] : q.components) {
    const std::vector<double> p = h->predict(X);
    for (std::size_t i = 0; i < q_preds.size(); ++i) q_preds[i] += w * p[i];
  }
  return gap_of(q_preds, lambda, bound, spec, X, y_true, groups, learner);
}

RandomizedClassifier exponentiated_gradient(const Eigen::MatrixXd& X, std::span<const int> y_true,
                                            const std::vector<data::GroupKey>& groups,
                                            const Learner& learner, ConstraintFamily family,
                                            const EgOptions& options) {
  if (options.max_iter < 1) fail(ErrorCode::config, "max_iter must be at least 1");
  if (options.bound <= 0.0) fail(ErrorCode::config, "the multiplier bound must be positive");
  const ConstraintSpec spec = compile_constraint(family, options.eps, y_true, groups);
  const std::size_t n = y_true.size();
  const std::size_t n_terms = spec.terms.size();

  std::vector<double> theta(n_terms, 0.0);
  std::vector<double> lambda_sum(n_terms, 0.0);
  std::vector<double> pred_sum(n, 0.0);
  std::vector<ClassifierPtr> iterates;

  double best_gap = std::numeric_limits<double>::infinity();
  int best_t = 0;
  std::vector<double> best_lambda_bar(n_terms, 0.0);
  bool converged = false;
  bool flagged_zero_costs = false;
  int iterations = 0;

  std::vector<double> q_preds(n);
  std::vector<double> lambda_bar(n_terms);

  for (int t = 1; t <= options.max_iter; ++t) {
    iterations = t;
    const std::vector<double> lambda = lambda_from_theta(theta, options.bound);
    bool all_zero = false;
    ClassifierPtr h = best_response(lambda, spec, X, y_true, groups, learner, &all_zero);
    if (all_zero && !flagged_zero_costs) flagged_zero_costs = true;
    std::vector<double> preds = h->predict(X);

    for (std::size_t i = 0; i < n; ++i) pred_sum[i] += preds[i];
    for (std::size_t j = 0; j < n_terms; ++j) lambda_sum[j] += lambda[j];
    iterates.push_back(h);

    for (std::size_t i = 0; i < n; ++i) q_preds[i] = pred_sum[i] / t;
    for (std::size_t j = 0; j < n_terms; ++j) lambda_bar[j] = lambda_sum[j] / t;
    const double gap =
        gap_of(q_preds, lambda_bar, options.bound, spec, X, y_true, groups, learner);
    if (gap < best_gap) {
      best_gap = gap;
      best_t = t;
      best_lambda_bar = lambda_bar;
    }
    if (gap <= options.nu) {
      converged = true;
      break;
    }

    const std::vector<double> gamma = moment_violations(spec, y_true, preds, groups);
    const double eta = options.eta0 / std::sqrt(static_cast<double>(t));
    for (std::size_t j = 0; j < n_terms; ++j) theta[j] += eta * (gamma[j] - options.eps);
  }

  // Uniform average over the first best_t iterates, with identical classifiers
  // merged (identical training predictions imply an identical component).
  RandomizedClassifier result;
  std::map<std::vector<double>, std::pair<std::size_t, ClassifierPtr>> merged;
  std::vector<std::vector<double>> order;
  for (int t = 0; t < best_t; ++t) {
    std::vector<double> preds = iterates[static_cast<std::size_t>(t)]->predict(X);
    auto it = merged.find(preds);
    if (it == merged.end()) {
      merged.emplace(preds, std::make_pair(std::size_t{1}, iterates[static_cast<std::size_t>(t)]));
      order.push_back(std::move(preds));
    } else {
      ++it->second.first;
    }
  }
  for (const auto& key : order) {
    const auto& [count, h] = merged.at(key);
    result.components.emplace_back(static_cast<double>(count) / static_cast<double>(best_t), h);
  }

  result.diagnostics.iterations = iterations;
  result.diagnostics.best_lambda = best_lambda_bar;
  result.diagnostics.converged = converged;
  result.diagnostics.flags = spec.flags;
  if (flagged_zero_costs) {
    result.diagnostics.flags.push_back("best response saw all-zero costs; returned constant 0");
  }
  if (!converged) {
    result.diagnostics.flags.push_back("did not reach the gap tolerance; returning best iterate");
  }
  // Recomputed on the returned representation so the reported certificate is
  // reproducible from the artifact itself.
  result.diagnostics.final_gap = duality_gap(result, best_lambda_bar, options.bound, spec, X,
                                             y_true, groups, learner);
  return result;
}

std::vector<double> predict_randomized(const RandomizedClassifier& q, const Eigen::MatrixXd& X,
                                       PredictMode mode, std::uint64_t seed) {
  if (q.components.empty()) fail(ErrorCode::data, "randomized classifier has no components");
  std::vector<std::vector<double>> preds;
  preds.reserve(q.components.size());
  for (const auto& [w, h] : q.components) {
    (void)w;
    preds.push_back(h->predict(X));
  }
  const std::size_t n = static_cast<std::size_t>(X.rows());
  std::vector<double> out(n, 0.0);
  if (mode == PredictMode::expectation) {
    for (std::size_t k = 0; k < q.components.size(); ++k) {
      for (std::size_t i = 0; i < n; ++i) out[i] += q.components[k].first * preds[k][i];
    }
    return out;
  }
  RandomStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    double cum = 0.0;
    std::size_t pick = q.components.size() - 1;
    for (std::size_t k = 0; k < q.components.size(); ++k) {
      cum += q.components[k].first;
      if (u < cum) {
        pick = k;
        break;
      }
    }
    out[i] = preds[pick][i];
  }
  return out;
}

nlohmann::json RandomizedClassifier::to_json() const {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& [w, h] : components) {
    comps.push_back({{"w", w}, {"model", h->to_json()}});
  }
  nlohmann::json diag;
  diag["iterations"] = diagnostics.iterations;
  diag["final_gap"] = diagnostics.final_gap;
  diag["best_lambda"] = diagnostics.best_lambda;
  diag["converged"] = diagnostics.converged;
  diag["flags"] = diagnostics.flags;
  return {{"components", std::move(comps)}, {"diagnostics", std::move(diag)}};
}

ClassifierPtr classifier_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json& params = j.at("params");
    if (kind == "logistic_regression") {
      const auto weights = params.at("weights").get<std::vector<double>>();
      Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size());
      return std::make_shared<LinearModel>(std::move(w), params.at("bias").get<double>());
    }
    if (kind == "decision_stump") {
      return std::make_shared<DecisionStump>(params.at("feature").get<Eigen::Index>(),
                                             params.at("threshold").get<double>(),
                                             params.at("polarity").get<int>());
    }
    if (kind == "constant") {
      return std::make_shared<ConstantClassifier>(params.at("value").get<int>());
    }
    fail(ErrorCode::parse, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("invalid model: ") + e.what());
  }
}

RandomizedClassifier randomized_classifier_from_json(const nlohmann::json& j) {
  RandomizedClassifier q;
  try {
    double total = 0.0;
    for (const nlohmann::json& entry : j.at("components")) {
      const double w = entry.at("w").get<double>();
      if (w < 0.0) fail(ErrorCode::parse, "negative component weight in model file");
      total += w;
      q.components.emplace_back(w, classifier_from_json(entry.at("model")));
    }
    if (q.components.empty()) fail(ErrorCode::parse, "model file has no components");
    if (std::abs(total - 1.0) > 1e-9) {
      fail(ErrorCode::parse, "component weights do not sum to 1");
    }
    if (j.contains("diagnostics")) {
      const nlohmann::json& diag = j["diagnostics"];
      q.diagnostics.iterations = diag.value("iterations", 0);
      q.diagnostics.final_gap = diag.value("final_gap", 0.0);
      q.diagnostics.best_lambda = diag.value("best_lambda", std::vector<double>{});
      q.diagnostics.converged = diag.value("converged", false);
      q.diagnostics.flags = diag.value("flags", std::vector<std::string>{});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("invalid randomized classifier: ") + e.what());
  }
  return q;
}

}  // namespace fairkit::reductions
