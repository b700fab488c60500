#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fairkit/error.hpp"
#include "fairkit/reductions.hpp"

namespace oracle {

std::optional<double> metric_value(const std::string& name, const std::vector<int>& y_true,
                                   const std::vector<double>& y_pred,
                                   const std::vector<double>& weights) {
  const std::size_t n = y_true.size();
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w(i);

  if (name == "count") return total;

  if (name == "accuracy") {
    if (total == 0.0) return std::nullopt;
    double correct = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((y_pred[i] == 1.0) == (y_true[i] == 1)) correct += w(i);
    }
    return correct / total;
  }
  if (name == "selection_rate") {
    if (total == 0.0) return std::nullopt;
    double selected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y_pred[i] == 1.0) selected += w(i);
    }
    return selected / total;
  }

  double pos = 0.0, neg = 0.0, tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool truth = y_true[i] == 1;
    const bool pred = y_pred[i] == 1.0;
    if (truth) {
      pos += w(i);
      if (pred) {
        tp += w(i);
      } else {
        fn += w(i);
      }
    } else {
      neg += w(i);
      if (pred) {
        fp += w(i);
      } else {
        tn += w(i);
      }
    }
  }
  if (name == "true_positive_rate") return pos == 0.0 ? std::nullopt : std::optional(tp / pos);
  if (name == "false_negative_rate") return pos == 0.0 ? std::nullopt : std::optional(fn / pos);
  if (name == "false_positive_rate") return neg == 0.0 ? std::nullopt : std::optional(fp / neg);
  if (name == "true_negative_rate") return neg == 0.0 ? std::nullopt : std::optional(tn / neg);
  if (name == "balanced_accuracy") {
    if (pos == 0.0 || neg == 0.0) return std::nullopt;
    return (tp / pos + tn / neg) / 2.0;
  }
  throw std::runtime_error("oracle: unknown metric " + name);
}

GroupbyResult groupby_metric(const std::string& name, const std::vector<int>& y_true,
                             const std::vector<double>& y_pred,
                             const std::vector<fairkit::data::GroupKey>& groups,
                             const std::vector<double>& weights) {
  GroupbyResult result;
  result.overall = metric_value(name, y_true, y_pred, weights);
  std::map<fairkit::data::GroupKey, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
  for (const auto& [key, rows] : members) {
    std::vector<int> yt;
    std::vector<double> yp;
    std::vector<double> w;
    for (const std::size_t i : rows) {
      yt.push_back(y_true[i]);
      yp.push_back(y_pred[i]);
      if (!weights.empty()) w.push_back(weights[i]);
    }
    result.by_group[key] = metric_value(name, yt, yp, w);
    result.sizes[key] = rows.size();
  }
  return result;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - mean_a) * (b[i] - mean_b);
    var_a += (a[i] - mean_a) * (a[i] - mean_a);
    var_b += (b[i] - mean_b) * (b[i] - mean_b);
  }
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return cov / std::sqrt(var_a * var_b);
}

double simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                        const std::vector<double>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  constexpr double kEps = 1e-11;
  for (const double bi : b) {
    if (bi < -kEps) throw std::runtime_error("simplex: b must be non-negative");
  }

  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][width - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];

  for (int iter = 0; iter < 100000; ++iter) {
    // Bland's rule: smallest-index entering column with a negative cost row.
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (T[m][j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) return T[m][width - 1];  // optimal

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] > kEps) {
        const double ratio = T[i][width - 1] / T[i][enter];
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps && (leave == m || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) throw std::runtime_error("simplex: unbounded problem");

    const double pivot = T[leave][enter];
    for (std::size_t j = 0; j < width; ++j) T[leave][j] /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double factor = T[i][enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) T[i][j] -= factor * T[leave][j];
    }
    basis[leave] = enter;
  }
  throw std::runtime_error("simplex: iteration limit reached");
}

namespace {

class MemorizingClassifier : public fairkit::reductions::Classifier {
 public:
  MemorizingClassifier(Eigen::MatrixXd X, std::vector<double> labels)
      : X_(std::move(X)), labels_(std::move(labels)) {}

  std::vector<double> predict(const Eigen::MatrixXd& X) const override {
    std::vector<double> out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      bool found = false;
      for (Eigen::Index r = 0; r < X_.rows(); ++r) {
        if (X.row(i) == X_.row(r)) {
          out[i] = labels_[static_cast<std::size_t>(r)];
          found = true;
          break;
        }
      }
      if (!found) throw std::runtime_error("enumeration learner: unseen row");
    }
    return out;
  }

  nlohmann::json to_json() const override {
    return {{"kind", "constant"}, {"params", {{"value", 0}}}};
  }

 private:
  Eigen::MatrixXd X_;
  std::vector<double> labels_;
};

}  // namespace

fairkit::reductions::Learner enumeration_learner() {
  return [](const Eigen::MatrixXd& X, const std::vector<int>& y,
            const std::vector<double>& weights) -> fairkit::reductions::ClassifierPtr {
    // Of all 2^n labelings, any one that matches y wherever the weight is
    // positive minimizes the weighted error; zero-weight rows get label 0.
    std::vector<double> labels(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (weights[i] > 0.0) labels[i] = y[i];
    }
    return std::make_shared<MemorizingClassifier>(X, std::move(labels));
  };
}

std::vector<double> moments_of(const fairkit::reductions::ConstraintSpec& spec,
                               const std::vector<int>& y_true, const std::vector<double>& preds,
                               const std::vector<fairkit::data::GroupKey>& groups) {
  std::vector<double> gamma;
  for (const fairkit::reductions::MomentTerm& term : spec.terms) {
    const fairkit::data::GroupKey& label = spec.group_labels[term.group];
    double cell_sum = 0.0, cell_n = 0.0, base_sum = 0.0, base_n = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (term.y_condition >= 0 && y_true[i] != term.y_condition) continue;
      base_sum += preds[i];
      base_n += 1.0;
      if (groups[i] == label) {
        cell_sum += preds[i];
        cell_n += 1.0;
      }
    }
    gamma.push_back(term.sign * (cell_sum / cell_n - base_sum / base_n));
  }
  return gamma;
}

double saddle_value(const fairkit::reductions::ConstraintSpec& spec,
                    const std::vector<int>& y_true,
                    const std::vector<fairkit::data::GroupKey>& groups, double bound) {
  const std::size_t n = y_true.size();
  if (n > 20) throw std::runtime_error("saddle oracle: too many rows");
  const std::size_t n_terms = spec.terms.size();

  // max over (v, lambda) of v  s.t.  v <= L(h, lambda) for every labeling h,
  // lambda in the l1 ball. Variables x = (v+, v-, lambda); constraints
  // v - sum_j gamma_hj lambda_j <= err_h and sum_j lambda_j <= bound.
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> preds(n);
    for (std::size_t i = 0; i < n; ++i) preds[i] = (mask >> i) & 1 ? 1.0 : 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err += y_true[i] == 1 ? 1.0 - preds[i] : preds[i];
    }
    err /= static_cast<double>(n);
    const std::vector<double> gamma = moments_of(spec, y_true, preds, groups);
    std::vector<double> row(2 + n_terms);
    row[0] = 1.0;
    row[1] = -1.0;
    for (std::size_t j = 0; j < n_terms; ++j) row[2 + j] = -(gamma[j] - spec.eps);
    A.push_back(std::move(row));
    b.push_back(err);
  }
  std::vector<double> cap(2 + n_terms, 0.0);
  for (std::size_t j = 0; j < n_terms; ++j) cap[2 + j] = 1.0;
  A.push_back(std::move(cap));
  b.push_back(bound);

  std::vector<double> c(2 + n_terms, 0.0);
  c[0] = 1.0;
  c[1] = -1.0;
  return simplex_maximize(A, b, c);
}

CliResult run_cli(const std::vector<std::string>& args) {
  std::string command = FAIRKIT_CLI_PATH;
  for (const std::string& arg : args) {
    command += " '" + arg + "'";
  }
  command += " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("failed to run: " + command);
  CliResult result;
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file_or_empty(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "fairkit_tests";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace oracle
