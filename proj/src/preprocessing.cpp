#include "fairkit/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "fairkit/error.hpp"

namespace fairkit::preprocessing {

namespace {

struct Partition {
  std::vector<Eigen::Index> sensitive;    // column indices into X
  std::vector<Eigen::Index> passthrough;  // remaining columns, input order
};

Partition split_columns(const std::vector<std::string>& column_names,
                        const std::vector<std::string>& sensitive_cols) {
  const std::set<std::string> sensitive_set(sensitive_cols.begin(), sensitive_cols.end());
  for (const std::string& name : sensitive_cols) {
    if (std::find(column_names.begin(), column_names.end(), name) == column_names.end()) {
      fail(ErrorCode::schema, "sensitive column '" + name + "' not found");
    }
  }
  Partition p;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(column_names.size()); ++c) {
    if (sensitive_set.count(column_names[c])) {
      p.sensitive.push_back(c);
    } else {
      p.passthrough.push_back(c);
    }
  }
  return p;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = X.col(idx[i]);
  return out;
}

}  // namespace

CorrelationRemoverModel fit_correlation_remover(const Eigen::MatrixXd& X,
                                                const std::vector<std::string>& column_names,
                                                const std::vector<std::string>& sensitive_cols,
                                                double alpha) {
  if (alpha < 0.0 || alpha > 1.0) fail(ErrorCode::config, "alpha must lie in [0, 1]");
  if (static_cast<std::size_t>(X.cols()) != column_names.size()) {
    fail(ErrorCode::shape, "matrix has " + std::to_string(X.cols()) + " columns but " +
                               std::to_string(column_names.size()) + " names were given");
  }
  if (X.rows() < 2) fail(ErrorCode::data, "correlation removal needs at least 2 rows");
  if (sensitive_cols.empty()) fail(ErrorCode::config, "at least one sensitive column is required");
  if (!X.allFinite()) fail(ErrorCode::value, "input matrix contains non-finite values");

  const Partition part = split_columns(column_names, sensitive_cols);
  const Eigen::MatrixXd S = select_columns(X, part.sensitive);
  const Eigen::MatrixXd Z = select_columns(X, part.passthrough);

  CorrelationRemoverModel model;
  model.alpha = alpha;
  model.sensitive_means = S.colwise().mean();
  const Eigen::MatrixXd centered = S.rowwise() - model.sensitive_means.transpose();
  // Minimum-norm least squares via a rank-revealing decomposition; constant
  // or collinear sensitive columns yield zero coefficients instead of noise.
  model.coefficients = centered.completeOrthogonalDecomposition().solve(Z);
  for (const Eigen::Index c : part.sensitive) model.sensitive_cols.push_back(column_names[c]);
  for (const Eigen::Index c : part.passthrough) model.passthrough_cols.push_back(column_names[c]);
  return model;
}

Eigen::MatrixXd transform(const CorrelationRemoverModel& model, const Eigen::MatrixXd& X,
                          const std::vector<std::string>& column_names) {
  if (static_cast<std::size_t>(X.cols()) != column_names.size()) {
    fail(ErrorCode::shape, "matrix has " + std::to_string(X.cols()) + " columns but " +
                               std::to_string(column_names.size()) + " names were given");
  }
  std::vector<Eigen::Index> sensitive_idx;
  std::vector<Eigen::Index> passthrough_idx;
  for (const std::string& name : model.sensitive_cols) {
    const auto it = std::find(column_names.begin(), column_names.end(), name);
    if (it == column_names.end()) fail(ErrorCode::schema, "missing sensitive column '" + name + "'");
    sensitive_idx.push_back(static_cast<Eigen::Index>(it - column_names.begin()));
  }
  // Output order follows the input's non-sensitive order, which must cover
  // exactly the fitted passthrough columns.
  const std::set<std::string> sensitive_set(model.sensitive_cols.begin(), model.sensitive_cols.end());
  const std::set<std::string> expected(model.passthrough_cols.begin(), model.passthrough_cols.end());
  std::vector<std::string> passthrough_names;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(column_names.size()); ++c) {
    if (sensitive_set.count(column_names[c])) continue;
    if (!expected.count(column_names[c])) {
      fail(ErrorCode::schema, "column '" + column_names[c] + "' was not part of the fit");
    }
    passthrough_idx.push_back(c);
    passthrough_names.push_back(column_names[c]);
  }
  if (passthrough_names.size() != model.passthrough_cols.size()) {
    fail(ErrorCode::schema, "input is missing fitted passthrough columns");
  }

  const Eigen::MatrixXd S = select_columns(X, sensitive_idx);
  const Eigen::MatrixXd Z = select_columns(X, passthrough_idx);
  const Eigen::MatrixXd centered = S.rowwise() - model.sensitive_means.transpose();

  // Model coefficients are ordered by the fitted passthrough columns; realign
  // them to the input's column order.
  Eigen::MatrixXd coeffs(model.coefficients.rows(), model.coefficients.cols());
  for (std::size_t j = 0; j < passthrough_names.size(); ++j) {
    const auto it = std::find(model.passthrough_cols.begin(), model.passthrough_cols.end(),
                              passthrough_names[j]);
    coeffs.col(static_cast<Eigen::Index>(j)) =
        model.coefficients.col(it - model.passthrough_cols.begin());
  }

  const Eigen::MatrixXd residual = Z - centered * coeffs;
  return model.alpha * residual + (1.0 - model.alpha) * Z;
}

nlohmann::json CorrelationRemoverModel::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["sensitive_means"] = std::vector<double>(sensitive_means.data(),
                                             sensitive_means.data() + sensitive_means.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < coefficients.rows(); ++r) {
    std::vector<double> row(coefficients.cols());
    for (Eigen::Index c = 0; c < coefficients.cols(); ++c) row[c] = coefficients(r, c);
    rows.push_back(row);
  }
  j["coefficients"] = std::move(rows);
  j["sensitive_cols"] = sensitive_cols;
  j["passthrough_cols"] = passthrough_cols;
  return j;
}

CorrelationRemoverModel CorrelationRemoverModel::from_json(const nlohmann::json& j) {
  CorrelationRemoverModel model;
  try {
    model.alpha = j.at("alpha").get<double>();
    const auto means = j.at("sensitive_means").get<std::vector<double>>();
    model.sensitive_means = Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
    const auto rows = j.at("coefficients").get<std::vector<std::vector<double>>>();
    const Eigen::Index nrows = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index ncols = nrows > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    model.coefficients.resize(nrows, ncols);
    for (Eigen::Index r = 0; r < nrows; ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != ncols) {
        fail(ErrorCode::parse, "ragged coefficient matrix in model file");
      }
      for (Eigen::Index c = 0; c < ncols; ++c) model.coefficients(r, c) = rows[r][c];
    }
    model.sensitive_cols = j.at("sensitive_cols").get<std::vector<std::string>>();
    model.passthrough_cols = j.at("passthrough_cols").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("invalid correlation remover model: ") + e.what());
  }
  return model;
}

EncodedFrame encode_for_correlation_removal(const data::Dataset& dataset,
                                            const std::vector<std::string>& sensitive_cols) {
  if (sensitive_cols.empty()) fail(ErrorCode::config, "at least one sensitive column is required");
  const std::set<std::string> sensitive_set(sensitive_cols.begin(), sensitive_cols.end());
  for (const std::string& name : sensitive_cols) {
    if (!dataset.has_column(name)) fail(ErrorCode::schema, "sensitive column '" + name + "' not found");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(dataset.n_rows());
  std::vector<std::pair<std::string, Eigen::VectorXd>> encoded;
  std::vector<std::string> sensitive_encoded;

  for (const data::Column& col : dataset.columns()) {
    if (sensitive_set.count(col.name)) {
      if (col.is_numeric()) {
        Eigen::VectorXd v(n);
        for (Eigen::Index r = 0; r < n; ++r) v(r) = col.numeric()[r];
        encoded.emplace_back(col.name, std::move(v));
        sensitive_encoded.push_back(col.name);
      } else {
        // One-hot with the first (sorted) level dropped to avoid collinearity.
        std::set<std::string> levels(col.categorical().begin(), col.categorical().end());
        bool first = true;
        for (const std::string& level : levels) {
          if (first) {
            first = false;
            continue;
          }
          Eigen::VectorXd v(n);
          for (Eigen::Index r = 0; r < n; ++r) v(r) = col.categorical()[r] == level ? 1.0 : 0.0;
          const std::string name = col.name + "=" + level;
          encoded.emplace_back(name, std::move(v));
          sensitive_encoded.push_back(name);
        }
        if (levels.size() == 1) {
          // single-level column encodes to an all-zero column so the model
          // shape stays well-defined
          const std::string name = col.name + "=" + *levels.begin();
          encoded.emplace_back(name, Eigen::VectorXd::Zero(n));
          sensitive_encoded.push_back(name);
        }
      }
    } else {
      if (!col.is_numeric()) {
        fail(ErrorCode::value, "column '" + col.name + "' is not numeric and cannot be decorrelated");
      }
      Eigen::VectorXd v(n);
      for (Eigen::Index r = 0; r < n; ++r) v(r) = col.numeric()[r];
      encoded.emplace_back(col.name, std::move(v));
    }
  }

  EncodedFrame frame;
  frame.X.resize(n, static_cast<Eigen::Index>(encoded.size()));
  for (std::size_t c = 0; c < encoded.size(); ++c) {
    frame.column_names.push_back(encoded[c].first);
    frame.X.col(static_cast<Eigen::Index>(c)) = encoded[c].second;
  }
  frame.sensitive_encoded = std::move(sensitive_encoded);
  return frame;
}

}  // namespace fairkit::preprocessing
