#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "fairkit/data.hpp"

namespace fairkit::preprocessing {

/// Linear projection that removes the correlation between the non-sensitive
/// columns and the (centered) sensitive columns on the fitting data, blended
/// with the identity by alpha.
struct CorrelationRemoverModel {
  double alpha = 1.0;
  Eigen::VectorXd sensitive_means;   // one per sensitive column
  Eigen::MatrixXd coefficients;      // sensitive columns x passthrough columns
  std::vector<std::string> sensitive_cols;
  std::vector<std::string> passthrough_cols;

  nlohmann::json to_json() const;
  static CorrelationRemoverModel from_json(const nlohmann::json& j);
};

/// Least-squares fit of the passthrough block against the centered sensitive
/// block; rank-deficient sensitive blocks get the minimum-norm solution.
CorrelationRemoverModel fit_correlation_remover(const Eigen::MatrixXd& X,
                                                const std::vector<std::string>& column_names,
                                                const std::vector<std::string>& sensitive_cols,
                                                double alpha);

/// Applies the fitted projection; sensitive columns are dropped and the output
/// keeps the input's non-sensitive column order.
Eigen::MatrixXd transform(const CorrelationRemoverModel& model, const Eigen::MatrixXd& X,
                          const std::vector<std::string>& column_names);

/// Numeric view of a dataset for correlation removal: categorical sensitive
/// columns are one-hot encoded (first level dropped); every other column must
/// already be numeric.
struct EncodedFrame {
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;
  std::vector<std::string> sensitive_encoded;  // encoded sensitive column names
};

EncodedFrame encode_for_correlation_removal(const data::Dataset& dataset,
                                            const std::vector<std::string>& sensitive_cols);

}  // namespace fairkit::preprocessing
