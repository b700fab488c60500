#include "fairkit/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairkit/data.hpp"
#include "fairkit/error.hpp"
#include "fairkit/metrics.hpp"
#include "fairkit/numfmt.hpp"
#include "fairkit/postprocessing.hpp"
#include "fairkit/preprocessing.hpp"
#include "fairkit/reductions.hpp"
#include "fairkit/report.hpp"

namespace fairkit::cli {

namespace {

#ifndef FAIRKIT_VERSION
#define FAIRKIT_VERSION "0.0.0"
#endif

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::data, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::data, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorCode::data, "failed while writing '" + path + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  if (out.empty()) fail(ErrorCode::config, "expected a non-empty column list");
  return out;
}

struct LoadedData {
  data::Dataset dataset;
  std::string digest;
};

LoadedData load_csv(const std::string& path, const std::map<std::string, data::Role>& roles) {
  const std::string bytes = read_file(path);
  data::Dataset dataset = data::load_table(bytes, roles);
  const data::ValidationReport report = data::validate_dataset(dataset);
  if (!report.ok()) {
    std::string message = "invalid dataset '" + path + "':";
    for (const data::ValidationIssue& issue : report.errors) message += " " + issue.message + ";";
    fail(ErrorCode::value, message);
  }
  return {std::move(dataset), report::input_digest(bytes)};
}

std::vector<int> int_labels(const data::Column& col) {
  std::vector<int> out(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) out[i] = col.numeric()[i] == 1.0 ? 1 : 0;
  return out;
}

void emit(const std::string& content, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << content;
  } else {
    write_file(output_path, content);
  }
}

Eigen::MatrixXd feature_matrix(const data::Dataset& dataset,
                               const std::vector<std::string>& names) {
  Eigen::MatrixXd X(dataset.n_rows(), names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    const data::Column& col = dataset.column(names[c]);
    if (!col.is_numeric()) {
      fail(ErrorCode::value, "feature column '" + names[c] + "' is not numeric");
    }
    for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col.numeric()[r];
    }
  }
  if (!X.allFinite()) fail(ErrorCode::value, "feature columns contain non-finite values");
  return X;
}

// ---- subcommand handlers ----------------------------------------------------

struct AssessArgs {
  std::string data_path, y_true, y_pred, sensitive, sample_weight, metrics_list;
  std::string format = "json";
  std::string output;
};

int run_assess(const AssessArgs& args) {
  std::map<std::string, data::Role> roles = {{args.y_true, data::Role::y_true},
                                             {args.y_pred, data::Role::y_pred}};
  for (const std::string& col : split_list(args.sensitive)) roles[col] = data::Role::sensitive;
  if (!args.sample_weight.empty()) roles[args.sample_weight] = data::Role::score;
  const LoadedData loaded = load_csv(args.data_path, roles);

  std::vector<metrics::BaseMetric> ids;
  for (const std::string& name : split_list(args.metrics_list)) {
    const auto id = metrics::base_metric_from_name(name);
    if (!id) fail(ErrorCode::config, "unknown metric '" + name + "'");
    ids.push_back(*id);
  }

  const std::vector<int> y_true = int_labels(loaded.dataset.column(args.y_true));
  const std::vector<double>& y_pred = loaded.dataset.column(args.y_pred).numeric();
  std::vector<double> weights;
  if (!args.sample_weight.empty()) weights = loaded.dataset.column(args.sample_weight).numeric();

  report::Report rep;
  rep.kind = report::Report::Kind::assessment;
  rep.assessment =
      metrics::disaggregate(ids, y_true, y_pred, loaded.dataset.group_keys(), weights);
  rep.metadata = {FAIRKIT_VERSION, loaded.digest, ""};

  const report::Format format = report::format_from_name(args.format);
  if (format == report::Format::svg) {
    fail(ErrorCode::format, "svg output is only available for comparison reports");
  }
  emit(report::render_report(rep, format), args.output);
  return 0;
}

struct CompareArgs {
  std::string data_path, y_true, sensitive, preds, perf, fairness;
  std::string format = "json";
  std::string output;
};

int run_compare(const CompareArgs& args) {
  std::map<std::string, data::Role> roles = {{args.y_true, data::Role::y_true}};
  for (const std::string& col : split_list(args.sensitive)) roles[col] = data::Role::sensitive;
  const std::vector<std::string> pred_cols = split_list(args.preds);
  for (const std::string& col : pred_cols) roles[col] = data::Role::score;
  const LoadedData loaded = load_csv(args.data_path, roles);

  const auto perf = metrics::base_metric_from_name(args.perf);
  if (!perf) fail(ErrorCode::config, "unknown metric '" + args.perf + "'");
  const report::FairnessMetricSpec fairness = report::FairnessMetricSpec::parse(args.fairness);

  const std::vector<int> y_true = int_labels(loaded.dataset.column(args.y_true));
  std::vector<std::pair<std::string, std::vector<double>>> models;
  for (const std::string& col : pred_cols) {
    models.emplace_back(col, loaded.dataset.column(col).numeric());
  }

  report::Report rep;
  rep.kind = report::Report::Kind::comparison;
  rep.comparison =
      report::compare_models(models, y_true, loaded.dataset.group_keys(), *perf, fairness);
  rep.metadata = {FAIRKIT_VERSION, loaded.digest, ""};
  emit(report::render_report(rep, report::format_from_name(args.format)), args.output);
  return 0;
}

struct ThresholdArgs {
  std::string data_path, y_true, score, sensitive, constraint, objective, out;
  int grid_size = 1000;
};

int run_mitigate_threshold(const ThresholdArgs& args) {
  std::map<std::string, data::Role> roles = {{args.y_true, data::Role::y_true},
                                             {args.score, data::Role::score}};
  for (const std::string& col : split_list(args.sensitive)) roles[col] = data::Role::sensitive;
  const LoadedData loaded = load_csv(args.data_path, roles);

  const postprocessing::ThresholdPolicy policy = postprocessing::fit_threshold_optimizer(
      loaded.dataset.column(args.score).numeric(),
      int_labels(loaded.dataset.column(args.y_true)), loaded.dataset.group_keys(),
      postprocessing::constraint_from_name(args.constraint),
      postprocessing::objective_from_name(args.objective), args.grid_size);

  write_file(args.out, policy.to_json().dump(2) + "\n");
  std::cerr << "wrote threshold policy to " << args.out << "\n";
  return 0;
}

struct ReduceArgs {
  std::string data_path, y_true, features, sensitive, constraint, out;
  std::string learner = "logreg";
  double eps = 0.05;
  int max_iter = 50;
  double eta0 = 2.0;
  double bound = 100.0;
  double nu = 1e-6;
  bool strict = false;
};

int run_mitigate_reduce(const ReduceArgs& args) {
  std::map<std::string, data::Role> roles = {{args.y_true, data::Role::y_true}};
  for (const std::string& col : split_list(args.sensitive)) roles[col] = data::Role::sensitive;
  const LoadedData loaded = load_csv(args.data_path, roles);

  reductions::LearnerKind kind;
  if (args.learner == "logreg") {
    kind = reductions::LearnerKind::logistic_regression;
  } else if (args.learner == "stump") {
    kind = reductions::LearnerKind::decision_stump;
  } else {
    fail(ErrorCode::config, "unknown learner '" + args.learner + "' (expected logreg or stump)");
  }

  reductions::EgOptions options;
  options.eps = args.eps;
  options.max_iter = args.max_iter;
  options.eta0 = args.eta0;
  options.bound = args.bound;
  options.nu = args.nu;

  const Eigen::MatrixXd X = feature_matrix(loaded.dataset, split_list(args.features));
  const reductions::RandomizedClassifier model = reductions::exponentiated_gradient(
      X, int_labels(loaded.dataset.column(args.y_true)), loaded.dataset.group_keys(),
      reductions::make_learner(kind), reductions::constraint_family_from_name(args.constraint),
      options);

  write_file(args.out, model.to_json().dump(2) + "\n");
  std::cerr << "wrote randomized classifier to " << args.out << "\n";
  if (!model.diagnostics.converged) {
    std::cerr << "warning: solver gap " << format_double(model.diagnostics.final_gap)
              << " did not reach tolerance " << format_double(options.nu) << " within "
              << options.max_iter << " iterations\n";
    if (args.strict) return 4;
  }
  return 0;
}

struct PreprocessArgs {
  std::string data_path, sensitive, out, model_out;
  double alpha = 1.0;
};

int run_preprocess_correlation(const PreprocessArgs& args) {
  const std::vector<std::string> sensitive_cols = split_list(args.sensitive);
  std::map<std::string, data::Role> roles;
  for (const std::string& col : sensitive_cols) roles[col] = data::Role::sensitive;
  const LoadedData loaded = load_csv(args.data_path, roles);

  const preprocessing::EncodedFrame frame =
      preprocessing::encode_for_correlation_removal(loaded.dataset, sensitive_cols);
  const preprocessing::CorrelationRemoverModel model = preprocessing::fit_correlation_remover(
      frame.X, frame.column_names, frame.sensitive_encoded, args.alpha);
  const Eigen::MatrixXd transformed =
      preprocessing::transform(model, frame.X, frame.column_names);

  std::vector<data::Column> out_columns;
  for (std::size_t c = 0; c < model.passthrough_cols.size(); ++c) {
    data::NumericColumn values(loaded.dataset.n_rows());
    for (std::size_t r = 0; r < values.size(); ++r) {
      values[r] = transformed(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    out_columns.push_back({model.passthrough_cols[c], std::move(values), data::Role::feature});
  }
  write_file(args.out, data::write_csv(data::Dataset(std::move(out_columns))));

  const std::string model_path = args.model_out.empty() ? args.out + ".model.json" : args.model_out;
  write_file(model_path, model.to_json().dump(2) + "\n");
  std::cerr << "wrote transformed data to " << args.out << " and model to " << model_path << "\n";
  return 0;
}

struct ApplyArgs {
  std::string policy_path, model_path, data_path, out;
  std::string score, sensitive, features;
  std::string mode = "sample";
  std::uint64_t seed = 0;
};

int run_apply(const ApplyArgs& args) {
  if (args.policy_path.empty() == args.model_path.empty()) {
    fail(ErrorCode::config, "exactly one of --policy or --model is required");
  }
  if (args.mode != "sample" && args.mode != "expectation") {
    fail(ErrorCode::config, "mode must be 'sample' or 'expectation'");
  }

  std::map<std::string, data::Role> roles;
  if (!args.policy_path.empty()) {
    if (args.score.empty() || args.sensitive.empty()) {
      fail(ErrorCode::config, "--policy requires --score and --sensitive columns");
    }
    roles[args.score] = data::Role::score;
    for (const std::string& col : split_list(args.sensitive)) roles[col] = data::Role::sensitive;
  } else if (args.features.empty()) {
    fail(ErrorCode::config, "--model requires --features columns");
  }
  const LoadedData loaded = load_csv(args.data_path, roles);

  std::vector<double> prediction;
  if (!args.policy_path.empty()) {
    nlohmann::json policy_json;
    try {
      policy_json = nlohmann::json::parse(read_file(args.policy_path));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse, std::string("invalid policy file: ") + e.what());
    }
    const postprocessing::ThresholdPolicy policy =
        postprocessing::ThresholdPolicy::from_json(policy_json);
    const std::vector<double>& scores = loaded.dataset.column(args.score).numeric();
    const std::vector<data::GroupKey> groups = loaded.dataset.group_keys();
    if (args.mode == "sample") {
      const std::vector<int> sampled =
          postprocessing::predict_with_policy(policy, scores, groups, args.seed);
      prediction.assign(sampled.begin(), sampled.end());
    } else {
      prediction = postprocessing::expected_with_policy(policy, scores, groups);
    }
  } else {
    nlohmann::json model_json;
    try {
      model_json = nlohmann::json::parse(read_file(args.model_path));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse, std::string("invalid model file: ") + e.what());
    }
    const reductions::RandomizedClassifier model =
        reductions::randomized_classifier_from_json(model_json);
    const Eigen::MatrixXd X = feature_matrix(loaded.dataset, split_list(args.features));
    prediction = reductions::predict_randomized(
        model, X,
        args.mode == "sample" ? reductions::PredictMode::sample
                              : reductions::PredictMode::expectation,
        args.seed);
  }

  std::vector<data::Column> out_columns = loaded.dataset.columns();
  if (loaded.dataset.has_column("prediction")) {
    fail(ErrorCode::schema, "input already has a 'prediction' column");
  }
  out_columns.push_back({"prediction", std::move(prediction),
                         args.mode == "sample" ? data::Role::y_pred : data::Role::score});
  write_file(args.out, data::write_csv(data::Dataset(std::move(out_columns))));
  std::cerr << "wrote predictions to " << args.out << "\n";
  return 0;
}

struct SynthArgs {
  std::string config_path, out;
};

int run_synth(const SynthArgs& args) {
  nlohmann::json config_json;
  try {
    config_json = nlohmann::json::parse(read_file(args.config_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("invalid config file: ") + e.what());
  }
  const data::SyntheticConfig config = data::parse_synthetic_config(config_json);
  write_file(args.out, data::write_csv(data::generate_synthetic(config)));
  std::cerr << "wrote synthetic dataset to " << args.out << "\n";
  return 0;
}

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::config:
    case ErrorCode::format:
      return 3;
    case ErrorCode::convergence:
      return 4;
    default:
      return 2;
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"fairness assessment and mitigation toolkit"};
  app.require_subcommand(1);
  bool strict = false;
  app.add_flag("--strict", strict, "escalate convergence warnings to exit code 4");

  AssessArgs assess;
  CLI::App* assess_cmd = app.add_subcommand("assess", "disaggregated metric report");
  assess_cmd->add_option("--data", assess.data_path)->required();
  assess_cmd->add_option("--y-true", assess.y_true)->required();
  assess_cmd->add_option("--y-pred", assess.y_pred)->required();
  assess_cmd->add_option("--sensitive", assess.sensitive)->required();
  assess_cmd->add_option("--sample-weight", assess.sample_weight);
  assess_cmd->add_option("--metrics", assess.metrics_list)->required();
  assess_cmd->add_option("--format", assess.format);
  assess_cmd->add_option("--output", assess.output);

  CompareArgs compare;
  CLI::App* compare_cmd = app.add_subcommand("compare", "model comparison report");
  compare_cmd->add_option("--data", compare.data_path)->required();
  compare_cmd->add_option("--y-true", compare.y_true)->required();
  compare_cmd->add_option("--sensitive", compare.sensitive)->required();
  compare_cmd->add_option("--pred", compare.preds)->required();
  compare_cmd->add_option("--perf", compare.perf)->required();
  compare_cmd->add_option("--fairness", compare.fairness)->required();
  compare_cmd->add_option("--format", compare.format);
  compare_cmd->add_option("--output", compare.output);

  CLI::App* mitigate_cmd = app.add_subcommand("mitigate", "fit a mitigation artifact");
  mitigate_cmd->require_subcommand(1);

  ThresholdArgs threshold;
  CLI::App* threshold_cmd =
      mitigate_cmd->add_subcommand("threshold", "group-wise randomized thresholding");
  threshold_cmd->add_option("--data", threshold.data_path)->required();
  threshold_cmd->add_option("--y-true", threshold.y_true)->required();
  threshold_cmd->add_option("--score", threshold.score)->required();
  threshold_cmd->add_option("--sensitive", threshold.sensitive)->required();
  threshold_cmd->add_option("--constraint", threshold.constraint)->required();
  threshold_cmd->add_option("--objective", threshold.objective)->required();
  threshold_cmd->add_option("--grid-size", threshold.grid_size);
  threshold_cmd->add_option("--out", threshold.out)->required();

  ReduceArgs reduce;
  CLI::App* reduce_cmd = mitigate_cmd->add_subcommand("reduce", "exponentiated-gradient training");
  reduce_cmd->add_option("--data", reduce.data_path)->required();
  reduce_cmd->add_option("--y-true", reduce.y_true)->required();
  reduce_cmd->add_option("--features", reduce.features)->required();
  reduce_cmd->add_option("--sensitive", reduce.sensitive)->required();
  reduce_cmd->add_option("--constraint", reduce.constraint)->required();
  reduce_cmd->add_option("--eps", reduce.eps)->required();
  reduce_cmd->add_option("--learner", reduce.learner);
  reduce_cmd->add_option("--max-iter", reduce.max_iter);
  reduce_cmd->add_option("--eta0", reduce.eta0);
  reduce_cmd->add_option("--bound", reduce.bound);
  reduce_cmd->add_option("--nu", reduce.nu);
  reduce_cmd->add_option("--out", reduce.out)->required();

  CLI::App* preprocess_cmd = app.add_subcommand("preprocess", "transform input data");
  preprocess_cmd->require_subcommand(1);

  PreprocessArgs preprocess;
  CLI::App* correlation_cmd =
      preprocess_cmd->add_subcommand("correlation", "remove correlation with sensitive columns");
  correlation_cmd->add_option("--data", preprocess.data_path)->required();
  correlation_cmd->add_option("--sensitive", preprocess.sensitive)->required();
  correlation_cmd->add_option("--alpha", preprocess.alpha);
  correlation_cmd->add_option("--out", preprocess.out)->required();
  correlation_cmd->add_option("--model-out", preprocess.model_out);

  ApplyArgs apply;
  CLI::App* apply_cmd = app.add_subcommand("apply", "apply a fitted policy or model");
  apply_cmd->add_option("--policy", apply.policy_path);
  apply_cmd->add_option("--model", apply.model_path);
  apply_cmd->add_option("--data", apply.data_path)->required();
  apply_cmd->add_option("--score", apply.score);
  apply_cmd->add_option("--sensitive", apply.sensitive);
  apply_cmd->add_option("--features", apply.features);
  apply_cmd->add_option("--seed", apply.seed);
  apply_cmd->add_option("--mode", apply.mode);
  apply_cmd->add_option("--out", apply.out)->required();

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--config", synth.config_path)->required();
  synth_cmd->add_option("--out", synth.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n" << app.help();
    return 3;
  }

  try {
    if (*assess_cmd) return run_assess(assess);
    if (*compare_cmd) return run_compare(compare);
    if (*threshold_cmd) return run_mitigate_threshold(threshold);
    if (*reduce_cmd) {
      reduce.strict = strict;
      return run_mitigate_reduce(reduce);
    }
    if (*correlation_cmd) return run_preprocess_correlation(preprocess);
    if (*apply_cmd) return run_apply(apply);
    if (*synth_cmd) return run_synth(synth);
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 2;
  }
  return 3;
}

}  // namespace fairkit::cli
