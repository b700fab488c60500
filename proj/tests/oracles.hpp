#pragma once

// Test-side oracles: independent brute-force implementations used to pin
// expected values. These deliberately avoid the library's computation paths.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairkit/data.hpp"
#include "fairkit/reductions.hpp"

namespace oracle {

// Direct per-metric formulas over explicit counts; binary predictions only.
std::optional<double> metric_value(const std::string& name, const std::vector<int>& y_true,
                                   const std::vector<double>& y_pred,
                                   const std::vector<double>& weights);

struct GroupbyResult {
  std::optional<double> overall;
  std::map<fairkit::data::GroupKey, std::optional<double>> by_group;
  std::map<fairkit::data::GroupKey, std::size_t> sizes;
};

GroupbyResult groupby_metric(const std::string& name, const std::vector<int>& y_true,
                             const std::vector<double>& y_pred,
                             const std::vector<fairkit::data::GroupKey>& groups,
                             const std::vector<double>& weights);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Dense tableau simplex with Bland's rule for
//   max c^T x  s.t.  A x <= b, x >= 0,   with b >= 0 (origin feasible).
double simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                        const std::vector<double>& c);

// Learner that can represent any labeling of its (distinct-row) training set:
// training returns the labeling minimizing weighted error, i.e. the relabeled
// targets on the support.
fairkit::reductions::Learner enumeration_learner();

// Signed moment values of a labeling, recomputed from the term definitions.
std::vector<double> moments_of(const fairkit::reductions::ConstraintSpec& spec,
                               const std::vector<int>& y_true, const std::vector<double>& preds,
                               const std::vector<fairkit::data::GroupKey>& groups);

// Exact saddle value max over the l1 ball of min over all 2^n labelings of
// the Lagrangian, via the LP dual of the finite game.
double saddle_value(const fairkit::reductions::ConstraintSpec& spec,
                    const std::vector<int>& y_true,
                    const std::vector<fairkit::data::GroupKey>& groups, double bound);

// ---- process-level helpers for CLI tests -----------------------------------

struct CliResult {
  int exit_code = -1;
  std::string output;  // captured standard output
};

CliResult run_cli(const std::vector<std::string>& args);

std::string read_file_or_empty(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string temp_dir();

}  // namespace oracle
