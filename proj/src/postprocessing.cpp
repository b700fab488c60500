#include "fairkit/postprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "fairkit/error.hpp"
#include "fairkit/random.hpp"

namespace fairkit::postprocessing {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Strict improvement margin for tie-breaking toward smaller constrained rates.
constexpr double kTieEps = 1e-12;
}  // namespace

double PrimitiveRule::expected_positive(double score) const {
  switch (kind) {
    case Kind::threshold: return score > param ? 1.0 : 0.0;
    case Kind::constant: return param;
    case Kind::coin: return param;
  }
  return 0.0;
}

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::demographic_parity: return "demographic_parity";
    case Constraint::equalized_odds: return "equalized_odds";
    case Constraint::true_positive_rate_parity: return "true_positive_rate_parity";
    case Constraint::false_positive_rate_parity: return "false_positive_rate_parity";
  }
  return "unknown";
}

const char* to_string(Objective o) {
  return o == Objective::accuracy ? "accuracy" : "balanced_accuracy";
}

Constraint constraint_from_name(const std::string& name) {
  if (name == "demographic_parity") return Constraint::demographic_parity;
  if (name == "equalized_odds") return Constraint::equalized_odds;
  if (name == "true_positive_rate_parity") return Constraint::true_positive_rate_parity;
  if (name == "false_positive_rate_parity") return Constraint::false_positive_rate_parity;
  // FNR parity equalizes 1 - TPR, which is the same constraint as TPR parity.
  if (name == "false_negative_rate_parity") return Constraint::true_positive_rate_parity;
  fail(ErrorCode::config, "unknown constraint '" + name + "'");
}

Objective objective_from_name(const std::string& name) {
  if (name == "accuracy") return Objective::accuracy;
  if (name == "balanced_accuracy") return Objective::balanced_accuracy;
  fail(ErrorCode::config, "unknown objective '" + name + "'");
}

const GroupPolicy* ThresholdPolicy::find(const data::GroupKey& key) const {
  for (const GroupPolicy& g : groups) {
    if (g.group == key) return &g;
  }
  return nullptr;
}

nlohmann::json ThresholdPolicy::to_json() const {
  nlohmann::json j;
  j["constraint"] = constraint;
  j["objective"] = objective;
  nlohmann::json group_rows = nlohmann::json::array();
  for (const GroupPolicy& g : groups) {
    nlohmann::json row;
    row["group"] = g.group.parts;
    nlohmann::json mixture = nlohmann::json::array();
    for (const WeightedRule& wr : g.mixture) {
      nlohmann::json rule;
      rule["w"] = wr.weight;
      const char* kind = wr.rule.kind == PrimitiveRule::Kind::threshold ? "threshold"
                         : wr.rule.kind == PrimitiveRule::Kind::constant ? "constant"
                                                                         : "coin";
      rule["rule"] = {{"kind", kind}, {"param", wr.rule.param}};
      mixture.push_back(std::move(rule));
    }
    row["mixture"] = std::move(mixture);
    nlohmann::json op = nlohmann::json::object();
    if (g.operating_point.selection_rate) op["selection_rate"] = *g.operating_point.selection_rate;
    if (g.operating_point.fpr) op["fpr"] = *g.operating_point.fpr;
    if (g.operating_point.tpr) op["tpr"] = *g.operating_point.tpr;
    row["operating_point"] = std::move(op);
    group_rows.push_back(std::move(row));
  }
  j["groups"] = std::move(group_rows);
  return j;
}

ThresholdPolicy ThresholdPolicy::from_json(const nlohmann::json& j) {
  ThresholdPolicy policy;
  try {
    policy.constraint = j.at("constraint").get<std::string>();
    policy.objective = j.at("objective").get<std::string>();
    for (const nlohmann::json& row : j.at("groups")) {
      GroupPolicy g;
      g.group.parts = row.at("group").get<std::vector<std::string>>();
      double total = 0.0;
      for (const nlohmann::json& entry : row.at("mixture")) {
        WeightedRule wr;
        wr.weight = entry.at("w").get<double>();
        const std::string kind = entry.at("rule").at("kind").get<std::string>();
        if (kind == "threshold") {
          wr.rule.kind = PrimitiveRule::Kind::threshold;
        } else if (kind == "constant") {
          wr.rule.kind = PrimitiveRule::Kind::constant;
        } else if (kind == "coin") {
          wr.rule.kind = PrimitiveRule::Kind::coin;
        } else {
          fail(ErrorCode::parse, "unknown rule kind '" + kind + "' in policy file");
        }
        wr.rule.param = entry.at("rule").at("param").get<double>();
        if (wr.weight < 0.0) fail(ErrorCode::parse, "negative mixture weight in policy file");
        total += wr.weight;
        g.mixture.push_back(wr);
      }
      if (std::abs(total - 1.0) > 1e-9) {
        fail(ErrorCode::parse, "mixture weights for group '" + g.group.joined() +
                                   "' do not sum to 1");
      }
      const nlohmann::json& op = row.at("operating_point");
      if (op.contains("selection_rate")) g.operating_point.selection_rate = op["selection_rate"].get<double>();
      if (op.contains("fpr")) g.operating_point.fpr = op["fpr"].get<double>();
      if (op.contains("tpr")) g.operating_point.tpr = op["tpr"].get<double>();
      policy.groups.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("invalid threshold policy: ") + e.what());
  }
  return policy;
}

namespace {

// Cumulative confusion counts for every threshold in the sweep
// {+inf} -> distinct scores descending -> -inf.
struct SweepEntry {
  double threshold;  // predict 1 iff score > threshold
  double tp;
  double fp;
};

struct SweepCurve {
  std::vector<SweepEntry> entries;
  double pos = 0.0;
  double neg = 0.0;
  double n = 0.0;

  double selection(const SweepEntry& e) const { return (e.tp + e.fp) / n; }
  double fpr(const SweepEntry& e) const { return neg > 0.0 ? e.fp / neg : 0.0; }
  double tpr(const SweepEntry& e) const { return pos > 0.0 ? e.tp / pos : 0.0; }
};

SweepCurve threshold_sweep(std::span<const double> scores, std::span<const int> y_true) {
  if (scores.size() != y_true.size()) {
    fail(ErrorCode::shape, "scores and labels have different lengths");
  }
  if (scores.empty()) fail(ErrorCode::data, "empty group");
  for (const double s : scores) {
    if (!std::isfinite(s)) fail(ErrorCode::value, "scores must be finite");
  }

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  SweepCurve curve;
  for (const int y : y_true) {
    if (y == 1) {
      curve.pos += 1.0;
    } else {
      curve.neg += 1.0;
    }
  }
  curve.n = static_cast<double>(scores.size());

  curve.entries.push_back({kInf, 0.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double value = scores[order[i]];
    while (i < order.size() && scores[order[i]] == value) {
      if (y_true[order[i]] == 1) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
      ++i;
    }
    const double next_threshold = i < order.size() ? scores[order[i]] : -kInf;
    curve.entries.push_back({next_threshold, tp, fp});
  }
  return curve;
}

PrimitiveRule make_threshold_rule(double theta) {
  if (theta == kInf) return {PrimitiveRule::Kind::constant, 0.0};
  if (theta == -kInf) return {PrimitiveRule::Kind::constant, 1.0};
  return {PrimitiveRule::Kind::threshold, theta};
}

std::vector<WeightedRule> normalized(std::vector<WeightedRule> mixture) {
  std::vector<WeightedRule> kept;
  double total = 0.0;
  for (const WeightedRule& wr : mixture) {
    if (wr.weight > 0.0) {
      kept.push_back(wr);
      total += wr.weight;
    }
  }
  for (WeightedRule& wr : kept) wr.weight /= total;
  return kept;
}

}  // namespace

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> y_true) {
  const SweepCurve curve = threshold_sweep(scores, y_true);
  if (curve.pos == 0.0 || curve.neg == 0.0) {
    fail(ErrorCode::degenerate_group, "group has a single class; ROC points are undefined");
  }
  std::vector<RocPoint> points;
  points.reserve(curve.entries.size());
  for (const SweepEntry& e : curve.entries) {
    points.push_back({curve.fpr(e), curve.tpr(e), e.threshold});
  }
  return points;
}

RocHull upper_convex_hull(std::vector<RocPoint> points) {
  if (points.empty()) fail(ErrorCode::data, "no points to hull");
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    if (a.fpr != b.fpr) return a.fpr < b.fpr;
    return a.tpr < b.tpr;
  });
  // Only the highest TPR at each FPR can lie on the upper envelope.
  std::vector<RocPoint> reduced;
  for (const RocPoint& p : points) {
    if (!reduced.empty() && reduced.back().fpr == p.fpr) {
      reduced.back() = p;
    } else {
      reduced.push_back(p);
    }
  }

  RocHull hull;
  for (const RocPoint& p : reduced) {
    while (hull.vertices.size() >= 2) {
      const RocPoint& a = hull.vertices[hull.vertices.size() - 2];
      const RocPoint& b = hull.vertices.back();
      const double cross =
          (b.fpr - a.fpr) * (p.tpr - a.tpr) - (b.tpr - a.tpr) * (p.fpr - a.fpr);
      // Pop b when it is below or on the segment a->p (collinear removal).
      if (cross >= -1e-15) {
        hull.vertices.pop_back();
      } else {
        break;
      }
    }
    hull.vertices.push_back(p);
  }
  return hull;
}

double RocHull::value_at(double fpr) const {
  if (vertices.empty()) fail(ErrorCode::data, "empty hull");
  if (fpr <= vertices.front().fpr) return vertices.front().tpr;
  if (fpr >= vertices.back().fpr) return vertices.back().tpr;
  std::size_t hi = 1;
  while (vertices[hi].fpr < fpr) ++hi;
  const RocPoint& a = vertices[hi - 1];
  const RocPoint& b = vertices[hi];
  const double t = (fpr - a.fpr) / (b.fpr - a.fpr);
  return a.tpr + t * (b.tpr - a.tpr);
}

namespace {

struct GroupData {
  data::GroupKey key;
  std::vector<double> scores;
  std::vector<int> y;
  double weight = 0.0;  // group size / total rows
};

std::vector<GroupData> split_groups(std::span<const double> scores, std::span<const int> y_true,
                                    const std::vector<data::GroupKey>& groups) {
  if (scores.size() != y_true.size() || scores.size() != groups.size()) {
    fail(ErrorCode::shape, "scores, labels and sensitive features have different lengths");
  }
  if (scores.empty()) fail(ErrorCode::data, "empty input");
  std::map<data::GroupKey, GroupData> by_key;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    GroupData& g = by_key[groups[i]];
    g.key = groups[i];
    g.scores.push_back(scores[i]);
    g.y.push_back(y_true[i]);
  }
  std::vector<GroupData> out;
  for (auto& [key, g] : by_key) {
    g.weight = static_cast<double>(g.scores.size()) / static_cast<double>(scores.size());
    out.push_back(std::move(g));
  }
  return out;
}

double objective_value(Objective objective, double tpr, double fpr, double pos, double neg) {
  const double n = pos + neg;
  const double accuracy = (tpr * pos + (1.0 - fpr) * neg) / n;
  if (objective == Objective::accuracy) return accuracy;
  if (pos == 0.0 || neg == 0.0) return accuracy;  // single-class fallback
  return (tpr + (1.0 - fpr)) / 2.0;
}

// --- demographic parity -----------------------------------------------------

struct DpCurvePoint {
  double selection;
  double tp;
  double fp;
  double threshold;
};

struct DpCurve {
  std::vector<DpCurvePoint> points;  // strictly increasing selection rate
  double pos = 0.0;
  double neg = 0.0;

  double objective_at(Objective objective, const DpCurvePoint& p) const {
    const double tpr = pos > 0.0 ? p.tp / pos : 0.0;
    const double fpr = neg > 0.0 ? p.fp / neg : 0.0;
    return objective_value(objective, tpr, fpr, pos, neg);
  }
};

DpCurve dp_curve(const GroupData& g) {
  const SweepCurve sweep = threshold_sweep(g.scores, g.y);
  DpCurve curve;
  curve.pos = sweep.pos;
  curve.neg = sweep.neg;
  for (const SweepEntry& e : sweep.entries) {
    curve.points.push_back({sweep.selection(e), e.tp, e.fp, e.threshold});
  }
  return curve;
}

// Bracket of the target selection rate: index i such that the two adjacent
// rules points[i], points[i+1] mix to p (lambda on points[i+1]).
struct Bracket {
  std::size_t lo;
  double lambda;
};

Bracket bracket_rate(const std::vector<double>& rates, double target) {
  // rates strictly increasing with rates.front() == 0 and rates.back() == 1
  std::size_t hi = 1;
  while (hi < rates.size() && rates[hi] < target) ++hi;
  if (hi == rates.size()) return {rates.size() - 2, 1.0};
  if (rates[hi] == target) {
    if (hi + 1 < rates.size()) return {hi, 0.0};
    return {hi - 1, 1.0};
  }
  const std::size_t lo = hi - 1;
  return {lo, (target - rates[lo]) / (rates[hi] - rates[lo])};
}

ThresholdPolicy fit_demographic_parity(const std::vector<GroupData>& groups, Objective objective,
                                       int grid_size) {
  std::vector<DpCurve> curves;
  std::vector<std::vector<double>> rates;
  std::set<double> candidates;
  for (int i = 0; i <= grid_size; ++i) {
    candidates.insert(static_cast<double>(i) / static_cast<double>(grid_size));
  }
  for (const GroupData& g : groups) {
    curves.push_back(dp_curve(g));
    std::vector<double> r;
    for (const DpCurvePoint& p : curves.back().points) {
      r.push_back(p.selection);
      candidates.insert(p.selection);
    }
    rates.push_back(std::move(r));
  }

  double best_objective = -kInf;
  double best_rate = 0.0;
  for (const double p : candidates) {
    double total = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const Bracket b = bracket_rate(rates[gi], p);
      const double lo = curves[gi].objective_at(objective, curves[gi].points[b.lo]);
      const double hi = curves[gi].objective_at(objective, curves[gi].points[b.lo + 1]);
      total += groups[gi].weight * ((1.0 - b.lambda) * lo + b.lambda * hi);
    }
    if (total > best_objective + kTieEps) {
      best_objective = total;
      best_rate = p;
    }
  }

  ThresholdPolicy policy;
  policy.constraint = to_string(Constraint::demographic_parity);
  policy.objective = to_string(objective);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Bracket b = bracket_rate(rates[gi], best_rate);
    GroupPolicy gp;
    gp.group = groups[gi].key;
    gp.mixture = normalized({
        {1.0 - b.lambda, make_threshold_rule(curves[gi].points[b.lo].threshold)},
        {b.lambda, make_threshold_rule(curves[gi].points[b.lo + 1].threshold)},
    });
    gp.operating_point.selection_rate = best_rate;
    policy.groups.push_back(std::move(gp));
  }
  return policy;
}

// --- rate-based constraints (hull machinery) ---------------------------------

struct HullData {
  RocHull hull;
  double pos = 0.0;
  double neg = 0.0;
};

HullData build_hull(const GroupData& g) {
  HullData h;
  try {
    h.hull = upper_convex_hull(roc_points(g.scores, g.y));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_group) {
      fail(ErrorCode::fit, "group '" + g.key.joined() +
                               "' has a single class; the requested parity is infeasible");
    }
    throw;
  }
  for (const int y : g.y) {
    if (y == 1) {
      h.pos += 1.0;
    } else {
      h.neg += 1.0;
    }
  }
  return h;
}

// Convex combination of the two adjacent hull vertices realizing the boundary
// point at the given FPR.
std::vector<WeightedRule> mix_at_fpr(const RocHull& hull, double fpr, double* tpr_out) {
  const auto& v = hull.vertices;
  std::size_t hi = 0;
  while (hi < v.size() && v[hi].fpr < fpr) ++hi;
  if (hi == v.size()) hi = v.size() - 1;
  if (v[hi].fpr == fpr || hi == 0) {
    if (tpr_out) *tpr_out = v[hi].tpr;
    return {{1.0, make_threshold_rule(v[hi].threshold)}};
  }
  const RocPoint& a = v[hi - 1];
  const RocPoint& b = v[hi];
  const double lambda = (fpr - a.fpr) / (b.fpr - a.fpr);
  if (tpr_out) *tpr_out = a.tpr + lambda * (b.tpr - a.tpr);
  return {{1.0 - lambda, make_threshold_rule(a.threshold)},
          {lambda, make_threshold_rule(b.threshold)}};
}

// Mixture realizing the target TPR at the cheapest achievable FPR.
std::vector<WeightedRule> mix_at_tpr(const RocHull& hull, double tpr, double* fpr_out) {
  std::vector<RocPoint> v = hull.vertices;
  if (v.front().tpr > 0.0) v.insert(v.begin(), {0.0, 0.0, kInf});
  std::size_t hi = 0;
  while (hi < v.size() && v[hi].tpr < tpr) ++hi;
  if (hi == v.size()) hi = v.size() - 1;
  if (v[hi].tpr == tpr || hi == 0) {
    if (fpr_out) *fpr_out = v[hi].fpr;
    return {{1.0, make_threshold_rule(v[hi].threshold)}};
  }
  const RocPoint& a = v[hi - 1];
  const RocPoint& b = v[hi];
  const double lambda = (tpr - a.tpr) / (b.tpr - a.tpr);
  if (fpr_out) *fpr_out = a.fpr + lambda * (b.fpr - a.fpr);
  return {{1.0 - lambda, make_threshold_rule(a.threshold)},
          {lambda, make_threshold_rule(b.threshold)}};
}

// Candidate FPR values: uniform grid, every hull vertex, and every pairwise
// hull-segment crossing (the breakpoints of min over groups of the hulls).
std::set<double> fpr_candidates(const std::vector<HullData>& hulls, int grid_size) {
  std::set<double> candidates;
  for (int i = 0; i <= grid_size; ++i) {
    candidates.insert(static_cast<double>(i) / static_cast<double>(grid_size));
  }
  for (const HullData& h : hulls) {
    for (const RocPoint& v : h.hull.vertices) candidates.insert(v.fpr);
  }
  for (std::size_t a = 0; a < hulls.size(); ++a) {
    for (std::size_t b = a + 1; b < hulls.size(); ++b) {
      const auto& va = hulls[a].hull.vertices;
      const auto& vb = hulls[b].hull.vertices;
      for (std::size_t i = 0; i + 1 < va.size(); ++i) {
        for (std::size_t j = 0; j + 1 < vb.size(); ++j) {
          const double dxa = va[i + 1].fpr - va[i].fpr;
          const double dxb = vb[j + 1].fpr - vb[j].fpr;
          if (dxa <= 0.0 || dxb <= 0.0) continue;
          const double ma = (va[i + 1].tpr - va[i].tpr) / dxa;
          const double mb = (vb[j + 1].tpr - vb[j].tpr) / dxb;
          if (ma == mb) continue;
          const double ca = va[i].tpr - ma * va[i].fpr;
          const double cb = vb[j].tpr - mb * vb[j].fpr;
          const double x = (cb - ca) / (ma - mb);
          if (x > std::max(va[i].fpr, vb[j].fpr) && x < std::min(va[i + 1].fpr, vb[j + 1].fpr)) {
            candidates.insert(x);
          }
        }
      }
    }
  }
  return candidates;
}

ThresholdPolicy fit_equalized_odds(const std::vector<GroupData>& groups, Objective objective,
                                   int grid_size) {
  std::vector<HullData> hulls;
  for (const GroupData& g : groups) hulls.push_back(build_hull(g));

  const std::set<double> candidates = fpr_candidates(hulls, grid_size);
  double best_objective = -kInf;
  double best_x = 0.0;
  double best_t = 0.0;
  for (const double x : candidates) {
    if (x < 0.0 || x > 1.0) continue;
    double t = kInf;
    for (const HullData& h : hulls) t = std::min(t, h.hull.value_at(x));
    double total = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      total += groups[gi].weight * objective_value(objective, t, x, hulls[gi].pos, hulls[gi].neg);
    }
    if (total > best_objective + kTieEps) {
      best_objective = total;
      best_x = x;
      best_t = t;
    }
  }

  ThresholdPolicy policy;
  policy.constraint = to_string(Constraint::equalized_odds);
  policy.objective = to_string(objective);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    double boundary_tpr = 0.0;
    std::vector<WeightedRule> boundary = mix_at_fpr(hulls[gi].hull, best_x, &boundary_tpr);
    // Blend the boundary point with the diagonal rule coin(x) until the
    // expected TPR drops to the common target.
    double beta = 0.0;
    if (boundary_tpr > best_t && boundary_tpr > best_x) {
      beta = (boundary_tpr - best_t) / (boundary_tpr - best_x);
    }
    std::vector<WeightedRule> mixture;
    for (const WeightedRule& wr : boundary) mixture.push_back({(1.0 - beta) * wr.weight, wr.rule});
    mixture.push_back({beta, {PrimitiveRule::Kind::coin, best_x}});
    GroupPolicy gp;
    gp.group = groups[gi].key;
    gp.mixture = normalized(std::move(mixture));
    gp.operating_point.fpr = best_x;
    gp.operating_point.tpr = best_t;
    policy.groups.push_back(std::move(gp));
  }
  return policy;
}

ThresholdPolicy fit_rate_parity(const std::vector<GroupData>& groups, Constraint constraint,
                                Objective objective, int grid_size) {
  const bool tpr_parity = constraint == Constraint::true_positive_rate_parity;
  std::vector<HullData> hulls;
  for (const GroupData& g : groups) hulls.push_back(build_hull(g));

  std::set<double> candidates;
  for (int i = 0; i <= grid_size; ++i) {
    candidates.insert(static_cast<double>(i) / static_cast<double>(grid_size));
  }
  for (const HullData& h : hulls) {
    for (const RocPoint& v : h.hull.vertices) {
      candidates.insert(tpr_parity ? v.tpr : v.fpr);
    }
  }

  double best_objective = -kInf;
  double best_rate = 0.0;
  for (const double r : candidates) {
    if (r < 0.0 || r > 1.0) continue;
    double total = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      double other = 0.0;
      if (tpr_parity) {
        mix_at_tpr(hulls[gi].hull, r, &other);
        total += groups[gi].weight *
                 objective_value(objective, r, other, hulls[gi].pos, hulls[gi].neg);
      } else {
        other = hulls[gi].hull.value_at(r);
        total += groups[gi].weight *
                 objective_value(objective, other, r, hulls[gi].pos, hulls[gi].neg);
      }
    }
    if (total > best_objective + kTieEps) {
      best_objective = total;
      best_rate = r;
    }
  }

  ThresholdPolicy policy;
  policy.constraint = to_string(constraint);
  policy.objective = to_string(objective);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    GroupPolicy gp;
    gp.group = groups[gi].key;
    double other = 0.0;
    if (tpr_parity) {
      gp.mixture = normalized(mix_at_tpr(hulls[gi].hull, best_rate, &other));
      gp.operating_point.fpr = other;
      gp.operating_point.tpr = best_rate;
    } else {
      gp.mixture = normalized(mix_at_fpr(hulls[gi].hull, best_rate, &other));
      gp.operating_point.fpr = best_rate;
      gp.operating_point.tpr = other;
    }
    policy.groups.push_back(std::move(gp));
  }
  return policy;
}

}  // namespace

ThresholdPolicy fit_threshold_optimizer(std::span<const double> scores,
                                        std::span<const int> y_true,
                                        const std::vector<data::GroupKey>& groups,
                                        Constraint constraint, Objective objective,
                                        int grid_size) {
  if (grid_size < 1) fail(ErrorCode::config, "grid_size must be at least 1");
  const std::vector<GroupData> split = split_groups(scores, y_true, groups);
  switch (constraint) {
    case Constraint::demographic_parity:
      return fit_demographic_parity(split, objective, grid_size);
    case Constraint::equalized_odds:
      return fit_equalized_odds(split, objective, grid_size);
    case Constraint::true_positive_rate_parity:
    case Constraint::false_positive_rate_parity:
      return fit_rate_parity(split, constraint, objective, grid_size);
  }
  fail(ErrorCode::config, "unknown constraint");
}

std::vector<int> predict_with_policy(const ThresholdPolicy& policy,
                                     std::span<const double> scores,
                                     const std::vector<data::GroupKey>& groups,
                                     std::uint64_t seed) {
  if (scores.size() != groups.size()) {
    fail(ErrorCode::shape, "scores and sensitive features have different lengths");
  }
  RandomStream rng(seed);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const GroupPolicy* gp = policy.find(groups[i]);
    if (!gp) {
      fail(ErrorCode::prediction, "group '" + groups[i].joined() + "' was not seen during fitting");
    }
    const double u = rng.next_uniform();
    double cum = 0.0;
    const PrimitiveRule* rule = &gp->mixture.back().rule;
    for (const WeightedRule& wr : gp->mixture) {
      cum += wr.weight;
      if (u < cum) {
        rule = &wr.rule;
        break;
      }
    }
    switch (rule->kind) {
      case PrimitiveRule::Kind::threshold:
        out[i] = scores[i] > rule->param ? 1 : 0;
        break;
      case PrimitiveRule::Kind::constant:
        out[i] = rule->param > 0.5 ? 1 : 0;
        break;
      case PrimitiveRule::Kind::coin:
        out[i] = rng.next_bernoulli(rule->param) ? 1 : 0;
        break;
    }
  }
  return out;
}

std::vector<double> expected_with_policy(const ThresholdPolicy& policy,
                                         std::span<const double> scores,
                                         const std::vector<data::GroupKey>& groups) {
  if (scores.size() != groups.size()) {
    fail(ErrorCode::shape, "scores and sensitive features have different lengths");
  }
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const GroupPolicy* gp = policy.find(groups[i]);
    if (!gp) {
      fail(ErrorCode::prediction, "group '" + groups[i].joined() + "' was not seen during fitting");
    }
    double p = 0.0;
    for (const WeightedRule& wr : gp->mixture) {
      p += wr.weight * wr.rule.expected_positive(scores[i]);
    }
    out[i] = p;
  }
  return out;
}

OperatingPoint analytic_rates(const std::vector<WeightedRule>& mixture,
                              std::span<const double> scores, std::span<const int> y_true) {
  if (scores.size() != y_true.size()) {
    fail(ErrorCode::shape, "scores and labels have different lengths");
  }
  if (scores.empty()) fail(ErrorCode::data, "empty group");
  if (mixture.empty()) fail(ErrorCode::data, "empty mixture");
  double sel = 0.0, tp = 0.0, fp = 0.0, pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double p = 0.0;
    for (const WeightedRule& wr : mixture) p += wr.weight * wr.rule.expected_positive(scores[i]);
    sel += p;
    if (y_true[i] == 1) {
      pos += 1.0;
      tp += p;
    } else {
      neg += 1.0;
      fp += p;
    }
  }
  OperatingPoint op;
  op.selection_rate = sel / static_cast<double>(scores.size());
  if (pos > 0.0) op.tpr = tp / pos;
  if (neg > 0.0) op.fpr = fp / neg;
  return op;
}

}  // namespace fairkit::postprocessing
