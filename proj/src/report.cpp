#include "fairkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "fairkit/error.hpp"
#include "fairkit/numfmt.hpp"

namespace fairkit::report {

nlohmann::json ComparisonTable::to_json() const {
  nlohmann::json j;
  j["axes"] = {{"performance_metric", performance_metric}, {"fairness_metric", fairness_metric}};
  nlohmann::json out_rows = nlohmann::json::array();
  for (const ComparisonRow& row : rows) {
    out_rows.push_back({{"model", row.model_name},
                        {"performance", row.performance},
                        {"fairness", row.fairness},
                        {"pareto", row.pareto}});
  }
  j["rows"] = std::move(out_rows);
  return j;
}

FairnessMetricSpec FairnessMetricSpec::parse(const std::string& name) {
  FairnessMetricSpec spec;
  if (name == "demographic_parity_difference") {
    spec.kind = Kind::demographic_parity_difference;
    return spec;
  }
  if (name == "equalized_odds_difference") {
    spec.kind = Kind::equalized_odds_difference;
    return spec;
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t dot = name.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(name.substr(start));
      break;
    }
    parts.push_back(name.substr(start, dot - start));
    start = dot + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    fail(ErrorCode::config, "unknown fairness metric '" + name + "'");
  }
  const auto base = metrics::base_metric_from_name(parts[0]);
  if (!base) fail(ErrorCode::config, "unknown base metric '" + parts[0] + "'");
  spec.kind = Kind::derived;
  spec.base = *base;
  if (parts[1] == "difference") {
    spec.agg = metrics::Aggregation::difference;
  } else if (parts[1] == "ratio") {
    spec.agg = metrics::Aggregation::ratio;
  } else {
    fail(ErrorCode::config, "unknown aggregation '" + parts[1] + "' in '" + name + "'");
  }
  spec.method = metrics::AggregationMethod::between_groups;
  if (parts.size() == 3) {
    if (parts[2] == "between_groups") {
      spec.method = metrics::AggregationMethod::between_groups;
    } else if (parts[2] == "to_overall") {
      spec.method = metrics::AggregationMethod::to_overall;
    } else {
      fail(ErrorCode::config, "unknown method '" + parts[2] + "' in '" + name + "'");
    }
  }
  return spec;
}

std::string FairnessMetricSpec::name() const {
  switch (kind) {
    case Kind::demographic_parity_difference: return "demographic_parity_difference";
    case Kind::equalized_odds_difference: return "equalized_odds_difference";
    case Kind::derived: break;
  }
  std::string out(metrics::to_string(base));
  out += agg == metrics::Aggregation::difference ? ".difference" : ".ratio";
  out += method == metrics::AggregationMethod::between_groups ? ".between_groups" : ".to_overall";
  return out;
}

double FairnessMetricSpec::evaluate(std::span<const int> y_true, std::span<const double> y_pred,
                                    const std::vector<data::GroupKey>& groups) const {
  switch (kind) {
    case Kind::demographic_parity_difference:
      return metrics::demographic_parity_difference(y_pred, groups);
    case Kind::equalized_odds_difference:
      return metrics::equalized_odds_difference(y_true, y_pred, groups);
    case Kind::derived:
      return metrics::make_derived_metric(base, agg, method)(y_true, y_pred, groups);
  }
  fail(ErrorCode::config, "invalid fairness metric");
}

ComparisonTable compare_models(
    const std::vector<std::pair<std::string, std::vector<double>>>& models,
    std::span<const int> y_true, const std::vector<data::GroupKey>& groups,
    metrics::BaseMetric performance_metric, const FairnessMetricSpec& fairness_metric) {
  if (models.empty()) fail(ErrorCode::config, "at least one model is required");
  std::set<std::string> names;
  for (const auto& [name, preds] : models) {
    if (!names.insert(name).second) fail(ErrorCode::config, "duplicate model name '" + name + "'");
    if (preds.size() != y_true.size()) {
      fail(ErrorCode::shape, "model '" + name + "' has " + std::to_string(preds.size()) +
                                 " predictions, expected " + std::to_string(y_true.size()));
    }
  }

  ComparisonTable table;
  table.performance_metric = std::string(metrics::to_string(performance_metric));
  table.fairness_metric = fairness_metric.name();
  for (const auto& [name, preds] : models) {
    const metrics::MetricValue perf =
        metrics::evaluate_base_metric(performance_metric, y_true, preds);
    if (!perf) {
      fail(ErrorCode::aggregation,
           "performance metric is undefined for model '" + name + "'");
    }
    ComparisonRow row;
    row.model_name = name;
    row.performance = *perf;
    row.fairness = fairness_metric.evaluate(y_true, preds, groups);
    table.rows.push_back(std::move(row));
  }

  for (ComparisonRow& row : table.rows) {
    bool dominated = false;
    for (const ComparisonRow& other : table.rows) {
      if (&other == &row) continue;
      if (other.performance >= row.performance && other.fairness <= row.fairness &&
          (other.performance > row.performance || other.fairness < row.fairness)) {
        dominated = true;
        break;
      }
    }
    row.pareto = !dominated;
  }
  return table;
}

Format format_from_name(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "svg") return Format::svg;
  fail(ErrorCode::config, "unknown format '" + name + "'");
}

namespace {

std::string csv_quote(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (const char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string render_assessment_csv(const metrics::MetricFrameResult& result) {
  std::string out = "group,metric,value,n\n";
  const std::size_t total =
      std::accumulate(result.group_sizes.begin(), result.group_sizes.end(), std::size_t{0});
  for (std::size_t m = 0; m < result.metric_names.size(); ++m) {
    out += "overall," + csv_quote(result.metric_names[m]) + ",";
    if (result.overall[m]) out += format_double(*result.overall[m]);
    out += "," + std::to_string(total) + "\n";
  }
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    for (std::size_t m = 0; m < result.metric_names.size(); ++m) {
      out += csv_quote(result.groups[g].joined()) + "," + csv_quote(result.metric_names[m]) + ",";
      if (result.by_group[g][m]) out += format_double(*result.by_group[g][m]);
      out += "," + std::to_string(result.group_sizes[g]) + "\n";
    }
  }
  return out;
}

std::string render_comparison_csv(const ComparisonTable& table) {
  std::string out = "model,performance,fairness,pareto\n";
  for (const ComparisonRow& row : table.rows) {
    out += csv_quote(row.model_name) + "," + format_double(row.performance) + "," +
           format_double(row.fairness) + "," + (row.pareto ? "true" : "false") + "\n";
  }
  return out;
}

struct Axis {
  double lo;
  double hi;

  double place(double v, double pix_lo, double pix_hi) const {
    const double t = (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

Axis nice_axis(double lo, double hi) {
  if (lo == hi) {
    lo -= 0.05;
    hi += 0.05;
  }
  const double pad = (hi - lo) * 0.1;
  return {lo - pad, hi + pad};
}

void append_attr(std::string& out, const char* name, const std::string& value) {
  out += " ";
  out += name;
  out += "=\"" + value + "\"";
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (const char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

// Fixed 800x600 deterministic scatter: x is performance, y is disparity
// (lower is better), Pareto points filled, others hollow.
std::string render_comparison_svg(const ComparisonTable& table) {
  constexpr double kHeight = 600.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 760.0;
  constexpr double kTop = 50.0;
  constexpr double kBottom = 540.0;
  constexpr int kTicks = 5;

  double perf_lo = table.rows.front().performance;
  double perf_hi = perf_lo;
  double fair_lo = table.rows.front().fairness;
  double fair_hi = fair_lo;
  for (const ComparisonRow& row : table.rows) {
    perf_lo = std::min(perf_lo, row.performance);
    perf_hi = std::max(perf_hi, row.performance);
    fair_lo = std::min(fair_lo, row.fairness);
    fair_hi = std::max(fair_hi, row.fairness);
  }
  const Axis x_axis = nice_axis(perf_lo, perf_hi);
  const Axis y_axis = nice_axis(fair_lo, fair_hi);

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">model comparison</text>\n";

  // axes
  svg += "<line x1=\"" + format_double(kLeft) + "\" y1=\"" + format_double(kBottom) + "\" x2=\"" +
         format_double(kRight) + "\" y2=\"" + format_double(kBottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_double(kLeft) + "\" y1=\"" + format_double(kTop) + "\" x2=\"" +
         format_double(kLeft) + "\" y2=\"" + format_double(kBottom) + "\" stroke=\"black\"/>\n";

  for (int k = 0; k <= kTicks; ++k) {
    const double t = static_cast<double>(k) / kTicks;
    const double xv = x_axis.lo + t * (x_axis.hi - x_axis.lo);
    const double xp = x_axis.place(xv, kLeft, kRight);
    svg += "<line x1=\"" + format_double(xp) + "\" y1=\"" + format_double(kBottom) + "\" x2=\"" +
           format_double(xp) + "\" y2=\"" + format_double(kBottom + 6) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_double(xp) + "\" y=\"" + format_double(kBottom + 20) +
           "\" text-anchor=\"middle\">" + format_double(xv) + "</text>\n";

    const double yv = y_axis.lo + t * (y_axis.hi - y_axis.lo);
    const double yp = y_axis.place(yv, kBottom, kTop);
    svg += "<line x1=\"" + format_double(kLeft - 6) + "\" y1=\"" + format_double(yp) + "\" x2=\"" +
           format_double(kLeft) + "\" y2=\"" + format_double(yp) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_double(kLeft - 10) + "\" y=\"" + format_double(yp + 4) +
           "\" text-anchor=\"end\">" + format_double(yv) + "</text>\n";
  }

  svg += "<text x=\"" + format_double((kLeft + kRight) / 2) + "\" y=\"" +
         format_double(kHeight - 20) + "\" text-anchor=\"middle\">" +
         xml_escape(table.performance_metric) + "</text>\n";
  svg += "<text x=\"20\" y=\"" + format_double((kTop + kBottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         format_double((kTop + kBottom) / 2) + ")\">" + xml_escape(table.fairness_metric) +
         "</text>\n";

  for (const ComparisonRow& row : table.rows) {
    const double xp = x_axis.place(row.performance, kLeft, kRight);
    const double yp = y_axis.place(row.fairness, kBottom, kTop);
    std::string circle = "<circle";
    append_attr(circle, "cx", format_double(xp));
    append_attr(circle, "cy", format_double(yp));
    append_attr(circle, "r", "5");
    if (row.pareto) {
      append_attr(circle, "fill", "#1f6fb2");
      append_attr(circle, "class", "pareto");
    } else {
      append_attr(circle, "fill", "none");
      append_attr(circle, "class", "dominated");
    }
    append_attr(circle, "stroke", "#1f6fb2");
    circle += "/>\n";
    svg += circle;
    svg += "<text x=\"" + format_double(xp + 8) + "\" y=\"" + format_double(yp - 8) + "\">" +
           xml_escape(row.model_name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::string render_report(const Report& report, Format format) {
  if (report.kind == Report::Kind::assessment && !report.assessment) {
    fail(ErrorCode::format, "assessment report has no metric payload");
  }
  if (report.kind == Report::Kind::comparison && !report.comparison) {
    fail(ErrorCode::format, "comparison report has no table payload");
  }

  if (format == Format::svg) {
    if (report.kind != Report::Kind::comparison) {
      fail(ErrorCode::format, "svg output is only available for comparison reports");
    }
    return render_comparison_svg(*report.comparison);
  }

  if (format == Format::csv) {
    return report.kind == Report::Kind::assessment ? render_assessment_csv(*report.assessment)
                                                   : render_comparison_csv(*report.comparison);
  }

  nlohmann::json j;
  j["kind"] = report.kind == Report::Kind::assessment ? "assessment" : "comparison";
  j["metadata"] = {{"version", report.metadata.version},
                   {"input_digest", report.metadata.input_digest}};
  j["payload"] = report.kind == Report::Kind::assessment ? report.assessment->to_json()
                                                         : report.comparison->to_json();
  return j.dump(2) + "\n";
}

std::string input_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char ch : bytes) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[hash & 0xf];
    hash >>= 4;
  }
  buf[16] = '\0';
  return std::string("fnv1a:") + buf;
}

}  // namespace fairkit::report
