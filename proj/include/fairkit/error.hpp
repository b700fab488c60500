#pragma once

#include <stdexcept>
#include <string>

namespace fairkit {

/// Categories for everything that can go wrong; the CLI maps each category to
/// a documented process exit code.
enum class ErrorCode {
  schema,            // missing/mismatched columns
  parse,             // malformed CSV or JSON input
  value,             // invalid cell value (non-binary label, missing field)
  data,              // dataset unusable for the requested operation
  shape,             // mismatched vector lengths
  weight,            // invalid sample weights
  config,            // invalid configuration or unknown name
  aggregation,       // no defined values to aggregate
  undefined_value,   // undefined metric value under the raise policy
  degenerate_group,  // single-class group where both classes are required
  moment,            // empty conditioning cell in strict mode
  fit,               // constraint-infeasible fitting problem
  prediction,        // prediction requested for unseen input
  format,            // unsupported report format for payload
  convergence,       // solver stopped before reaching its tolerance
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema: return "schema";
    case ErrorCode::parse: return "parse";
    case ErrorCode::value: return "value";
    case ErrorCode::data: return "data";
    case ErrorCode::shape: return "shape";
    case ErrorCode::weight: return "weight";
    case ErrorCode::config: return "config";
    case ErrorCode::aggregation: return "aggregation";
    case ErrorCode::undefined_value: return "undefined-value";
    case ErrorCode::degenerate_group: return "degenerate-group";
    case ErrorCode::moment: return "moment";
    case ErrorCode::fit: return "fit";
    case ErrorCode::prediction: return "prediction";
    case ErrorCode::format: return "format";
    case ErrorCode::convergence: return "convergence";
  }
  return "unknown";
}

}  // namespace fairkit
