#pragma once

#include <stdexcept>
#include <string>

namespace ccchart {

enum class ErrorKind {
  invalid_input,
  wrong_indicator,
  capacity_guard,
  invalid_grid,
  unbounded_direction,
  degenerate_chart,
  invalid_step,
  not_found,
  schema,
  malformed_result,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::wrong_indicator: return "wrong-indicator";
    case ErrorKind::capacity_guard: return "capacity-guard";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::unbounded_direction: return "unbounded-direction";
    case ErrorKind::degenerate_chart: return "degenerate-chart";
    case ErrorKind::invalid_step: return "invalid-step";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::schema: return "schema";
    case ErrorKind::malformed_result: return "malformed-result";
  }
  return "unknown";
}

// All library failures are reported through this exception type; callers
// that need to branch on the cause inspect kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ccchart
