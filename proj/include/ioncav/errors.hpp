#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace ioncav {

/// Coarse error classes. The numeric values double as CLI exit codes.
enum class ErrorCategory : int { config = 1, model = 2, numerical = 3 };

inline std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::model: return "model";
    case ErrorCategory::numerical: return "numerical";
  }
  return "unknown";
}

/// Base of every exception thrown by the library.
///
/// `kind` is a short stable tag (e.g. "invalid-truncation") that tests and
/// tooling can match on without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(message), category_(category), kind_(std::move(kind)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorCategory category_;
  std::string kind_;
};

#define IONCAV_DEFINE_ERROR(Name, Category, Kind)                         \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message)                             \
        : Error(ErrorCategory::Category, Kind, message) {}                \
  };

IONCAV_DEFINE_ERROR(ConfigError, config, "config")
IONCAV_DEFINE_ERROR(InvalidTruncation, model, "invalid-truncation")
IONCAV_DEFINE_ERROR(LayoutError, model, "layout")
IONCAV_DEFINE_ERROR(DomainError, model, "domain")
IONCAV_DEFINE_ERROR(ModelError, model, "model")
IONCAV_DEFINE_ERROR(ConsistencyError, model, "consistency")
IONCAV_DEFINE_ERROR(UnderdeterminedError, model, "underdetermined")
IONCAV_DEFINE_ERROR(NormalizationError, numerical, "normalization")
IONCAV_DEFINE_ERROR(NonUniqueSteadyState, numerical, "non-unique-steady-state")
IONCAV_DEFINE_ERROR(NegativityError, numerical, "negativity")
IONCAV_DEFINE_ERROR(SolverError, numerical, "solver")

#undef IONCAV_DEFINE_ERROR

/// Raised when the pseudopotential radicand goes negative (anti-trapping bias).
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& message, double radicand)
      : Error(ErrorCategory::model, "instability", message), radicand_(radicand) {}
  /// Value of the squared secular frequency that went negative, (rad/s)^2.
  double radicand() const noexcept { return radicand_; }

 private:
  double radicand_;
};

/// Rethrow `e` with `context` appended, keeping category and kind.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  throw Error(e.category(), e.kind(), std::string(e.what()) + " (" + context + ")");
}

}  // namespace ioncav
