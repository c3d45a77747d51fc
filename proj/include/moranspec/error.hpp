#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace moranspec {

enum class errc {
  invalid_argument,
  oddity_violation,
  degenerate,
  duplicate_digits,
  cardinality_mismatch,
  singular_matrix,
  not_expanding,
  norm_at_least_one,
  nonpositive_tolerance,
  out_of_theory,
  tower_unavailable,
  cap_exceeded,
  parse_error,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::oddity_violation: return "OddityViolation";
    case errc::degenerate: return "Degenerate";
    case errc::duplicate_digits: return "DuplicateDigits";
    case errc::cardinality_mismatch: return "CardinalityMismatch";
    case errc::singular_matrix: return "SingularMatrix";
    case errc::not_expanding: return "NotExpanding";
    case errc::norm_at_least_one: return "NormAtLeastOne";
    case errc::nonpositive_tolerance: return "NonpositiveTolerance";
    case errc::out_of_theory: return "OutOfTheory";
    case errc::tower_unavailable: return "TowerUnavailable";
    case errc::cap_exceeded: return "CapExceeded";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

// Single exception type for the library. `level()` is the 1-based Moran level
// the failure refers to, when there is one.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what,
        std::optional<std::size_t> level = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        message_(what),
        level_(level) {}

  [[nodiscard]] errc code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> level() const noexcept {
    return level_;
  }
  // what() without the leading code name.
  [[nodiscard]] const std::string& message() const noexcept {
    return message_;
  }

 private:
  errc code_;
  std::string message_;
  std::optional<std::size_t> level_;
};

}  // namespace moranspec
