#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opquant {

enum class ErrorCode {
  incompatible_tails,
  dimension_mismatch,
  zero_vector,
  unsupported_tail,
  degenerate_functionals,
  degenerate_basis,
  unsupported_operator,
  bad_dimensions,
  exhausted_subspace,
  budget_infeasible,
  invalid_witness,
  invalid_argument,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library error kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace opquant
