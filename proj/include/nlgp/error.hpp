#pragma once

#include <stdexcept>
#include <string>

namespace nlgp {

enum class errc {
  invalid_argument,
  beta_zero,
  offset_too_small,
  period_mismatch,
  invalid_mu,
  truncation_too_small,
  nonpositive_multiplier,
  eigensolve_failure,
  step_size_underflow,
  non_finite,
  mismatched_kernel,
  config,
  io,
};

inline const char* to_string(errc c) noexcept
{
  switch (c) {
  case errc::invalid_argument: return "InvalidArgument";
  case errc::beta_zero: return "BetaZero";
  case errc::offset_too_small: return "OffsetTooSmall";
  case errc::period_mismatch: return "PeriodMismatch";
  case errc::invalid_mu: return "InvalidMu";
  case errc::truncation_too_small: return "TruncationTooSmall";
  case errc::nonpositive_multiplier: return "NonpositiveMultiplier";
  case errc::eigensolve_failure: return "EigensolveFailure";
  case errc::step_size_underflow: return "StepSizeUnderflow";
  case errc::non_finite: return "NonFinite";
  case errc::mismatched_kernel: return "MismatchedKernel";
  case errc::config: return "ConfigError";
  case errc::io: return "IOError";
  }
  return "Unknown";
}

class error : public std::runtime_error {
public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
  {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

} // namespace nlgp
