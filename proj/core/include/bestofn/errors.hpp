#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bestofn {

/// Error codes raised across the library. Each value corresponds to one
/// documented failure mode of an operation or a loader.
enum class Errc {
  too_few_options,
  quality_out_of_range,
  not_normalized,
  non_positive_cost,
  missing_interaction,
  degenerate_quality,
  phase_not_expired,
  zero_fraction,
  tolerance_exceeded,
  state_space_too_large,
  parse_error,
  validation_error,
  unknown_key,
  io_error,
};

inline std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::too_few_options: return "TooFewOptions";
    case Errc::quality_out_of_range: return "QualityOutOfRange";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::non_positive_cost: return "NonPositiveCost";
    case Errc::missing_interaction: return "MissingInteraction";
    case Errc::degenerate_quality: return "DegenerateQuality";
    case Errc::phase_not_expired: return "PhaseNotExpired";
    case Errc::zero_fraction: return "ZeroFraction";
    case Errc::tolerance_exceeded: return "ToleranceExceeded";
    case Errc::state_space_too_large: return "StateSpaceTooLarge";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::unknown_key: return "UnknownKey";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

/// Exception carrying an Errc plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bestofn
