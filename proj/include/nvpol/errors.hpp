#pragma once

#include <stdexcept>
#include <string>

namespace nvpol {

// Base for all library errors. Subclasses carry the failure category in the
// type so callers (and the CLI exit-code mapping) can dispatch without
// string matching.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// environment
struct DistanceTooSmall : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct ShellTooSmall : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

// oracle
struct TooLarge : Error { using Error::Error; };

// dynamics / estimator
struct GridInvalid : Error { using Error::Error; };
struct EmptySurface : Error { using Error::Error; };
struct AllPointsExcluded : Error { using Error::Error; };
struct NonPositiveOmega : Error { using Error::Error; };
struct SoundnessViolation : Error { using Error::Error; };

// cli / io
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace nvpol
