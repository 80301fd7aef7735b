#ifndef STICKY1D_ERRORS_HPP_
#define STICKY1D_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sticky1d {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// l1_distance between step functions whose tail values differ (infinite mass).
struct MismatchedTails : Error { using Error::Error; };

// Initial particle data violates ordering / positivity / normalization.
struct InvalidInitialData : Error { using Error::Error; };

// More collision events inside one nominal step than allowed; dt misconfigured.
struct StepTooLarge : Error { using Error::Error; };

// Argument outside the admissible range (flux state, probe index, ...).
struct OutOfRange : Error { using Error::Error; };

// Shock query on a jump of negligible height.
struct DegenerateJump : Error { using Error::Error; };

// Convolution against a kernel without compact support.
struct UnboundedSupport : Error { using Error::Error; };

// Test-function window violates the admissibility constraints.
struct WindowViolation : Error { using Error::Error; };

// Entropy probe support escapes the trajectory's time domain.
struct ProbeOutOfWindow : Error { using Error::Error; };

// Finite-volume step with dt above the CFL bound.
struct CflViolation : Error { using Error::Error; };

// Stability quotient requested for runs with identical initial data.
struct ZeroInitialDistance : Error { using Error::Error; };

// Monotone (CDF-like) input expected but not provided.
struct NonMonotoneInput : Error { using Error::Error; };

// Malformed or unknown configuration content.
struct ConfigError : Error { using Error::Error; };

// Artifact files missing or unreadable.
struct IoError : Error { using Error::Error; };

}  // namespace sticky1d

#endif  // STICKY1D_ERRORS_HPP_
