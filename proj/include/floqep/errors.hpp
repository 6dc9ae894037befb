#pragma once

#include <stdexcept>
#include <string>

namespace floqep {

// Base class for every failure the library reports. Subclasses name the
// condition; the message carries context (operation, offending value).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSquare : NumericError {
  using NumericError::NumericError;
};
struct LengthMismatch : NumericError {
  using NumericError::NumericError;
};
struct NonConvergence : NumericError {
  using NumericError::NumericError;
};
struct SingularMatrix : NumericError {
  using NumericError::NumericError;
};
struct NotSolvable : NumericError {
  using NumericError::NumericError;
};
struct DegenerateInput : NumericError {
  using NumericError::NumericError;
};
struct NotResonant : NumericError {
  using NumericError::NumericError;
};
struct TruncationNotConverged : NumericError {
  using NumericError::NumericError;
};
struct Overflow : NumericError {
  using NumericError::NumericError;
};
struct InsufficientData : NumericError {
  using NumericError::NumericError;
};
struct StepSizeUnderflow : NumericError {
  using NumericError::NumericError;
};
struct NonFiniteState : NumericError {
  using NumericError::NumericError;
};
struct GapCollapse : NumericError {
  using NumericError::NumericError;
};
struct AmbiguousMatching : NumericError {
  using NumericError::NumericError;
};
struct VanishingNorm : NumericError {
  using NumericError::NumericError;
};
struct BadSpan : NumericError {
  using NumericError::NumericError;
};
struct NormOverflow : NumericError {
  using NumericError::NumericError;
};
struct UnknownPreset : NumericError {
  using NumericError::NumericError;
};
struct ParameterOutOfRange : NumericError {
  using NumericError::NumericError;
};
struct IoError : NumericError {
  using NumericError::NumericError;
};

// Configuration problems are not numeric failures; the CLI maps them to a
// distinct exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace floqep
