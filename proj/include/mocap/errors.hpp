#pragma once

#include <stdexcept>
#include <string>

namespace mocap {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateRotation : Error { using Error::Error; };
struct NotARotation : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TooShortSequence : Error { using Error::Error; };
struct InvalidSteps : Error { using Error::Error; };
struct InvalidStepPair : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct NumericDivergence : Error { using Error::Error; };
struct WrongWindow : Error { using Error::Error; };
struct ModeMismatch : Error { using Error::Error; };
struct MissingModel : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };
struct OutOfOrderFrame : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct HashMismatch : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace mocap
