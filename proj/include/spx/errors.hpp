#ifndef SPX_ERRORS_HPP
#define SPX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spx {

// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Requested size not representable by the construction (e.g. Hadamard order
// that is not a power of two).
struct UnsupportedSize : Error {
  using Error::Error;
};

// An input violated a documented invariant of its type.
struct ContractViolation : Error {
  using Error::Error;
};

// Reference measurement unusable for gain estimation (zero ideal response).
struct DegenerateReference : Error {
  using Error::Error;
};

// Noise model has no symmetric positive definite covariance.
struct InvalidNoiseModel : Error {
  using Error::Error;
};

// Unregularized solve requested on a rank-deficient system.
struct SingularSystem : Error {
  using Error::Error;
};

// Operation would materialize a matrix above the configured guard.
struct ResourceLimit : Error {
  using Error::Error;
};

struct DegenerateSubspace : Error {
  using Error::Error;
};

struct InvalidDataset : Error {
  using Error::Error;
};

struct SplitTooSmall : Error {
  using Error::Error;
};

}  // namespace spx

#endif
