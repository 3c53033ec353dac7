#pragma once

#include <stdexcept>
#include <string>

namespace otoc {

// All library errors derive from OtocError so callers can catch one type.
struct OtocError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix fails a unitarity check (message carries the max-entry deviation).
struct NonUnitaryError : OtocError {
  using OtocError::OtocError;
};

// Matrix fails a Hermiticity check.
struct NonHermitianError : OtocError {
  using OtocError::OtocError;
};

// Shape / local-dimension mismatch between operands.
struct DimensionError : OtocError {
  using OtocError::OtocError;
};

// Requested object exceeds the configured memory budget.
struct BudgetError : OtocError {
  using OtocError::OtocError;
};

// Scalar argument outside its mathematical domain.
struct DomainError : OtocError {
  using OtocError::OtocError;
};

// Parameter combination violates an amplitude bound (e.g. z1 = 0 with z2 > 0).
struct InfeasibleError : OtocError {
  using OtocError::OtocError;
};

// Not enough input data (amplitudes, fit points, ...) to proceed.
struct InsufficientDataError : OtocError {
  using OtocError::OtocError;
};

// Malformed serialized input (JSON schema violations etc.).
struct ParseError : OtocError {
  using OtocError::OtocError;
};

}  // namespace otoc
