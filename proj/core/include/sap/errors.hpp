#ifndef SAP_ERRORS_HPP
#define SAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sap {

// Bad user input: malformed files, parameters outside their documented range,
// distributions that cannot be used with the requested operation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical trouble detected at runtime (inconsistent system, indefinite
// matrix handed to CG, divergent rate request).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class InconsistencyError : public NumericalError {
 public:
  InconsistencyError(const std::string& what, double residual)
      : NumericalError(what), residual_norm(residual) {}
  double residual_norm;
};

// Raised when (omega, beta) violates a1 + a2 < 1; carries the largest
// momentum parameter that would have been admissible.
class RateUndefinedError : public NumericalError {
 public:
  RateUndefinedError(const std::string& what, double bound)
      : NumericalError(what), beta_upper_bound(bound) {}
  double beta_upper_bound;
};

class UnsupportedClosedFormError : public ValidationError {
 public:
  explicit UnsupportedClosedFormError(const std::string& what) : ValidationError(what) {}
};

}  // namespace sap

#endif
