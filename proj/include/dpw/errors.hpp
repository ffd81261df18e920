#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dpw {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation at a pole of a loop with negative Laurent coefficients.
struct PoleError : Error {
  using Error::Error;
};

// det of a loop fell below tolerance on samples.
struct SingularLoopError : Error {
  using Error::Error;
};

// Truncation residual exceeded tolerance at the configured bandwidth.
struct BandwidthError : Error {
  using Error::Error;
};

// Input outside the domain an operation supports (e.g. a loop without
// the annular extension the factorization needs).
struct DomainError : Error {
  using Error::Error;
};

// Gram loop not positive definite, Newton stall, or similar breakdown
// of the Iwasawa factorization.
struct FactorizationError : Error {
  using Error::Error;
};

// A linear map of the z^AP recursion is (near-)singular at some lambda.
struct ResonanceError : Error {
  ResonanceError(const std::string& msg, std::complex<double> lambda_)
      : Error(msg), lambda(lambda_) {}
  std::complex<double> lambda;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dpw
