#pragma once

#include <stdexcept>
#include <string>

namespace freeplate {

/// Argument outside the mathematical domain of an operation (tau <= 0, b == 0, ...).
class domain_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A series evaluation would exceed its term or argument budget.
class range_error : public std::range_error {
  public:
    using std::range_error::range_error;
};

/// A valid request the library deliberately does not serve (e.g. non-zonal harmonics for d >= 4).
class unsupported_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Quadrature refinements disagree; typically the integral diverges.
class convergence_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A proven property failed numerically. Indicates a bug in the kernel, not bad input.
class invariant_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

} // namespace freeplate
