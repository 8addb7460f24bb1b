#pragma once

#include <stdexcept>
#include <string>

namespace nhhj {

/// A map was evaluated outside its domain or produced non-finite values
/// (e.g. the snakeboard at sin(phi) = 0, a negative radicand in an ansatz).
class EvaluationDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The constraint matrix A(q) lost full row rank.
class DegenerateConstraintsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The metric g(q) is not symmetric positive definite or is too ill-conditioned to invert.
class MetricDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The regularity matrix A g^{-1} A^T is singular.
class RegularityFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A momentum that was required to lie in the constrained momentum space does not.
class ConstraintViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The integrator produced a non-finite state or was misconfigured.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nhhj
