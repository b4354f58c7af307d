#pragma once

#include <stdexcept>
#include <string>

namespace levelflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation at (or within 1e-9 of) a declared singular point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Point or parameter outside the admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// |grad u| vanishes (or is below the critical threshold) where the operation needs it nonzero.
class CriticalPointError : public Error {
 public:
  using Error::Error;
};

/// A level set is not a closed curve inside the domain.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis of an operation fails at a sample.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace levelflow
