#ifndef DETSHOCK_ERRORS_HPP_
#define DETSHOCK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace detshock {

// Base of every solver-side failure. Config problems derive from ConfigError
// so the CLI can map them to a different exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Argument leaves the admissible (subsonic) range.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class BranchCollisionError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class FoldedGridError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class EllipticityError : public Error {
 public:
  using Error::Error;
};

class LinearSolverError : public Error {
 public:
  using Error::Error;
};

class DenominatorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace detshock

#endif  // DETSHOCK_ERRORS_HPP_
