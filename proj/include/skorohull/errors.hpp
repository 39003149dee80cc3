#pragma once

#include <stdexcept>
#include <string>

namespace skorohull {

// Broad failure classes. The C API maps these one-to-one onto status codes.
enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNotConverged,
  kSingularMatrix,
  kContainment,
  kValidation,
  kIo,
  kRuntime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(long expected, long actual)
      : Error(ErrorKind::kDimensionMismatch,
              "dimension mismatch: expected " + std::to_string(expected) +
                  ", got " + std::to_string(actual)) {}
};

// An iterative solver stopped at its iteration cap. `residual` is the last
// convergence measure (successive-iterate change or duality gap).
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double residual)
      : Error(ErrorKind::kNotConverged,
              what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(const std::string& what)
      : Error(ErrorKind::kSingularMatrix, what) {}
};

// A point that must lie in a convex body does not.
class ContainmentError : public Error {
 public:
  explicit ContainmentError(const std::string& what)
      : Error(ErrorKind::kContainment, what) {}
};

// Experiment configuration rejected before anything runs.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(ErrorKind::kIo, path + ": " + what) {}
};

inline void require(bool condition, const char* what) {
  if (!condition) throw InvalidArgument(what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) throw InvalidArgument(what);
}

}  // namespace skorohull
