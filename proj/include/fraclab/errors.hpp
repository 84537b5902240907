#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Violated precondition or malformed input. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of an operation (e.g. t outside [-1,1]).
class DomainError : public ValidationError {
 public:
  explicit DomainError(const std::string& what) : ValidationError(what) {}
};

/// A grid or quadrature is too coarse for the requested evaluation. Exit code 3.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace fraclab
