#pragma once

#include <stdexcept>
#include <string>

namespace qgauss {

/// Raised when an argument falls outside an operation's domain. The message
/// names the violated bound.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised for malformed input data (sample files, CSV rows).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qgauss
