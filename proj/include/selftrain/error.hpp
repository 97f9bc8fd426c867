#pragma once

#include <stdexcept>
#include <string>

namespace selftrain {

// File-level problems: bad magic, truncated payload, dimension overflow.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Semantic problems: invariant violations in otherwise well-formed data.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace selftrain
