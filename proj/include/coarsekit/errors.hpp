#pragma once

#include <stdexcept>
#include <string>

namespace coarsekit {

// Error classes map onto process exit codes in the CLI:
// io_error -> 2, config_error/dimension_error -> 3, numerical_error -> 4.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class dimension_error : public std::runtime_error {
 public:
  explicit dimension_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coarsekit
