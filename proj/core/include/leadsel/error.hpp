#pragma once

#include <stdexcept>
#include <string>

namespace leadsel {

/// Raised for invalid configuration values and malformed config files.
/// `line` is 1-based when the error comes from a file, 0 otherwise.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what
                                       : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace leadsel
