#ifndef HORST_COMMON_ERROR_HPP
#define HORST_COMMON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace horst {

/// Bad configuration or bad input domain. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown (singular pivot, divergence). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File format or I/O failure. CLI exit code 4.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace horst

#endif
