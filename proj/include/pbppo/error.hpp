#ifndef PBPPO_ERROR_HPP_
#define PBPPO_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pbppo {

// Failure categories double as process exit codes in the CLI.
enum class ErrorCategory : int {
  kConfig = 2,
  kIo = 3,
  kNumerical = 4,
  kEnvironment = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

// Carries the name of the primitive that produced the first non-finite value.
class NumericalError : public Error {
 public:
  NumericalError(std::string primitive, const std::string& what)
      : Error(ErrorCategory::kNumerical, what), primitive_(std::move(primitive)) {}

  const std::string& primitive() const noexcept { return primitive_; }

 private:
  std::string primitive_;
};

class EnvError : public Error {
 public:
  explicit EnvError(const std::string& what)
      : Error(ErrorCategory::kEnvironment, what) {}
};

}  // namespace pbppo

#endif  // PBPPO_ERROR_HPP_
