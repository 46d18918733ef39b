#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpm {

/// Broad failure class; decides the CLI exit code.
enum class ErrorKind { Config, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Data, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class LabelingRequiredError : public Error {
 public:
  explicit LabelingRequiredError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(int requested, int attainable)
      : Error(ErrorKind::Numerical, "requested dimension " + std::to_string(requested) +
                                        " exceeds numerical rank; attainable rank is " +
                                        std::to_string(attainable)),
        requested_(requested),
        attainable_(attainable) {}
  int requested() const noexcept { return requested_; }
  int attainable_rank() const noexcept { return attainable_; }

 private:
  int requested_;
  int attainable_;
};

class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class FeasibilityError : public Error {
 public:
  explicit FeasibilityError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// 2 = config, 3 = data, 4 = numerical.
constexpr int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
      return 2;
    case ErrorKind::Data:
      return 3;
    case ErrorKind::Numerical:
      return 4;
  }
  return 1;
}

}  // namespace cpm
