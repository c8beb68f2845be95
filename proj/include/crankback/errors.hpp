#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace crankback {

// A field failed validation. `line` is 0 when the value did not come from a
// file.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, std::string reason, int line = 0)
      : std::invalid_argument(format(field, reason, line)),
        field_(std::move(field)),
        reason_(std::move(reason)),
        line_(line) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& reason,
                            int line) {
    std::string msg;
    if (line > 0) msg += "line " + std::to_string(line) + ": ";
    msg += field + ": " + reason;
    return msg;
  }

  std::string field_;
  std::string reason_;
  int line_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Retry simulation exhausted its attempt budget without enough successes.
class NoSuccessError : public std::runtime_error {
 public:
  NoSuccessError(const std::string& what, unsigned long long attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  unsigned long long attempts() const noexcept { return attempts_; }

 private:
  unsigned long long attempts_;
};

// Root search did not meet tolerance within its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Malformed scenario document.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace crankback
