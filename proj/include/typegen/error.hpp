#pragma once

#include <stdexcept>
#include <string>

namespace typegen {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source text is not valid Python 3 (3.8 grammar level).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) +
              ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class TargetNotFound : public Error {
 public:
  using Error::Error;
};

/// Bad or missing input data: files, JSON lines, locators, ids.
class InputError : public Error {
 public:
  using Error::Error;
};

class UnknownTargetId : public InputError {
 public:
  using InputError::InputError;
};

class ContextOverflow : public Error {
 public:
  ContextOverflow(const std::string& message, long estimated, long budget)
      : Error(message), estimated_(estimated), budget_(budget) {}
  long estimated_tokens() const { return estimated_; }
  long budget() const { return budget_; }

 private:
  long estimated_;
  long budget_;
};

// Completion backend failures.
class BackendError : public Error {
 public:
  using Error::Error;
};
class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};
class RateLimited : public BackendError {
 public:
  using BackendError::BackendError;
};
class Timeout : public BackendError {
 public:
  using BackendError::BackendError;
};
class MalformedResponse : public BackendError {
 public:
  using BackendError::BackendError;
};
class NetworkDisabled : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace typegen
