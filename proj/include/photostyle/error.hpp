#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace photostyle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (match file, config file). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose values violate a documented domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Fewer matched points than the five the location codings need.
class InsufficientMatchesError : public Error {
 public:
  InsufficientMatchesError(std::size_t have, std::size_t need)
      : Error("insufficient matches: have " + std::to_string(have) + ", need at least " +
              std::to_string(need)),
        have_(have) {}
  std::size_t have() const noexcept { return have_; }

 private:
  std::size_t have_;
};

/// The iterative singular value solver ran out of restarts.
class SvdConvergenceError : public Error {
 public:
  SvdConvergenceError(int restarts, double last_drift)
      : Error("partial SVD did not converge after " + std::to_string(restarts) +
              " restarts (last singular-value drift " + std::to_string(last_drift) + ")"),
        restarts_(restarts),
        last_drift_(last_drift) {}
  int restarts() const noexcept { return restarts_; }
  double last_drift() const noexcept { return last_drift_; }

 private:
  int restarts_;
  double last_drift_;
};

/// A pipeline stage failed; the message is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace photostyle
