#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace windsim {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Query point outside the region an interpolation stencil can cover.
class OutOfDomainError : public Error {
public:
  using Error::Error;
};

/// Input that makes a formula singular (log of zero, zero divisor, ...).
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

/// Least-squares system without a unique solution.
class RankDeficiencyError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent input file. Carries file and line.
class IngestError : public Error {
public:
  IngestError(const std::string &file, std::size_t line, const std::string &what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file),
        line_(line) {}

  const std::string &file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Collected non-fatal conditions; callers decide where they are reported.
struct Warnings {
  std::vector<std::string> messages;
  void add(std::string m) { messages.push_back(std::move(m)); }
};

} // namespace windsim
