#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ffp {

/// Bad argument value supplied by the caller (negative threshold, k too large, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that violates a precondition (non-finite entries, mismatched frames).
class InvalidInput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A solver produced a non-finite intermediate.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(int iteration, const std::string &what);
  int iteration() const noexcept { return iteration_; }

private:
  int iteration_;
};

/// Malformed matrix or image file. `offset` is the byte (or line, for CSV)
/// position where parsing stopped.
class FormatError : public std::runtime_error {
public:
  FormatError(const std::string &what, std::uint64_t offset);
  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace ffp
