#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ultrafractal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed ordinal, space or rational literal.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An operation was called outside its domain (empty space, -1 height, equal branches, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A construction that needs a successor, zero or infinite height received a limit ordinal.
class NotSuccessor : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A node did not show up in any level set below the configured level cap.
class LevelCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A finite enumeration (net size, word length) grew past its configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Greedy child matching ran past its scan bound without finding a witness.
class MatchingExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace ultrafractal
