#pragma once

#include <stdexcept>
#include <string>

namespace farsec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: CSV rows, hex strings, packet headers, JSON lines.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a model invariant (self-loop, duplicate
/// edge, negative level, unknown endpoint, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A referenced entity (node, link, host, flow) does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace farsec
