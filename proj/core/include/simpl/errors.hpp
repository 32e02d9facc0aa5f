#pragma once

#include <stdexcept>
#include <string>

namespace simpl {

// Base for every failure the library reports. Subclasses map onto the CLI
// exit codes: validation/parse -> 1, I/O -> 2, generation -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// Mesh loading distinguishes malformed records from dangling face indices.
class MeshFormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

class MeshIndexError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace simpl
