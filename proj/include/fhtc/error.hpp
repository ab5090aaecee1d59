#pragma once

#include <stdexcept>
#include <string>

namespace fhtc {

// All library failures derive from Error so callers (the CLI in particular)
// can separate computation errors from usage errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete experiment configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// An internal iteration cap was hit. Indicates a bug, not bad input.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Outage constraint at or below the noise-only floor.
class InfeasibleConstraint : public Error {
 public:
  using Error::Error;
};

class RateUnachievable : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhtc
