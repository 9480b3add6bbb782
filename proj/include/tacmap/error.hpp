#pragma once

#include <stdexcept>
#include <string>

namespace tacmap {

// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad files, bad parameters, schema violations.
class InputError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures (unreadable or unwritable paths).
class IoError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

#define TACMAP_CHECK(cond, msg)                                          \
  do {                                                                   \
    if (!(cond)) {                                                       \
      throw ::tacmap::InvariantError(std::string("invariant violated: ") \
                                     + (msg));                           \
    }                                                                    \
  } while (0)

}  // namespace tacmap
