#pragma once

#include <stdexcept>
#include <string>

namespace centaur {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external input: FEN, UCI/SAN move text, config or dataset lines.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IllegalMoveError : public Error {
 public:
  using Error::Error;
};

// Raised when an operation is called outside its contract (terminal
// position handed to an engine, shape mismatch at load time, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace centaur
