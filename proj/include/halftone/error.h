#ifndef HALFTONE_ERROR_H_
#define HALFTONE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace halftone {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `offset` is the byte position where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Arguments that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input for which the requested quantity is undefined (e.g. an all-white
// image has no black dots to place).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace halftone

#endif  // HALFTONE_ERROR_H_
