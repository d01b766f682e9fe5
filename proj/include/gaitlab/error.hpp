#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaitlab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Dimension or channel-count mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed ASF/AMC input. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IncompatibleSkeletons : public Error {
 public:
  using Error::Error;
};

// Archive read/write failure.
class IoError : public Error {
 public:
  enum class Kind { open, version, checksum, malformed };
  IoError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Learning produced no usable feature direction.
class EmptyTransform : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class NotImplemented : public Error {
 public:
  using Error::Error;
};

}  // namespace gaitlab
