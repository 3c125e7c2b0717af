#pragma once

#include <stdexcept>
#include <string>

namespace ncsg {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible matrix / operator dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Objects from different groups (or grids) were mixed.
class GroupMismatchError : public Error {
 public:
  using Error::Error;
};

/// A quadrature-exactness margin would be violated; the operation refuses
/// to run rather than silently aliasing.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Expression-DSL syntax error. `position` is a 1-based byte position;
/// errors at end of input point one past the last byte.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Run-configuration schema violation. `pointer` is a JSON-pointer-style
/// path naming the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, const std::string& pointer)
      : Error(what + " (" + pointer + ")"), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// File-format or filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numeric contract violation (non-finite values, domain errors at
/// evaluation time, empty dual, zero witness profile, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncsg
