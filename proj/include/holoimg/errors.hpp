#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holoimg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index fell outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition failed (coincident points, segment outside a field, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configuration document does not match the schema. `key_path()` names the offending key.
class ParseError : public ValidationError {
 public:
  ParseError(std::string key_path, const std::string& what)
      : ValidationError(key_path + ": " + what), key_path_(std::move(key_path)), detail_(what) {}

  const std::string& key_path() const noexcept { return key_path_; }
  /// Message without the key path prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string key_path_;
  std::string detail_;
};

/// The reciprocity quotient hit a reference entry that is numerically zero.
class SingularReferenceError : public Error {
 public:
  SingularReferenceError(std::size_t i, std::size_t j, const std::string& what)
      : Error(what), i_(i), j_(j) {}

  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

/// An intensity oracle could not deliver a measurement.
class OracleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace holoimg
