#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synapcount {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The file is a TIFF/PNG we do not handle (compression, bit depth, tiling...).
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

/// An RGB TIFF was given without naming the channel to extract.
class ChannelRequiredError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A JSON document does not match the expected schema; `path()` names the field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Rasters that must share a size do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A scalar argument violates its domain (non-positive scale, threshold > 255...).
class ValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace synapcount
