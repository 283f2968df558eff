#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iebench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid run, match or adapter configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Ground-truth errors carry the 1-based line they were raised for (0 if unknown).
class RecordError : public Error {
 public:
  RecordError(const std::string& message, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MalformedRecord : public RecordError {
 public:
  using RecordError::RecordError;
};

class UnknownLabel : public RecordError {
 public:
  using RecordError::RecordError;
};

class KeyParseError : public Error {
 public:
  using Error::Error;
};

class XmlParseError : public Error {
 public:
  using Error::Error;
};

class JsonParseError : public Error {
 public:
  using Error::Error;
};

class PathTypeError : public Error {
 public:
  using Error::Error;
};

class CsvParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace iebench
