#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chemserve {

// Base of every domain error thrown by the library. `kind()` is a stable,
// machine-readable name used in service error bodies and CLI diagnostics.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string &message)
      : std::runtime_error(message), kind_(std::move(kind)) { }

  const std::string &kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

class UnsupportedElement : public Error {
public:
  explicit UnsupportedElement(const std::string &what)
      : Error("UnsupportedElement", what) { }
};

class ValenceError : public Error {
public:
  explicit ValenceError(const std::string &what)
      : Error("ValenceError", what) { }
};

// SMILES syntax error; `position` is a 0-based byte offset into the input.
class SyntaxError : public Error {
public:
  SyntaxError(std::size_t position, const std::string &reason)
      : Error("SyntaxError",
              "at position " + std::to_string(position) + ": " + reason),
        position_(position), reason_(reason) { }

  std::size_t position() const noexcept { return position_; }
  const std::string &reason() const noexcept { return reason_; }

private:
  std::size_t position_;
  std::string reason_;
};

// Molfile/SDF error. `line` is 1-based within the record; `entry` is the
// 0-based SDF record index, or npos for a bare molfile.
class FormatError : public Error {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  FormatError(std::size_t line, const std::string &reason,
              std::size_t entry = npos)
      : Error("FormatError", describe(line, reason, entry)), line_(line),
        entry_(entry), reason_(reason) { }

  std::size_t line() const noexcept { return line_; }
  std::size_t entry() const noexcept { return entry_; }
  const std::string &reason() const noexcept { return reason_; }

private:
  static std::string describe(std::size_t line, const std::string &reason,
                              std::size_t entry) {
    std::string out;
    if (entry != npos) {
      out += "entry " + std::to_string(entry) + ", ";
    }
    if (line != 0) {
      out += "line " + std::to_string(line) + ": ";
    }
    return out + reason;
  }

  std::size_t line_;
  std::size_t entry_;
  std::string reason_;
};

class CapacityError : public Error {
public:
  explicit CapacityError(const std::string &what)
      : Error("CapacityError", what) { }
};

class InvalidParameter : public Error {
public:
  explicit InvalidParameter(const std::string &what)
      : Error("InvalidParameter", what) { }
};

class DuplicateId : public Error {
public:
  explicit DuplicateId(const std::string &id)
      : Error("DuplicateId", "duplicate id: " + id) { }
};

class IngestError : public Error {
public:
  IngestError(std::size_t where, const std::string &reason)
      : Error("IngestError", "at " + std::to_string(where) + ": " + reason),
        where_(where), reason_(reason) { }

  // Entry index (SDF) or 1-based line number (TSV).
  std::size_t where() const noexcept { return where_; }
  const std::string &reason() const noexcept { return reason_; }

private:
  std::size_t where_;
  std::string reason_;
};

class UnknownField : public Error {
public:
  explicit UnknownField(const std::string &path)
      : Error("UnknownField", "unknown field: " + path), path_(path) { }
  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

class UnknownOperator : public Error {
public:
  explicit UnknownOperator(const std::string &op)
      : Error("UnknownOperator", "unknown operator: " + op) { }
};

class TypeMismatch : public Error {
public:
  explicit TypeMismatch(const std::string &what)
      : Error("TypeMismatch", what) { }
};

class EmptyTrainingSet : public Error {
public:
  explicit EmptyTrainingSet(const std::string &what)
      : Error("EmptyTrainingSet", what) { }
};

class IoError : public Error {
public:
  explicit IoError(const std::string &what) : Error("IoError", what) { }
};

class TransportError : public Error {
public:
  explicit TransportError(const std::string &what)
      : Error("TransportError", what) { }
};

class ServiceError : public Error {
public:
  ServiceError(int status, std::string body)
      : Error("ServiceError", "HTTP " + std::to_string(status) + ": " + body),
        status_(status), body_(std::move(body)) { }

  int status() const noexcept { return status_; }
  const std::string &body() const noexcept { return body_; }

private:
  int status_;
  std::string body_;
};

}  // namespace chemserve
