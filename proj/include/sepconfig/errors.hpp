#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sepconfig {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. Carries a line number when one is known (0 = unknown).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg, std::size_t line = 0)
      : Error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_ = 0;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// Operation mixed configurations or catalogs with different identities.
class CatalogMismatch : public Error {
public:
  using Error::Error;
};

/// A document or model response named separator ids the catalog does not know.
class UnknownSeparator : public Error {
public:
  explicit UnknownSeparator(std::vector<std::string> ids)
      : Error("unknown separator id(s): " + join(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const { return ids_; }

private:
  static std::string join(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
      if (!out.empty()) out += ", ";
      out += id;
    }
    return out;
  }
  std::vector<std::string> ids_;
};

/// A level name outside the catalog's allowed set.
class IllegalLevel : public Error {
public:
  using Error::Error;
};

class EmptyCatalog : public Error {
public:
  using Error::Error;
};

class UnsupportedSection : public Error {
public:
  using Error::Error;
};

class MissingField : public Error {
public:
  using Error::Error;
};

class NoBlockFound : public Error {
public:
  using Error::Error;
};

class NoDescriptions : public Error {
public:
  using Error::Error;
};

class EmptyHistogram : public Error {
public:
  using Error::Error;
};

class KTooLarge : public Error {
public:
  using Error::Error;
};

class MissingResults : public Error {
public:
  using Error::Error;
};

class EmptyPool : public Error {
public:
  using Error::Error;
};

class EmptyList : public Error {
public:
  using Error::Error;
};

class NonPositiveDefaultTime : public Error {
public:
  using Error::Error;
};

class NoCommonUnsolved : public Error {
public:
  using Error::Error;
};

class SolverNotFound : public Error {
public:
  using Error::Error;
};

class LaunchError : public Error {
public:
  using Error::Error;
};

class LogParseError : public Error {
public:
  using Error::Error;
};

class EmptyValidationSet : public Error {
public:
  using Error::Error;
};

class UnknownSeparatorInStats : public Error {
public:
  using Error::Error;
};

class MissingValidationSet : public Error {
public:
  using Error::Error;
};

class SchemaMismatch : public Error {
public:
  using Error::Error;
};

}  // namespace sepconfig
