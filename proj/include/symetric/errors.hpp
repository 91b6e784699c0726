#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace symetric {

enum class ErrorKind {
  InvalidDimension,
  InvalidParameter,
  Singularity,
  Domain,
  Numeric,
  Divergence,
  UnsupportedScheme,
  Format,
  Io,
  DataRequirement,
  DegenerateLatent,
  UndefinedVariance,
  ExpansionTooLarge,
};

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the numerics (as opposed to bad input or config).
  bool is_numeric() const noexcept {
    switch (kind_) {
      case ErrorKind::Singularity:
      case ErrorKind::Numeric:
      case ErrorKind::Divergence:
      case ErrorKind::DegenerateLatent:
      case ErrorKind::UndefinedVariance:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

/// Malformed container or map payload; `offset` is the byte offset into `file`.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::uint64_t offset, const std::string& detail)
      : Error(ErrorKind::Format,
              file + " @ byte " + std::to_string(offset) + ": " + detail),
        file_(std::move(file)),
        offset_(offset) {}

  const std::string& file() const noexcept { return file_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::string file_;
  std::uint64_t offset_;
};

}  // namespace symetric
