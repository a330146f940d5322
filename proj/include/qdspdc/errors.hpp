#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdspdc {

enum class ErrorKind { kValidation, kIo, kFit };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::kValidation, what) {}
};

// Raised when a filter transmits (almost) nothing of the photon.
class PhotonRejected : public ValidationError {
 public:
  explicit PhotonRejected(const std::string& what) : ValidationError(what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::int64_t byte_offset = -1)
      : Error(ErrorKind::kIo, byte_offset >= 0 ? what + " (at byte " + std::to_string(byte_offset) + ")" : what),
        offset_(byte_offset) {}
  std::int64_t byte_offset() const { return offset_; }

 private:
  std::int64_t offset_;
};

class FitError : public Error {
 public:
  FitError(const std::string& what, double residual)
      : Error(ErrorKind::kFit, what + " (chi2/ndf = " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace qdspdc
