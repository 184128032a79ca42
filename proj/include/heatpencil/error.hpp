#pragma once

#include <stdexcept>
#include <string>

namespace heatpencil {

enum class ErrorCode {
  InvalidArgument,
  Domain,
  Io,
  Parse,
  Quadrature,
  NoModes,
  RankDeficient,
  AmbiguousIndex,
  AlphaUnrecoverable,
  HypothesisViolated,
  CertificateUnavailable,
  Defective,
};

// Every failure in the core is reported as an Error; the C layer maps the
// code onto hp_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace heatpencil
