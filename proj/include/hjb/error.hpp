#pragma once

#include <stdexcept>
#include <string>

namespace hjb {

enum class ErrorKind {
  InvalidDomain,
  InvalidScale,
  ConditionAViolated,
  DegenerateGrid,
  InvalidParameter,
  CoefficientMismatch,
  Assembly,
  Divergence,
  Formulation,
  FaceFixing,
  ScalingMismatch,
  TransformDomain,
  Normalization,
  Schema,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

} // namespace hjb
