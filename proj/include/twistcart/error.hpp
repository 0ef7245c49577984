#pragma once

#include <stdexcept>
#include <string>

namespace twistcart {

enum class ErrorKind {
  Parse,
  DimensionMismatch,
  NotContained,
  InvalidComplex,
  InvalidModel,
  InvalidContraction,
  NotClosed,
  UnstableWindow,
  WindowTooSmall,
  NotGC,
  NotTransverse,
  NotIsotropic,
  InvalidTriple,
  NotCommuting,
  NotPositive,
  NotConstantModel,
  GridTooSmall,
  NotPositiveAtCenter,
  BallOutOfRange,
  ZeroWeight,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotContained: return "NotContained";
    case ErrorKind::InvalidComplex: return "InvalidComplex";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidContraction: return "InvalidContraction";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::UnstableWindow: return "UnstableWindow";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::NotGC: return "NotGC";
    case ErrorKind::NotTransverse: return "NotTransverse";
    case ErrorKind::NotIsotropic: return "NotIsotropic";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotConstantModel: return "NotConstantModel";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::NotPositiveAtCenter: return "NotPositiveAtCenter";
    case ErrorKind::BallOutOfRange: return "BallOutOfRange";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace twistcart
