#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elastoshock {

enum class ErrorKind {
  // invalid input
  InvalidParameters,
  NonHyperbolic,
  OutOfRange,
  Degenerate,
  DegenerateDeformation,
  FrameError,
  PatternMismatch,
  ConvexityRequired,
  AsymmetricInput,
  ConfigError,
  // numerical failure
  NoRealRoot,
  LaxViolated,
  SingularBlock,
  SpectrumNotStable,
  IllConditioned,
  SelectionAmbiguous,
  RankDeficient,
  ScanInconclusive,
  InternalInconsistency,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::NonHyperbolic: return "NonHyperbolic";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::DegenerateDeformation: return "DegenerateDeformation";
    case ErrorKind::FrameError: return "FrameError";
    case ErrorKind::PatternMismatch: return "PatternMismatch";
    case ErrorKind::ConvexityRequired: return "ConvexityRequired";
    case ErrorKind::AsymmetricInput: return "AsymmetricInput";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
    case ErrorKind::LaxViolated: return "LaxViolated";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::SpectrumNotStable: return "SpectrumNotStable";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SelectionAmbiguous: return "SelectionAmbiguous";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ScanInconclusive: return "ScanInconclusive";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

/// True for errors caused by the caller's data rather than by a solver.
inline bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameters:
    case ErrorKind::NonHyperbolic:
    case ErrorKind::OutOfRange:
    case ErrorKind::Degenerate:
    case ErrorKind::DegenerateDeformation:
    case ErrorKind::FrameError:
    case ErrorKind::PatternMismatch:
    case ErrorKind::ConvexityRequired:
    case ErrorKind::AsymmetricInput:
    case ErrorKind::ConfigError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace elastoshock
