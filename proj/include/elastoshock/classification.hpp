#pragma once

#include <cmath>
#include <optional>
#include <string_view>

#include "elastoshock/core_states.hpp"

namespace elastoshock {

enum class StabilityClass {
  UniformlyStable,
  NeutrallyStable,
  ViolentlyUnstable,
  LaxInadmissible,
  Indeterminate,
};

/// Short names used in reports: uniform, neutral, violent, lax_fail, indeterminate.
inline std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::UniformlyStable: return "uniform";
    case StabilityClass::NeutrallyStable: return "neutral";
    case StabilityClass::ViolentlyUnstable: return "violent";
    case StabilityClass::LaxInadmissible: return "lax_fail";
    case StabilityClass::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

/// The two deformation patterns for which the spectral problem is solved in
/// closed form.
enum class DeformationPattern {
  Stretching,    // F12 = F21 = 0
  Antidiagonal,  // F11 = F22 = 0
};

inline std::string_view to_string(DeformationPattern p) {
  return p == DeformationPattern::Stretching ? "stretching" : "antidiagonal";
}

inline bool matches_pattern(const Mat2& F, DeformationPattern which, double tol) {
  const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
  if (which == DeformationPattern::Stretching) {
    return std::abs(F(0, 1)) <= tol * scale && std::abs(F(1, 0)) <= tol * scale;
  }
  return std::abs(F(0, 0)) <= tol * scale && std::abs(F(1, 1)) <= tol * scale;
}

/// Stretching wins when both patterns match (F = 0).
inline std::optional<DeformationPattern> detect_pattern(const Mat2& F, double tol) {
  if (matches_pattern(F, DeformationPattern::Stretching, tol)) return DeformationPattern::Stretching;
  if (matches_pattern(F, DeformationPattern::Antidiagonal, tol)) return DeformationPattern::Antidiagonal;
  return std::nullopt;
}

}  // namespace elastoshock
