#pragma once

namespace elastoshock {

// Defaults shared by all modules; every operation that compares against a
// threshold accepts an override.
struct Tolerances {
  double residual_rel = 1e-10;   // relative residual of solved relations
  double identity_abs = 1e-12;   // algebraic identities (relative to term size)
  double zero_band = 1e-9;       // |margin| below this is Indeterminate
  double positivity = 1e-10;     // smallest eigenvalue threshold for certificates
  double pattern = 1e-12;        // zero-pattern test on deformation entries
  double frame = 1e-12;          // tangential velocity mismatch across the front
};

}  // namespace elastoshock
