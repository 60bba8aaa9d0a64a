#pragma once

namespace vlab {

// Central tolerance knobs. `algebraic` guards exact identities (projector
// idempotency, trace counts, solved-constant substitution checks);
// `quadrature` guards anything that compares a midpoint-rule sum against a
// closed form.
struct Tolerances {
  double algebraic = 1e-12;
  double quadrature = 1e-6;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tols{};
  return tols;
}

}  // namespace vlab
