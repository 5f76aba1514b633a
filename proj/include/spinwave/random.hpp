#pragma once

#include <cstdint>
#include <random>

#include "spinwave/spinor.hpp"

namespace spinwave {

using Rng = std::mt19937_64;

inline Complex random_complex(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng);
  const double im = u(rng);
  return {re, im};
}

/// Unit-scale random components for the given signature.
inline ComponentSpinor random_spinor(const IndexSignature& sig, Rng& rng) {
  ComponentSpinor out(sig);
  for (auto& v : out.data()) v = random_complex(rng);
  return out;
}

/// Random real components (imaginary parts zero).
inline ComponentSpinor random_real(const IndexSignature& sig, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComponentSpinor out(sig);
  for (auto& v : out.data()) v = {u(rng), 0.0};
  return out;
}

/// Random phi_{AB} with phi_{AB} = phi_{BA}.
inline ComponentSpinor random_symmetric_pair(Rng& rng) {
  const IndexSignature sig{{IndexKind::Unprimed, Variance::Down}, {IndexKind::Unprimed, Variance::Down}};
  return symmetrize(random_spinor(sig, rng), {0, 1}, SymmetryMode::Symmetric);
}

/// Random real antisymmetric F_ab.
inline ComponentSpinor random_bivector(Rng& rng) {
  const IndexSignature sig{{IndexKind::World, Variance::Down}, {IndexKind::World, Variance::Down}};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComponentSpinor f(sig);
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const double v = u(rng);
      f.at({a, b}) = v;
      f.at({b, a}) = -v;
    }
  }
  return f;
}

}  // namespace spinwave
