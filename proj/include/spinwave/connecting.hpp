#pragma once

// Infeld-van der Waerden connecting objects and spin affinities for flat and
// conformally flat backgrounds.

#include <utility>

#include "spinwave/spinor.hpp"

namespace spinwave {

/// S_a^{AA'} together with its inverse S^a_{AA'}.  Signature (+,-,-,-).
class ConnectingObjects {
 public:
  /// (identity, Pauli x, y, z) / sqrt(2): g_ab = diag(1,-1,-1,-1).
  static ConnectingObjects flat();
  /// flat() scaled by `scale`: g_ab = scale^2 diag(1,-1,-1,-1).
  static ConnectingObjects conformally_flat(double scale);

  /// `to_spinor` has signature (a_, A^, A'^).  Throws degenerate-metric if
  /// the 4x4 map a -> AA' is singular.
  explicit ConnectingObjects(ComponentSpinor to_spinor);

  /// S_a^{AA'}
  const ComponentSpinor& to_spinor() const { return to_spinor_; }
  /// S^a_{AA'}
  const ComponentSpinor& to_world() const { return to_world_; }

  /// g_ab = S_a^{AA'} S_b^{BB'} eps_{AB} eps_{A'B'}
  ComponentSpinor metric() const;

  ComponentSpinor spinor_from_vector(const ComponentSpinor& v) const;     // v^a -> v^{AA'}
  ComponentSpinor vector_from_spinor(const ComponentSpinor& v) const;     // v^{AA'} -> v^a
  ComponentSpinor spinor_from_covector(const ComponentSpinor& w) const;   // w_a -> w_{AA'}
  ComponentSpinor covector_from_spinor(const ComponentSpinor& w) const;   // w_{AA'} -> w_a
  /// T_ab -> T_{AA'BB'} with slots (A, A', B, B').
  ComponentSpinor spinor_from_2tensor(const ComponentSpinor& t) const;
  /// T_{AA'BB'} -> T_ab.
  ComponentSpinor tensor_from_spinor(const ComponentSpinor& t) const;

 private:
  ComponentSpinor to_spinor_;
  ComponentSpinor to_world_;
};

/// Components theta_{aA}^{C}.
class SpinAffinity {
 public:
  SpinAffinity();
  explicit SpinAffinity(ComponentSpinor theta);

  /// theta_{aAC} = sym_low_{aAC} + 1/2 eps_{AC} trace_a
  static SpinAffinity from_parts(const ComponentSpinor& sym_low, const ComponentSpinor& trace);

  const ComponentSpinor& theta() const { return theta_; }
  /// theta_{a(AC)}, slots (a_, A_, C_)
  ComponentSpinor symmetric_lowered() const;
  /// theta_a^{(BC)}, slots (a_, B^, C^)
  ComponentSpinor symmetric_raised() const;
  /// theta_{aB}^{B}, slot (a_)
  ComponentSpinor trace() const;

 private:
  ComponentSpinor theta_;
};

/// Covariant derivative of a weight-zero field phi_A^B written with the full
/// affinity and with its symmetric pieces only.  `phi` has slots (A_, B^),
/// `dphi` has slots (a_, A_, B^).  Returns {full-affinity form, symmetric form}.
/// The two agree when phi_{AB} is symmetric.
std::pair<ComponentSpinor, ComponentSpinor> covariant_derivative_forms(
    const ComponentSpinor& phi, const SpinAffinity& theta, const ComponentSpinor& dphi,
    const MetricSpinorConvention& conv = MetricSpinorConvention::standard());

/// Symmetric spin affinity from the connecting objects and their first
/// derivatives.  `dg` holds d_c g_ab with slots (c_, a_, b_); `dS` holds
/// d_a S^b_{CD'} with slots (a_, b^, C_, D'_).
SpinAffinity affinity_from_metric(const ConnectingObjects& s, const ComponentSpinor& dg,
                                  const ComponentSpinor& dS);

}  // namespace spinwave
