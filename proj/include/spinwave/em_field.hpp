#pragma once

// Maxwell bivectors, their spinor wave functions, massless field-equation
// residuals and the energy-momentum tensor on flat backgrounds.

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "spinwave/connecting.hpp"
#include "spinwave/spinor.hpp"

namespace spinwave::em {

/// (t, x, y, z)
using Point = std::array<double, 4>;

/// phi_{AB} with slots (A_, B_) and phi_{A'B'} with slots (A'_, B'_).
struct PhotonWaveFunction {
  ComponentSpinor phi;
  ComponentSpinor phibar;
};

/// Uniform grid: n[i] samples along coordinate i from origin[i] with spacing
/// h, stored row-major with t slowest.
struct Grid {
  Point origin{};
  double h = 1.0;
  std::array<std::size_t, 4> n{1, 1, 1, 1};

  std::size_t size() const { return n[0] * n[1] * n[2] * n[3]; }
  std::array<std::size_t, 4> coords(std::size_t i) const;
  std::size_t index(const std::array<std::size_t, 4>& c) const;
  Point point(std::size_t i) const;
  /// The grid without its boundary layer.  Throws grid-error if an axis has
  /// fewer than 3 samples.
  Grid interior() const;
};

/// One value per grid sample.
struct SampledField {
  Grid grid;
  std::vector<ComponentSpinor> values;
};

/// Closed-form field with exact first derivatives.  `gradient` prepends a
/// world-down slot: d_a of the value.
struct AnalyticField {
  std::function<ComponentSpinor(const Point&)> value;
  std::function<ComponentSpinor(const Point&)> gradient;
};

/// Throws bivector-error unless F has slots (a_, b_) and F_ab = -F_ba exactly.
void require_bivector(const ComponentSpinor& f);

/// phi_{AB} = 1/2 F_{AA'BB'} eps^{A'B'}, phibar_{A'B'} = 1/2 F_{AA'BB'} eps^{AB}.
PhotonWaveFunction spinors_from_bivector(const ComponentSpinor& f,
                                         const ConnectingObjects& s = ConnectingObjects::flat());

/// F_{AA'BB'} = eps_{A'B'} phi_{AB} + eps_{AB} phibar_{A'B'} in world form.
/// Throws spinor-error if either part is not symmetric.
ComponentSpinor bivector_from_spinors(const ComponentSpinor& phi, const ComponentSpinor& phibar,
                                      const ConnectingObjects& s = ConnectingObjects::flat());

/// (*F)_ab = 1/2 e_abcd F^cd with e_0123 = -1 and eta = diag(1,-1,-1,-1).
/// With this orientation cos(t) F + sin(t) *F has phi -> exp(-i t) phi.
ComponentSpinor hodge_dual(const ComponentSpinor& f);
ComponentSpinor duality_rotation(const ComponentSpinor& f, double angle);

/// (F_ab F^ab, F_ab (*F)^ab) on the flat metric.  Real parts.
std::pair<double, double> invariants(const ComponentSpinor& f);

/// T_ab from T_{AA'BB'} = phi_{AB} phibar_{A'B'} / (2 pi).
ComponentSpinor stress_energy(const ComponentSpinor& phi, const ComponentSpinor& phibar,
                              const ConnectingObjects& s = ConnectingObjects::flat());

/// g^ab T_ab on the flat metric.
Complex flat_trace(const ComponentSpinor& t);

/// F_ab = d_a Phi_b - d_b Phi_a for a potential with slots (a_).
ComponentSpinor field_from_potential(const AnalyticField& potential, const Point& x);
/// Central differences on the interior of the grid; the result lives on
/// grid.interior().  Throws grid-error for grids too small for the stencil.
SampledField field_from_potential(const SampledField& potential, unsigned jobs = 1);

/// nabla^{AB'} phi_A^B from d_a phi_{AB} (slots a_, A_, B_); result slots (B'^, B^).
ComponentSpinor massless_divergence(const ComponentSpinor& dphi,
                                    const ConnectingObjects& s = ConnectingObjects::flat());

/// max |nabla^{AB'} phi_A^B| over the given points, exact derivatives.
double massless_residual(const AnalyticField& phi, std::span<const Point> points);
/// max over interior samples with central differences.
double massless_residual(const SampledField& phi, unsigned jobs = 1);

/// k_a with k_{AA'} = alpha_A conj(alpha)_{A'}; alpha has slots (A_).
ComponentSpinor null_wave_vector(const ComponentSpinor& alpha,
                                 const ConnectingObjects& s = ConnectingObjects::flat());
/// phi_{AB} = amplitude alpha_A alpha_B exp(-i k_a x^a) for a real covector k.
AnalyticField plane_wave(const ComponentSpinor& alpha, const ComponentSpinor& k, Complex amplitude = 1.0);

/// Pure-gauge potential Phi_a = d_a chi given d_a chi and d_a d_b chi.
AnalyticField pure_gauge(std::function<std::array<double, 4>(const Point&)> gradient,
                         std::function<std::array<std::array<double, 4>, 4>(const Point&)> hessian);

SampledField sample(const std::function<ComponentSpinor(const Point&)>& f, const Grid& grid, unsigned jobs = 1);

/// `t,x,y,z,re_phi00,im_phi00,re_phi01,im_phi01,re_phi11,im_phi11`
void write_field_csv(std::ostream& out, const SampledField& phi);
/// Reads the format above back onto a uniform grid.  Throws config-error on a
/// malformed header or row and grid-error if the samples do not form a grid.
SampledField read_field_csv(std::istream& in);
/// `t,x,y,z,F01,F02,F03,F12,F13,F23` (real parts)
void write_bivector_csv(std::ostream& out, const SampledField& f);

}  // namespace spinwave::em
