#pragma once

// Conformal-time plane-wave modes of (Box + R/3) phi_A^B = 0 on spatially
// flat FRW backgrounds.  Each component of phi_A^B in a constant dyad obeys
//   f'' + 2 (a'/a) f' + (k^2 + 2 a''/a) f = 0,
// equivalently u'' + (k^2 + a''/a) u = 0 for u = a f.

#include <array>
#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace spinwave::frw {

using Complex = std::complex<double>;

enum class ModelKind { Radiation, Matter, DeSitter, Tabulated };

/// a(eta) with its first two derivatives.
class ScaleFactorModel {
 public:
  /// a = a0 eta on eta > 0
  static ScaleFactorModel radiation(double a0);
  /// a = a0 eta^2 on eta > 0
  static ScaleFactorModel matter(double a0);
  /// a = -1 / (H eta) on eta < 0
  static ScaleFactorModel de_sitter(double hubble);
  /// Natural cubic spline through (eta_i, a_i), eta strictly increasing, a > 0,
  /// at least 4 samples.  The spline is C^2; for smooth data a is accurate to
  /// O(h^4), a' to O(h^3) and a'' to O(h^2) away from the end intervals.
  static ScaleFactorModel tabulated(std::vector<double> eta, std::vector<double> a);

  ModelKind kind() const { return kind_; }
  std::string name() const;
  /// True if eta lies in the model's domain (closed for tables, open for
  /// the analytic models).
  bool contains(double eta) const;
  /// Throws domain-error if [lo, hi] is not inside the domain.
  void require_range(double lo, double hi) const;

  double a(double eta) const;
  double da(double eta) const;
  double dda(double eta) const;

 private:
  struct Table;
  ModelKind kind_ = ModelKind::Radiation;
  double param_ = 1.0;
  std::shared_ptr<const Table> table_;

  void require(double eta) const;
};

/// R = 6 a'' / a^3
double ricci_scalar(const ScaleFactorModel& m, double eta);

/// f'' + 2 (a'/a) f' + (k^2 + 2 a''/a) f
Complex mode_residual(const ScaleFactorModel& m, double k, Complex f, Complex df, Complex ddf, double eta);

/// (Box + R/3) psi for psi(eta, x) sampled on a uniform (eta, x) grid with
/// spacing h, by second-order central differences:
///   a^-2 (psi_ee + 2 (a'/a) psi_e - psi_xx + 2 (a''/a) psi).
/// `psi` is row-major with eta slowest; returns the (n_eta - 2) x (n_x - 2)
/// interior values.
std::vector<Complex> wave_operator_1p1(const ScaleFactorModel& m, const std::vector<Complex>& psi, double eta0,
                                       double h, std::size_t n_eta, std::size_t n_x);

struct InitialCondition {
  enum class Kind { PositiveFrequency, Explicit };
  Kind kind = Kind::PositiveFrequency;
  Complex f{};   // explicit data at eta0
  Complex df{};
};

struct Tolerances {
  double rel = 1e-9;
  double abs = 1e-12;
};

struct ModeSpec {
  double k = 1.0;
  double eta0 = 1.0;
  double eta1 = 10.0;
  InitialCondition ic;
  Tolerances tol;
  /// Output points in (eta0, eta1]; eta0 and eta1 are always reported.
  std::vector<double> samples;
  std::size_t max_steps = 10'000'000;
};

struct ModeSolution {
  /// Requested samples; the integrator steps onto each of them exactly.
  std::vector<double> eta;
  std::vector<Complex> f;
  std::vector<Complex> df;
  std::size_t steps = 0;
  std::size_t rejected = 0;

  /// Accepted step nodes (eta, f, f', f'') for dense output.
  std::vector<double> node_eta;
  std::vector<std::array<Complex, 3>> node;

  /// (f, f') anywhere in [eta0, eta1] by cubic Hermite interpolation between
  /// accepted steps.  Throws domain-error outside the range.
  std::pair<Complex, Complex> at(double eta) const;
};

/// f(eta0), f'(eta0) for the ModeSpec's initial condition.  Positive frequency:
/// u = exp(-i k eta0) / sqrt(2k), u' = -i k u, f = u / a.
std::pair<Complex, Complex> initial_data(const ScaleFactorModel& m, const ModeSpec& spec);

/// Dormand-Prince 5(4) with PI step control on (f, f'); steps are shortened
/// to land on every sample.  Throws domain-error for a
/// bad ModeSpec and integration-failure (naming the last good eta) when the step
/// size underflows or max_steps is exceeded.
ModeSolution integrate_mode(const ScaleFactorModel& m, const ModeSpec& spec);

/// max_i |W_i - W_0| / |W_0| with W = u1 u2' - u2 u1', u = a f.  Absolute
/// when W_0 = 0.  Throws grid-error if the samples differ.
double wronskian_drift(const ModeSolution& s1, const ModeSolution& s2, const ScaleFactorModel& m);

/// The conjugate solution (also a solution of the real mode equation).
ModeSolution conjugate(const ModeSolution& s);

struct KGrid {
  double min = 1.0;
  double max = 1.0;
  std::size_t count = 0;
  bool log = false;

  std::vector<double> values() const;
};

struct SpectrumRow {
  double k = 0.0;
  double eta_end = 0.0;
  Complex f{};
  double abs_f2 = 0.0;
  double energy_proxy = 0.0;
  double wronskian_drift = 0.0;
  bool ok = false;
  std::string message;  // failure detail
};

/// One row per k in grid order.  Failed modes are marked and do not stop the
/// others.  energy_proxy = (|f'|^2 + k^2 |f|^2) / (2 pi a^4); the drift is
/// that of the pair (f, conj f).
std::vector<SpectrumRow> spectrum(const ScaleFactorModel& m, const std::vector<double>& ks, double eta0,
                                  double eta_end, const InitialCondition& ic, const Tolerances& tol,
                                  unsigned jobs = 1);

/// `k,eta_end,re_f,im_f,abs_f2,energy_proxy,wronskian_drift,status`
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows);

struct CosmoConfig {
  ScaleFactorModel model = ScaleFactorModel::radiation(1.0);
  KGrid k_grid;
  double eta_start = 1.0;
  double eta_end = 10.0;
  InitialCondition ic;
  Tolerances tol;
};

/// Validates the JSON schema (config-error) and the eta range against the
/// model domain (domain-error).
CosmoConfig parse_cosmo_config(const nlohmann::json& j);

}  // namespace spinwave::frw
