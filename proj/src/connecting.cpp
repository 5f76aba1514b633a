#include "spinwave/connecting.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace spinwave {
namespace {

constexpr Slot kWorldDown{IndexKind::World, Variance::Down};
constexpr Slot kWorldUp{IndexKind::World, Variance::Up};
constexpr Slot kUnDown{IndexKind::Unprimed, Variance::Down};
constexpr Slot kUnUp{IndexKind::Unprimed, Variance::Up};
constexpr Slot kPrDown{IndexKind::Primed, Variance::Down};
constexpr Slot kPrUp{IndexKind::Primed, Variance::Up};

void require_signature(const ComponentSpinor& s, const IndexSignature& sig, const char* what) {
  if (!(s.signature() == sig)) {
    throw Error(ErrorKind::Index, std::string(what) + " must have signature " + sig.str() +
                                      ", got " + s.signature().str());
  }
}

}  // namespace

ConnectingObjects ConnectingObjects::flat() { return conformally_flat(1.0); }

ConnectingObjects ConnectingObjects::conformally_flat(double scale) {
  const double r = scale / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  ComponentSpinor s(IndexSignature{kWorldDown, kUnUp, kPrUp});
  // identity
  s.at({0, 0, 0}) = r;
  s.at({0, 1, 1}) = r;
  // sigma_x
  s.at({1, 0, 1}) = r;
  s.at({1, 1, 0}) = r;
  // sigma_y
  s.at({2, 0, 1}) = -i * r;
  s.at({2, 1, 0}) = i * r;
  // sigma_z
  s.at({3, 0, 0}) = r;
  s.at({3, 1, 1}) = -r;
  return ConnectingObjects(std::move(s));
}

ConnectingObjects::ConnectingObjects(ComponentSpinor to_spinor) : to_spinor_(std::move(to_spinor)) {
  require_signature(to_spinor_, IndexSignature{kWorldDown, kUnUp, kPrUp}, "S_a^{AA'}");
  Eigen::Matrix4cd m;
  for (int a = 0; a < 4; ++a) {
    for (int p = 0; p < 4; ++p) m(p, a) = to_spinor_.at({a, p / 2, p % 2});
  }
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0 || std::abs(m.determinant()) < 1e-14 * std::pow(scale, 4)) {
    throw Error(ErrorKind::DegenerateMetric, "connecting objects are singular");
  }
  const Eigen::Matrix4cd inv = m.inverse();
  to_world_ = ComponentSpinor(IndexSignature{kWorldUp, kUnDown, kPrDown});
  for (int a = 0; a < 4; ++a) {
    for (int p = 0; p < 4; ++p) to_world_.at({a, p / 2, p % 2}) = inv(a, p);
  }
}

ComponentSpinor ConnectingObjects::metric() const {
  const auto& eps = MetricSpinorConvention::standard().eps_low;
  ComponentSpinor g(IndexSignature{kWorldDown, kWorldDown});
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Complex sum{0.0, 0.0};
      for (int A = 0; A < 2; ++A)
        for (int Ap = 0; Ap < 2; ++Ap)
          for (int B = 0; B < 2; ++B)
            for (int Bp = 0; Bp < 2; ++Bp) {
              const double e = eps[A][B] * eps[Ap][Bp];
              if (e != 0.0) sum += e * to_spinor_.at({a, A, Ap}) * to_spinor_.at({b, B, Bp});
            }
      g.at({a, b}) = sum;
    }
  }
  return g;
}

ComponentSpinor ConnectingObjects::spinor_from_vector(const ComponentSpinor& v) const {
  require_signature(v, IndexSignature{kWorldUp}, "vector");
  return contract(outer(to_spinor_, v), 0, 3);
}

ComponentSpinor ConnectingObjects::vector_from_spinor(const ComponentSpinor& v) const {
  require_signature(v, IndexSignature{kUnUp, kPrUp}, "spinor vector");
  return contract(contract(outer(to_world_, v), 1, 3), 1, 2);
}

ComponentSpinor ConnectingObjects::spinor_from_covector(const ComponentSpinor& w) const {
  require_signature(w, IndexSignature{kWorldDown}, "covector");
  return contract(outer(to_world_, w), 0, 3);
}

ComponentSpinor ConnectingObjects::covector_from_spinor(const ComponentSpinor& w) const {
  require_signature(w, IndexSignature{kUnDown, kPrDown}, "spinor covector");
  return contract(contract(outer(to_spinor_, w), 1, 3), 1, 2);
}

ComponentSpinor ConnectingObjects::spinor_from_2tensor(const ComponentSpinor& t) const {
  require_signature(t, IndexSignature{kWorldDown, kWorldDown}, "2-tensor");
  ComponentSpinor out(IndexSignature{kUnDown, kPrDown, kUnDown, kPrDown});
  for_each_index(out.signature(), [&](std::span<const int> idx) {
    Complex sum{0.0, 0.0};
    for (int a = 0; a < 4; ++a) {
      const Complex sa = to_world_.at({a, idx[0], idx[1]});
      if (sa == Complex{}) continue;
      for (int b = 0; b < 4; ++b) sum += sa * to_world_.at({b, idx[2], idx[3]}) * t.at({a, b});
    }
    out(idx) = sum;
  });
  return out;
}

ComponentSpinor ConnectingObjects::tensor_from_spinor(const ComponentSpinor& t) const {
  require_signature(t, IndexSignature{kUnDown, kPrDown, kUnDown, kPrDown}, "spinor 2-tensor");
  ComponentSpinor out(IndexSignature{kWorldDown, kWorldDown});
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Complex sum{0.0, 0.0};
      for_each_index(t.signature(), [&](std::span<const int> idx) {
        sum += to_spinor_.at({a, idx[0], idx[1]}) * to_spinor_.at({b, idx[2], idx[3]}) * t(idx);
      });
      out.at({a, b}) = sum;
    }
  }
  return out;
}

SpinAffinity::SpinAffinity() : theta_(IndexSignature{kWorldDown, kUnDown, kUnUp}) {}

SpinAffinity::SpinAffinity(ComponentSpinor theta) : theta_(std::move(theta)) {
  require_signature(theta_, IndexSignature{kWorldDown, kUnDown, kUnUp}, "spin affinity");
}

SpinAffinity SpinAffinity::from_parts(const ComponentSpinor& sym_low, const ComponentSpinor& trace) {
  require_signature(sym_low, IndexSignature{kWorldDown, kUnDown, kUnDown}, "symmetric affinity");
  require_signature(trace, IndexSignature{kWorldDown}, "affinity trace");
  const ComponentSpinor eps = epsilon(IndexKind::Unprimed, Variance::Down, Variance::Down);
  // eps_A^A is -2 under the default displacement rule
  const Complex eps_trace = contract(raise_lower(eps, 1, Variance::Up), 0, 1).at({});
  ComponentSpinor low = outer(trace, eps);
  low *= 1.0 / eps_trace;
  low += sym_low;
  return SpinAffinity(raise_lower(low, 2, Variance::Up));
}

ComponentSpinor SpinAffinity::symmetric_lowered() const {
  return symmetrize(raise_lower(theta_, 2, Variance::Down), {1, 2}, SymmetryMode::Symmetric);
}

ComponentSpinor SpinAffinity::symmetric_raised() const {
  return symmetrize(raise_lower(theta_, 1, Variance::Up), {1, 2}, SymmetryMode::Symmetric);
}

ComponentSpinor SpinAffinity::trace() const { return contract(theta_, 1, 2); }

std::pair<ComponentSpinor, ComponentSpinor> covariant_derivative_forms(
    const ComponentSpinor& phi, const SpinAffinity& theta, const ComponentSpinor& dphi,
    const MetricSpinorConvention& conv) {
  require_signature(phi, IndexSignature{kUnDown, kUnUp}, "phi_A^B");
  require_signature(dphi, IndexSignature{kWorldDown, kUnDown, kUnUp}, "d_a phi_A^B");
  const std::size_t swap12[] = {0, 2, 1};

  // d phi - theta_{aA}^C phi_C^B + theta_{aC}^B phi_A^C
  ComponentSpinor full = dphi;
  full -= contract(outer(theta.theta(), phi), 2, 3);
  full += permute(contract(outer(theta.theta(), phi), 1, 4), swap12);

  // d phi - theta_{a(AC)} M^{BD} phi_D^C + theta_a^{(BC)} phi_A^D M_{DC}
  // M^{BD} phi_D^C and phi_A^D M_{DC}
  const auto eps_up = epsilon(IndexKind::Unprimed, Variance::Up, Variance::Up, conv);
  const auto eps_low = epsilon(IndexKind::Unprimed, Variance::Down, Variance::Down, conv);
  const ComponentSpinor m_phi = contract(outer(eps_up, phi), 1, 2);   // (B^, C^)
  const ComponentSpinor phi_m = contract(outer(phi, eps_low), 1, 2);  // (A_, C_)
  const ComponentSpinor theta_low =
      symmetrize(raise_lower(theta.theta(), 2, Variance::Down, conv), {1, 2}, SymmetryMode::Symmetric);
  const ComponentSpinor theta_up =
      symmetrize(raise_lower(theta.theta(), 1, Variance::Up, conv), {1, 2}, SymmetryMode::Symmetric);
  ComponentSpinor sym = dphi;
  sym -= contract(outer(theta_low, m_phi), 2, 4);
  sym += permute(contract(outer(theta_up, phi_m), 2, 4), swap12);
  return {std::move(full), std::move(sym)};
}

SpinAffinity affinity_from_metric(const ConnectingObjects& s, const ComponentSpinor& dg,
                                  const ComponentSpinor& dS) {
  require_signature(dg, IndexSignature{kWorldDown, kWorldDown, kWorldDown}, "d_c g_ab");
  require_signature(dS, IndexSignature{kWorldDown, kWorldUp, kUnDown, kPrDown}, "d_a S^b_{CD'}");
  // S^b_B^{D'} and S_{bB}^{D'}
  const ComponentSpinor s_mixed = raise_lower(s.to_world(), 2, Variance::Up);
  const ComponentSpinor s_low = raise_lower(s.to_spinor(), 1, Variance::Down);
  const ComponentSpinor& s_world = s.to_world();

  ComponentSpinor low(IndexSignature{kWorldDown, kUnDown, kUnDown});
  for_each_index(low.signature(), [&](std::span<const int> idx) {
    const int a = idx[0];
    const int B = idx[1];
    const int C = idx[2];
    Complex sum{0.0, 0.0};
    for (int Dp = 0; Dp < 2; ++Dp) {
      for (int b = 0; b < 4; ++b) {
        for (int c = 0; c < 4; ++c) {
          sum += s_mixed.at({b, B, Dp}) * s_world.at({c, C, Dp}) * dg.at({c, a, b});
        }
        sum += s_low.at({b, B, Dp}) * dS.at({a, b, C, Dp});
      }
    }
    low(idx) = 0.5 * sum;
  });
  const ComponentSpinor sym = symmetrize(low, {1, 2}, SymmetryMode::Symmetric);
  return SpinAffinity(raise_lower(sym, 2, Variance::Up));
}

}  // namespace spinwave
