#include <cmath>

#include "doctest.h"
#include "spinwave/connecting.hpp"
#include "spinwave/random.hpp"

using namespace spinwave;

namespace {

constexpr Slot uD{IndexKind::Unprimed, Variance::Down};
constexpr Slot uU{IndexKind::Unprimed, Variance::Up};
constexpr Slot pD{IndexKind::Primed, Variance::Down};
constexpr Slot pU{IndexKind::Primed, Variance::Up};
constexpr Slot wD{IndexKind::World, Variance::Down};
constexpr Slot wU{IndexKind::World, Variance::Up};

ComponentSpinor vec_up(Complex a, Complex b) {
  return ComponentSpinor(IndexSignature{uU}, {a, b});
}

}  // namespace

TEST_CASE("epsilon algebra is exact") {
  const auto up = epsilon(IndexKind::Unprimed, Variance::Up, Variance::Up);
  const auto low = epsilon(IndexKind::Unprimed, Variance::Down, Variance::Down);
  CHECK(up.at({0, 1}) == Complex(1.0));
  CHECK(low.at({0, 1}) == Complex(1.0));
  // eps^{AB} eps_{CB} = delta^A_C
  const auto delta = contract(outer(up, low), 1, 3);
  CHECK(delta.at({0, 0}) == Complex(1.0));
  CHECK(delta.at({1, 1}) == Complex(1.0));
  CHECK(delta.at({0, 1}) == Complex(0.0));
  CHECK(delta.at({1, 0}) == Complex(0.0));
  // eps^{AB} eps_{AB} = 2
  const auto two = contract(contract(outer(up, low), 0, 2), 0, 1);
  CHECK(two.at({}) == Complex(2.0));
  // raising both slots of eps_{AB}
  const auto raised = raise_lower(raise_lower(low, 0, Variance::Up), 1, Variance::Up);
  CHECK(max_abs_diff(raised, up) == 0.0);
  CHECK(MetricSpinorConvention::standard().consistent());
}

TEST_CASE("contract") {
  SUBCASE("zeta^A zeta_A vanishes") {
    const auto zeta = vec_up(1.0, Complex(0.0, 1.0));
    const auto lowered = raise_lower(zeta, 0, Variance::Down);
    CHECK(std::abs(contract(outer(zeta, lowered), 0, 1).at({})) == 0.0);
  }
  SUBCASE("symmetric times antisymmetric") {
    Rng rng(7);
    const auto phi = random_symmetric_pair(rng);
    const auto eps_up = epsilon(IndexKind::Unprimed, Variance::Up, Variance::Up);
    const auto s = contract(contract(outer(phi, eps_up), 0, 2), 0, 1);
    CHECK(std::abs(s.at({})) < 1e-15);
  }
  SUBCASE("kind or variance mismatch") {
    const ComponentSpinor x(IndexSignature{uD, pU});
    CHECK_THROWS_AS(contract(x, 0, 1), Error);
    const ComponentSpinor y(IndexSignature{uD, uD});
    try {
      contract(y, 0, 1);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Contract);
    }
  }
}

TEST_CASE("raise_lower") {
  const auto zeta = vec_up(3.0, Complex(2.0, -1.0));
  const auto round = raise_lower(raise_lower(zeta, 0, Variance::Down), 0, Variance::Up);
  CHECK(max_abs_diff(round, zeta) == 0.0);

  // zeta_A = eps_{AB} zeta^B: (1,0) -> (0,-1)
  const auto low = raise_lower(vec_up(1.0, 0.0), 0, Variance::Down);
  CHECK(low.at({0}) == Complex(0.0));
  CHECK(low.at({1}) == Complex(-1.0));
  // the other displacement side gives (0,1)
  MetricSpinorConvention penrose;
  penrose.displacement = Displacement::RaiseSecondLowerFirst;
  CHECK(penrose.consistent());
  const auto low_p = raise_lower(vec_up(1.0, 0.0), 0, Variance::Down, penrose);
  CHECK(low_p.at({1}) == Complex(1.0));

  CHECK_THROWS_AS(raise_lower(zeta, 0, Variance::Up), Error);
  const ComponentSpinor w(IndexSignature{wD});
  CHECK_THROWS_AS(raise_lower(w, 0, Variance::Up), Error);
}

TEST_CASE("symmetrize") {
  Rng rng(11);
  SUBCASE("antisymmetrizing three spinor slots gives zero") {
    const auto t = random_spinor(IndexSignature{uD, uD, uD, pU}, rng);
    CHECK(max_abs(symmetrize(t, {0, 1, 2}, SymmetryMode::Antisymmetric)) < 1e-15);
  }
  SUBCASE("idempotent projector") {
    const auto t = random_spinor(IndexSignature{uD, uD, uD}, rng);
    const auto once = symmetrize(t, {0, 1, 2}, SymmetryMode::Symmetric);
    const auto twice = symmetrize(once, {0, 1, 2}, SymmetryMode::Symmetric);
    CHECK(max_abs_diff(once, twice) <= 1e-14 * max_abs(once));
    const auto alpha = random_spinor(IndexSignature{uD}, rng);
    const auto beta = random_spinor(IndexSignature{uD}, rng);
    const auto sym = symmetrize(outer(alpha, beta), {0, 1}, SymmetryMode::Symmetric);
    CHECK(max_abs_diff(symmetrize(sym, {0, 1}, SymmetryMode::Symmetric), sym) < 1e-15);
  }
  SUBCASE("pair decomposition theta_AB = theta_(AB) + 1/2 eps_AB theta^C_C") {
    for (int draw = 0; draw < 100; ++draw) {
      const auto theta = random_spinor(IndexSignature{uD, uD}, rng);
      const auto trace = contract(raise_lower(theta, 0, Variance::Up), 0, 1);
      auto rebuilt = symmetrize(theta, {0, 1}, SymmetryMode::Symmetric);
      rebuilt += (0.5 * trace.at({})) * epsilon(IndexKind::Unprimed, Variance::Down, Variance::Down);
      REQUIRE(max_abs_diff(rebuilt, theta) < 1e-14);
    }
  }
  SUBCASE("theta_C^C form of the decomposition needs the other displacement side") {
    MetricSpinorConvention penrose;
    penrose.displacement = Displacement::RaiseSecondLowerFirst;
    const auto theta = random_spinor(IndexSignature{uD, uD}, rng);
    const auto eps = epsilon(IndexKind::Unprimed, Variance::Down, Variance::Down);
    const auto sym = symmetrize(theta, {0, 1}, SymmetryMode::Symmetric);
    auto literal = sym;
    literal += (0.5 * contract(raise_lower(theta, 1, Variance::Up, penrose), 0, 1).at({})) * eps;
    CHECK(max_abs_diff(literal, theta) < 1e-14);
    auto wrong_side = sym;
    wrong_side += (0.5 * contract(raise_lower(theta, 1, Variance::Up), 0, 1).at({})) * eps;
    CHECK(max_abs_diff(wrong_side, theta) > 1e-3);
  }
  SUBCASE("heterogeneous slots") {
    const ComponentSpinor t(IndexSignature{uD, uU});
    CHECK_THROWS_AS(symmetrize(t, {0, 1}, SymmetryMode::Symmetric), Error);
  }
}

TEST_CASE("conjugation") {
  Rng rng(3);
  const auto s = random_spinor(IndexSignature{uD, pU, wD}, rng);
  const auto c = conjugate(s);
  CHECK(c.signature()[0].kind == IndexKind::Primed);
  CHECK(c.signature()[1].kind == IndexKind::Unprimed);
  CHECK(max_abs_diff(conjugate(c), s) == 0.0);
  // commutes with contraction
  const auto t = random_spinor(IndexSignature{uD, uU, pD}, rng);
  CHECK(max_abs_diff(conjugate(contract(t, 0, 1)), contract(conjugate(t), 0, 1)) < 1e-15);
}

TEST_CASE("connecting objects") {
  for (double scale : {1.0, 2.5}) {
    const auto s = ConnectingObjects::conformally_flat(scale);
    const auto g = s.metric();
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const double expect = a != b ? 0.0 : (a == 0 ? 1.0 : -1.0) * scale * scale;
        CHECK(std::abs(g.at({a, b}) - expect) < 1e-12);
      }
    }
    Rng rng(5);
    const auto v = random_real(IndexSignature{wU}, rng);
    CHECK(max_abs_diff(s.vector_from_spinor(s.spinor_from_vector(v)), v) < 1e-12);
    const auto w = random_real(IndexSignature{wD}, rng);
    CHECK(max_abs_diff(s.covector_from_spinor(s.spinor_from_covector(w)), w) < 1e-12);
    const auto f = random_bivector(rng);
    CHECK(max_abs_diff(s.tensor_from_spinor(s.spinor_from_2tensor(f)), f) < 1e-12);
  }
  ComponentSpinor singular(IndexSignature{wD, uU, pU});
  singular.at({0, 0, 0}) = 1.0;
  try {
    ConnectingObjects bad(singular);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMetric);
  }
}

namespace {

/// phi_A^B from a random symmetric phi_{AB}
ComponentSpinor random_mixed_photon(Rng& rng) {
  return raise_lower(random_symmetric_pair(rng), 1, Variance::Up);
}

}  // namespace

TEST_CASE("covariant derivative index displacement") {
  Rng rng(2024);
  const IndexSignature phi_sig{uD, uU};
  const IndexSignature dphi_sig{wD, uD, uU};
  const IndexSignature theta_sig{wD, uD, uU};

  SUBCASE("zero affinity") {
    const auto phi = random_spinor(phi_sig, rng);
    const auto dphi = random_spinor(dphi_sig, rng);
    const auto [full, sym] = covariant_derivative_forms(phi, SpinAffinity(), dphi);
    CHECK(max_abs_diff(full, dphi) == 0.0);
    CHECK(max_abs_diff(sym, dphi) == 0.0);
  }
  SUBCASE("random draws agree") {
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
      const SpinAffinity theta(random_spinor(theta_sig, rng));
      const auto [full, sym] =
          covariant_derivative_forms(random_mixed_photon(rng), theta, random_spinor(dphi_sig, rng));
      worst = std::max(worst, max_abs_diff(full, sym));
    }
    CHECK(worst < 1e-12);
  }
  SUBCASE("pure trace drops out") {
    const ComponentSpinor zero_sym(IndexSignature{wD, uD, uD});
    const auto trace = random_spinor(IndexSignature{wD}, rng);
    const auto theta = SpinAffinity::from_parts(zero_sym, trace);
    CHECK(max_abs_diff(theta.trace(), trace) < 1e-15);
    const auto dphi = random_spinor(dphi_sig, rng);
    const auto [full, sym] = covariant_derivative_forms(random_spinor(phi_sig, rng), theta, dphi);
    CHECK(max_abs_diff(full, dphi) < 1e-15);
    CHECK(max_abs_diff(sym, dphi) < 1e-15);
  }
  SUBCASE("the other displacement side breaks the equivalence") {
    MetricSpinorConvention penrose;
    penrose.displacement = Displacement::RaiseSecondLowerFirst;
    const SpinAffinity theta(random_spinor(theta_sig, rng));
    const auto phi = random_mixed_photon(rng);
    const auto dphi = random_spinor(dphi_sig, rng);
    const auto [full, sym] = covariant_derivative_forms(phi, theta, dphi);
    const auto [full_p, sym_p] = covariant_derivative_forms(phi, theta, dphi, penrose);
    CHECK(max_abs_diff(full, full_p) < 1e-15);
    CHECK(max_abs_diff(full_p, sym_p) > 1e-3);
  }
  SUBCASE("split is exact") {
    const SpinAffinity theta(random_spinor(theta_sig, rng));
    const auto rebuilt = SpinAffinity::from_parts(theta.symmetric_lowered(), theta.trace());
    CHECK(max_abs_diff(rebuilt.theta(), theta.theta()) < 1e-15);
  }
  SUBCASE("signature mismatch") {
    CHECK_THROWS_AS(covariant_derivative_forms(random_spinor(IndexSignature{uD, uD}, rng),
                                               SpinAffinity(), random_spinor(dphi_sig, rng)),
                    Error);
  }
}

namespace {

double scale_factor(double eta) { return 1.0 + 0.3 * eta * eta; }

/// max |nabla_c S_a^{AA'}| at eta0 using central differences of step h for
/// every derivative, the Levi-Civita connection of g and the affinity
/// returned by affinity_from_metric.
double compatibility_defect(double eta0, double h) {
  const auto s0 = ConnectingObjects::conformally_flat(scale_factor(eta0));
  const auto sp = ConnectingObjects::conformally_flat(scale_factor(eta0 + h));
  const auto sm = ConnectingObjects::conformally_flat(scale_factor(eta0 - h));
  ComponentSpinor dg(IndexSignature{wD, wD, wD});
  ComponentSpinor ds(IndexSignature{wD, wU, uD, pD});
  ComponentSpinor ds_up(IndexSignature{wD, wD, uU, pU});
  const auto gp = sp.metric();
  const auto gm = sm.metric();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) dg.at({0, a, b}) = (gp.at({a, b}) - gm.at({a, b})) / (2 * h);
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) {
        ds.at({0, b, c, d}) = (sp.to_world().at({b, c, d}) - sm.to_world().at({b, c, d})) / (2 * h);
        ds_up.at({0, b, c, d}) = (sp.to_spinor().at({b, c, d}) - sm.to_spinor().at({b, c, d})) / (2 * h);
      }
  const auto theta = affinity_from_metric(s0, dg, ds);

  const auto g0 = s0.metric();
  double ginv[4] = {};
  for (int a = 0; a < 4; ++a) ginv[a] = 1.0 / g0.at({a, a}).real();
  double worst = 0.0;
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int x = 0; x < 2; ++x)
        for (int xp = 0; xp < 2; ++xp) {
          Complex v = ds_up.at({c, a, x, xp});
          for (int d = 0; d < 4; ++d) {
            const double christoffel =
                0.5 * ginv[d] * (dg.at({c, d, a}) + dg.at({a, d, c}) - dg.at({d, c, a})).real();
            v -= christoffel * s0.to_spinor().at({d, x, xp});
          }
          for (int b = 0; b < 2; ++b) {
            v += theta.theta().at({c, b, x}) * s0.to_spinor().at({a, b, xp});
            v += std::conj(theta.theta().at({c, b, xp})) * s0.to_spinor().at({a, x, b});
          }
          worst = std::max(worst, std::abs(v));
        }
  return worst;
}

}  // namespace

TEST_CASE("affinity_from_metric") {
  SUBCASE("flat constant connecting objects") {
    const auto s = ConnectingObjects::flat();
    const ComponentSpinor dg(IndexSignature{wD, wD, wD});
    const ComponentSpinor ds(IndexSignature{wD, wU, uD, pD});
    CHECK(max_abs(affinity_from_metric(s, dg, ds).theta()) == 0.0);
  }
  SUBCASE("symmetric in BC") {
    const double h = 1e-3;
    const double eta0 = 0.7;
    Rng rng(9);
    const auto s = ConnectingObjects::conformally_flat(scale_factor(eta0));
    const auto theta = affinity_from_metric(s, random_real(IndexSignature{wD, wD, wD}, rng),
                                            random_spinor(IndexSignature{wD, wU, uD, pD}, rng));
    const auto low = raise_lower(theta.theta(), 2, Variance::Down);
    CHECK(max_abs_diff(low, symmetrize(low, {1, 2}, SymmetryMode::Symmetric)) < 1e-12);
    (void)h;
  }
  SUBCASE("conformally flat: compatible with the metric to second order") {
    const double coarse = compatibility_defect(0.7, 1e-2);
    const double fine = compatibility_defect(0.7, 5e-3);
    CHECK(coarse < 1e-4);
    const double order = std::log2(coarse / fine);
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
  }
}
