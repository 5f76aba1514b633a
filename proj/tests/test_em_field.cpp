#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "spinwave/em_field.hpp"
#include "spinwave/random.hpp"

using namespace spinwave;
using namespace spinwave::em;

namespace {

constexpr Slot kWorldDown{IndexKind::World, Variance::Down};
constexpr Slot kUnDown{IndexKind::Unprimed, Variance::Down};
constexpr Slot kPrDown{IndexKind::Primed, Variance::Down};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Config;
}

ComponentSpinor bivector_zero() { return ComponentSpinor(IndexSignature{kWorldDown, kWorldDown}); }

ComponentSpinor spinor_alpha(Complex a0, Complex a1) {
  ComponentSpinor a(IndexSignature{kUnDown});
  a.at({0}) = a0;
  a.at({1}) = a1;
  return a;
}

/// Hand expansion of F_ab = s_a^{AA'} s_b^{BB'} (eps_{A'B'} phi_AB + eps_AB conj(phi)_{A'B'})
/// with s_a = (1, sigma_x, sigma_y, sigma_z)/sqrt2 and eps_01 = 1.
ComponentSpinor bivector_oracle(const Complex phi[2][2]) {
  const Complex i{0.0, 1.0};
  const Complex sigma[4][2][2] = {{{1, 0}, {0, 1}}, {{0, 1}, {1, 0}}, {{0, -i}, {i, 0}}, {{1, 0}, {0, -1}}};
  const double eps[2][2] = {{0, 1}, {-1, 0}};
  ComponentSpinor f = bivector_zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Complex sum{};
      for (int A = 0; A < 2; ++A) {
        for (int Ap = 0; Ap < 2; ++Ap) {
          for (int B = 0; B < 2; ++B) {
            for (int Bp = 0; Bp < 2; ++Bp) {
              const Complex fs = eps[Ap][Bp] * phi[A][B] + eps[A][B] * std::conj(phi[Ap][Bp]);
              sum += sigma[a][A][Ap] * sigma[b][B][Bp] * fs / 2.0;
            }
          }
        }
      }
      f.at({a, b}) = sum;
    }
  }
  return f;
}

std::vector<Point> sample_points() {
  return {{0.0, 0.0, 0.0, 0.0}, {0.3, -1.2, 2.5, 0.7}, {5.0, 1.0, -3.0, 2.0}, {-2.2, 0.4, 0.9, -1.6}};
}

}  // namespace

TEST_CASE("spinors_from_bivector and back") {
  CHECK(max_abs(spinors_from_bivector(bivector_zero()).phi) == 0.0);

  Rng rng(42);
  double worst = 0.0;
  double worst_conj = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const ComponentSpinor f = random_bivector(rng);
    const PhotonWaveFunction p = spinors_from_bivector(f);
    CHECK(p.phi.at({0, 1}) == p.phi.at({1, 0}));
    worst = std::max(worst, max_abs_diff(bivector_from_spinors(p.phi, p.phibar), f));
    worst_conj = std::max(worst_conj, max_abs_diff(p.phibar, conjugate(p.phi)));
  }
  CHECK(worst < 1e-12);
  CHECK(worst_conj < 1e-15);

  // spinor -> bivector -> spinor on arbitrary symmetric pairs, not only real F
  for (int draw = 0; draw < 100; ++draw) {
    const ComponentSpinor phi = random_symmetric_pair(rng);
    const ComponentSpinor phibar = conjugate(random_symmetric_pair(rng));
    const PhotonWaveFunction back = spinors_from_bivector(bivector_from_spinors(phi, phibar));
    CHECK(max_abs_diff(back.phi, phi) < 1e-12);
    CHECK(max_abs_diff(back.phibar, phibar) < 1e-12);
  }
}

TEST_CASE("bivector_from_spinors: component expansion") {
  ComponentSpinor phi(IndexSignature{kUnDown, kUnDown});
  phi.at({0, 0}) = 1.0;
  const ComponentSpinor f = bivector_from_spinors(phi, conjugate(phi));
  const Complex raw[2][2] = {{1.0, 0.0}, {0.0, 0.0}};
  CHECK(max_abs_diff(f, bivector_oracle(raw)) < 1e-15);

  Eigen::Matrix4d m;
  double imag = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      m(a, b) = f.at({a, b}).real();
      imag = std::max(imag, std::abs(f.at({a, b}).imag()));
      CHECK(f.at({a, b}) == -f.at({b, a}));
    }
  }
  CHECK(imag < 1e-15);
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  lu.setThreshold(1e-12);
  CHECK(lu.rank() == 2);

  Rng rng(5);
  for (int draw = 0; draw < 20; ++draw) {
    const ComponentSpinor p = random_symmetric_pair(rng);
    const Complex c[2][2] = {{p.at({0, 0}), p.at({0, 1})}, {p.at({1, 0}), p.at({1, 1})}};
    CHECK(max_abs_diff(bivector_from_spinors(p, conjugate(p)), bivector_oracle(c)) < 1e-14);
  }

  const ComponentSpinor zero(IndexSignature{kUnDown, kUnDown});
  CHECK(max_abs(bivector_from_spinors(zero, conjugate(zero))) == 0.0);

  // linearity
  const ComponentSpinor p1 = random_symmetric_pair(rng);
  const ComponentSpinor p2 = random_symmetric_pair(rng);
  const ComponentSpinor sum = bivector_from_spinors(p1 + p2, conjugate(p1 + p2));
  CHECK(max_abs_diff(sum, bivector_from_spinors(p1, conjugate(p1)) + bivector_from_spinors(p2, conjugate(p2))) <
        1e-15);
}

TEST_CASE("em-field input validation") {
  Rng rng(9);
  ComponentSpinor f = random_bivector(rng);
  f.at({0, 1}) += 1e-9;
  CHECK(kind_of([&] { spinors_from_bivector(f); }) == ErrorKind::Bivector);
  CHECK(kind_of([&] { spinors_from_bivector(ComponentSpinor(IndexSignature{kWorldDown})); }) == ErrorKind::Bivector);

  ComponentSpinor phi = random_symmetric_pair(rng);
  phi.at({0, 1}) += 0.5;
  CHECK(kind_of([&] { bivector_from_spinors(phi, conjugate(random_symmetric_pair(rng))); }) == ErrorKind::Spinor);
  CHECK(kind_of([&] { bivector_from_spinors(random_symmetric_pair(rng), random_symmetric_pair(rng)); }) ==
        ErrorKind::Spinor);
}

TEST_CASE("duality rotation is a phase on phi") {
  Rng rng(17);
  for (int draw = 0; draw < 20; ++draw) {
    const ComponentSpinor f = random_bivector(rng);
    const ComponentSpinor phi = spinors_from_bivector(f).phi;
    const ComponentSpinor quarter = spinors_from_bivector(duality_rotation(f, std::numbers::pi / 2)).phi;
    CHECK(max_abs_diff(quarter, Complex{0.0, -1.0} * phi) < 1e-14);
    const double angle = 0.37 * (draw + 1);
    const ComponentSpinor rotated = spinors_from_bivector(duality_rotation(f, angle)).phi;
    CHECK(max_abs_diff(rotated, std::exp(Complex{0.0, -angle}) * phi) < 1e-14);
    // ** = -1 on bivectors in Lorentzian signature
    CHECK(max_abs_diff(hodge_dual(hodge_dual(f)), Complex(-1.0) * f) < 1e-15);
  }
}

TEST_CASE("invariants") {
  ComponentSpinor e = bivector_zero();
  e.at({0, 1}) = 1.0;
  e.at({1, 0}) = -1.0;
  const auto [ff, fd] = invariants(e);
  CHECK(ff == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(std::abs(fd) < 1e-15);

  const auto [z1, z2] = invariants(bivector_zero());
  CHECK(z1 == 0.0);
  CHECK(z2 == 0.0);

  const ComponentSpinor alpha = spinor_alpha({0.6, 0.2}, {-0.3, 0.9});
  const AnalyticField wave = plane_wave(alpha, null_wave_vector(alpha));
  for (const Point& x : sample_points()) {
    const ComponentSpinor phi = wave.value(x);
    const auto [a, b] = invariants(bivector_from_spinors(phi, conjugate(phi)));
    CHECK(std::abs(a) < 1e-12);
    CHECK(std::abs(b) < 1e-12);
  }

  // non-null phi has nonzero invariants
  Rng rng(4);
  const ComponentSpinor phi = random_symmetric_pair(rng);
  const auto [a, b] = invariants(bivector_from_spinors(phi, conjugate(phi)));
  CHECK(std::hypot(a, b) > 1e-3);
}

TEST_CASE("stress_energy") {
  Rng rng(2024);
  double worst_trace = 0.0;
  double worst_asym = 0.0;
  double min_energy = 1.0;
  for (int draw = 0; draw < 100; ++draw) {
    const ComponentSpinor phi = random_symmetric_pair(rng);
    const ComponentSpinor t = stress_energy(phi, conjugate(phi));
    worst_trace = std::max(worst_trace, std::abs(flat_trace(t)));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) worst_asym = std::max(worst_asym, std::abs(t.at({a, b}) - t.at({b, a})));
    }
    min_energy = std::min(min_energy, t.at({0, 0}).real());
  }
  CHECK(worst_trace < 1e-12);
  CHECK(worst_asym < 1e-15);
  CHECK(min_energy >= 0.0);

  const ComponentSpinor zero(IndexSignature{kUnDown, kUnDown});
  CHECK(max_abs(stress_energy(zero, conjugate(zero))) == 0.0);

  // T_00 = |phi|^2 / (4 pi) summed over components with the flat dyad
  const ComponentSpinor phi = random_symmetric_pair(rng);
  double norm = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) norm += std::norm(phi.at({a, b}));
  }
  CHECK(stress_energy(phi, conjugate(phi)).at({0, 0}).real() ==
        doctest::Approx(norm / (4.0 * std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("field_from_potential: analytic") {
  // Phi = (0, sin(t - x), 0, 0): F_01 = cos(t - x), F_10 = -cos(t - x)
  AnalyticField wave;
  wave.value = [](const Point& x) {
    ComponentSpinor v(IndexSignature{kWorldDown});
    v.at({1}) = std::sin(x[0] - x[1]);
    return v;
  };
  wave.gradient = [](const Point& x) {
    ComponentSpinor g = bivector_zero();
    g.at({0, 1}) = std::cos(x[0] - x[1]);
    g.at({1, 1}) = -std::cos(x[0] - x[1]);
    return g;
  };
  for (const Point& x : sample_points()) {
    const ComponentSpinor f = field_from_potential(wave, x);
    ComponentSpinor hand = bivector_zero();
    hand.at({0, 1}) = std::cos(x[0] - x[1]);
    hand.at({1, 0}) = -std::cos(x[0] - x[1]);
    CHECK(max_abs_diff(f, hand) < 1e-12);
  }

  // pure gauge chi = sin(t) cos(y) + x z
  const AnalyticField gauge = pure_gauge(
      [](const Point& x) {
        return std::array<double, 4>{std::cos(x[0]) * std::cos(x[2]), x[3], -std::sin(x[0]) * std::sin(x[2]), x[1]};
      },
      [](const Point& x) {
        std::array<std::array<double, 4>, 4> h{};
        h[0][0] = -std::sin(x[0]) * std::cos(x[2]);
        h[0][2] = h[2][0] = -std::cos(x[0]) * std::sin(x[2]);
        h[2][2] = -std::sin(x[0]) * std::cos(x[2]);
        h[1][3] = h[3][1] = 1.0;
        return h;
      });
  AnalyticField shifted;
  shifted.value = [&](const Point& x) { return wave.value(x) + gauge.value(x); };
  shifted.gradient = [&](const Point& x) { return wave.gradient(x) + gauge.gradient(x); };
  for (const Point& x : sample_points()) {
    CHECK(max_abs(field_from_potential(gauge, x)) == 0.0);
    CHECK(max_abs_diff(field_from_potential(shifted, x), field_from_potential(wave, x)) < 1e-12);
  }

  AnalyticField constant;
  constant.value = [](const Point&) {
    ComponentSpinor v(IndexSignature{kWorldDown});
    v.at({0}) = 2.0;
    v.at({3}) = -1.5;
    return v;
  };
  constant.gradient = [](const Point&) { return bivector_zero(); };
  CHECK(max_abs(field_from_potential(constant, {1.0, 2.0, 3.0, 4.0})) == 0.0);
}

TEST_CASE("field_from_potential: grids converge at second order") {
  auto potential = [](const Point& x) {
    ComponentSpinor v(IndexSignature{kWorldDown});
    v.at({1}) = std::sin(x[0] - x[1]);
    return v;
  };
  auto error_at = [&](double h) {
    Grid g;
    g.h = h;
    g.n = {5, 5, 5, 5};
    g.origin = {0.2, 0.1, -0.3, 0.4};
    const SampledField f = field_from_potential(sample(potential, g));
    double worst = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const Point x = f.grid.point(i);
      worst = std::max(worst, std::abs(f.values[i].at({0, 1}) - std::cos(x[0] - x[1])));
      worst = std::max(worst, std::abs(f.values[i].at({1, 0}) + std::cos(x[0] - x[1])));
    }
    return worst;
  };
  const double e1 = error_at(0.1);
  const double e2 = error_at(0.05);
  CHECK(e1 < 1e-2);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);

  // central differences along different axes commute, so a sampled pure
  // gauge stays curl-free up to rounding
  auto gauge = [](const Point& x) {
    ComponentSpinor v(IndexSignature{kWorldDown});
    v.at({0}) = std::cos(x[0]) * std::cos(x[2]);
    v.at({2}) = -std::sin(x[0]) * std::sin(x[2]);
    return v;
  };
  auto gauge_error = [&](double h) {
    Grid g;
    g.h = h;
    g.n = {5, 3, 5, 3};
    g.origin = {0.3, 0.0, 0.5, 0.0};
    return max_abs(field_from_potential(sample(gauge, g)).values[0]);
  };
  CHECK(gauge_error(0.1) < 1e-13);
  CHECK(gauge_error(0.05) < 1e-13);

  Grid tiny;
  tiny.n = {2, 5, 5, 5};
  CHECK(kind_of([&] { field_from_potential(sample(potential, tiny)); }) == ErrorKind::Grid);
}

TEST_CASE("massless_residual: plane waves") {
  const ComponentSpinor alpha = spinor_alpha({0.6, 0.2}, {-0.3, 0.9});
  const ComponentSpinor k = null_wave_vector(alpha);
  // k is null: k_a k^a = 0
  CHECK(std::abs(k.at({0}).real() * k.at({0}).real() - k.at({1}).real() * k.at({1}).real() -
                 k.at({2}).real() * k.at({2}).real() - k.at({3}).real() * k.at({3}).real()) < 1e-15);
  const auto points = sample_points();
  CHECK(massless_residual(plane_wave(alpha, k), points) < 1e-12);

  // constant phi
  const ComponentSpinor zero_k(IndexSignature{kWorldDown});
  CHECK(massless_residual(plane_wave(alpha, zero_k, 3.0), points) == 0.0);

  // non-null wave vector
  ComponentSpinor timelike(IndexSignature{kWorldDown});
  timelike.at({0}) = 1.0;
  const AnalyticField bad = plane_wave(alpha, timelike);
  const double k_norm = 1.0;
  const double phi_norm = max_abs(bad.value(points[0]));
  CHECK(massless_residual(bad, points) > 0.1 * k_norm * phi_norm);

  ComponentSpinor mixed = k;
  mixed.at({2}) += 0.7;
  const double mixed_norm = std::sqrt(std::abs(mixed.at({0}).real() * mixed.at({0}).real() -
                                               mixed.at({1}).real() * mixed.at({1}).real() -
                                               mixed.at({2}).real() * mixed.at({2}).real() -
                                               mixed.at({3}).real() * mixed.at({3}).real()));
  CHECK(massless_residual(plane_wave(alpha, mixed), points) > 0.1 * mixed_norm * phi_norm);
}

TEST_CASE("massless_residual: grid convergence and determinism") {
  const ComponentSpinor alpha = spinor_alpha({0.6, 0.2}, {-0.3, 0.9});
  const AnalyticField wave = plane_wave(alpha, null_wave_vector(alpha));
  auto residual = [&](double h, unsigned jobs) {
    Grid g;
    g.h = h;
    g.n = {5, 5, 5, 5};
    g.origin = {0.1, 0.2, 0.3, 0.4};
    return massless_residual(sample(wave.value, g, jobs), jobs);
  };
  const double r1 = residual(0.1, 1);
  const double r2 = residual(0.05, 1);
  const double order = std::log2(r1 / r2);
  CHECK(order > 1.7);
  CHECK(order < 2.3);
  CHECK(residual(0.1, 4) == r1);
  CHECK(residual(0.05, 3) == r2);
}

TEST_CASE("field CSV round trip") {
  const ComponentSpinor alpha = spinor_alpha({0.6, 0.2}, {-0.3, 0.9});
  const AnalyticField wave = plane_wave(alpha, null_wave_vector(alpha));
  Grid g;
  g.h = 0.25;
  g.n = {2, 3, 1, 2};
  g.origin = {0.0, -0.5, 1.0, 0.25};
  const SampledField field = sample(wave.value, g);
  std::stringstream ss;
  write_field_csv(ss, field);
  const std::string text = ss.str();
  CHECK(text.rfind("t,x,y,z,re_phi00,im_phi00,re_phi01,im_phi01,re_phi11,im_phi11\n", 0) == 0);
  const SampledField back = read_field_csv(ss);
  CHECK(back.grid.n == g.n);
  REQUIRE(back.values.size() == field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i) CHECK(max_abs_diff(back.values[i], field.values[i]) == 0.0);

  std::stringstream bad("t,x,y,z,phi\n");
  CHECK(kind_of([&] { read_field_csv(bad); }) == ErrorKind::Config);

  std::stringstream f2;
  SampledField bivectors{g, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const ComponentSpinor phi = field.values[i];
    bivectors.values.push_back(bivector_from_spinors(phi, conjugate(phi)));
  }
  write_bivector_csv(f2, bivectors);
  std::string header;
  std::getline(f2, header);
  CHECK(header == "t,x,y,z,F01,F02,F03,F12,F13,F23");
}
