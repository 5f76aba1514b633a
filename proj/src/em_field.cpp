#include "spinwave/em_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "spinwave/error.hpp"
#include "spinwave/parallel.hpp"

namespace spinwave::em {

namespace {

constexpr Slot kWorldDown{IndexKind::World, Variance::Down};
constexpr Slot kUnDown{IndexKind::Unprimed, Variance::Down};
constexpr Slot kPrDown{IndexKind::Primed, Variance::Down};
constexpr double kEta[4] = {1.0, -1.0, -1.0, -1.0};
// e_0123; fixes the duality phase to exp(-i angle)
constexpr double kOrientation = -1.0;

const IndexSignature& bivector_signature() {
  static const IndexSignature sig{kWorldDown, kWorldDown};
  return sig;
}

void require_symmetric_pair(const ComponentSpinor& s, IndexKind kind, const char* what) {
  const IndexSignature sig{{kind, Variance::Down}, {kind, Variance::Down}};
  if (s.signature() != sig) {
    throw Error(ErrorKind::Spinor, std::string(what) + " must have signature " + sig.str() + ", got " +
                                       s.signature().str());
  }
  const double scale = std::max(1.0, max_abs(s));
  if (std::abs(s.at({0, 1}) - s.at({1, 0})) > 1e-12 * scale) {
    throw Error(ErrorKind::Spinor, std::string(what) + " is not symmetric");
  }
}

int levi_civita(int a, int b, int c, int d) {
  const int p[4] = {a, b, c, d};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (p[i] == p[j]) return 0;
    }
  }
  int sign = 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

/// Exact antisymmetric part.
ComponentSpinor antisymmetric_part(const ComponentSpinor& x) {
  ComponentSpinor f(bivector_signature());
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const Complex v = 0.5 * (x.at({a, b}) - x.at({b, a}));
      f.at({a, b}) = v;
      f.at({b, a}) = -v;
    }
  }
  return f;
}

double eps_up(int a, int b) {
  const auto& e = MetricSpinorConvention::standard().eps_up;
  return e[a][b];
}

double eps_low(int a, int b) {
  const auto& e = MetricSpinorConvention::standard().eps_low;
  return e[a][b];
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::array<std::size_t, 4> Grid::coords(std::size_t i) const {
  std::array<std::size_t, 4> c{};
  for (std::size_t k = 4; k-- > 0;) {
    c[k] = i % n[k];
    i /= n[k];
  }
  return c;
}

std::size_t Grid::index(const std::array<std::size_t, 4>& c) const {
  std::size_t i = 0;
  for (std::size_t k = 0; k < 4; ++k) i = i * n[k] + c[k];
  return i;
}

Point Grid::point(std::size_t i) const {
  const auto c = coords(i);
  Point x{};
  for (std::size_t k = 0; k < 4; ++k) x[k] = origin[k] + static_cast<double>(c[k]) * h;
  return x;
}

Grid Grid::interior() const {
  Grid g = *this;
  for (std::size_t k = 0; k < 4; ++k) {
    if (n[k] < 3) {
      throw Error(ErrorKind::Grid, "axis " + std::to_string(k) + " has " + std::to_string(n[k]) +
                                       " samples; the central-difference stencil needs at least 3");
    }
    g.n[k] = n[k] - 2;
    g.origin[k] = origin[k] + h;
  }
  return g;
}

void require_bivector(const ComponentSpinor& f) {
  if (f.signature() != bivector_signature()) {
    throw Error(ErrorKind::Bivector, "bivector must have signature " + bivector_signature().str() + ", got " +
                                         f.signature().str());
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      if (f.at({a, b}) != -f.at({b, a})) {
        throw Error(ErrorKind::Bivector,
                    "F_" + std::to_string(a) + std::to_string(b) + " != -F_" + std::to_string(b) + std::to_string(a));
      }
    }
  }
}

PhotonWaveFunction spinors_from_bivector(const ComponentSpinor& f, const ConnectingObjects& s) {
  require_bivector(f);
  const ComponentSpinor fs = s.spinor_from_2tensor(f);  // (A, A', B, B')
  PhotonWaveFunction out{ComponentSpinor(IndexSignature{kUnDown, kUnDown}),
                         ComponentSpinor(IndexSignature{kPrDown, kPrDown})};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Complex phi{};
      Complex phibar{};
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          phi += fs.at({a, p, b, q}) * eps_up(p, q);
          phibar += fs.at({p, a, q, b}) * eps_up(p, q);
        }
      }
      out.phi.at({a, b}) = 0.5 * phi;
      out.phibar.at({a, b}) = 0.5 * phibar;
    }
  }
  return out;
}

ComponentSpinor bivector_from_spinors(const ComponentSpinor& phi, const ComponentSpinor& phibar,
                                      const ConnectingObjects& s) {
  require_symmetric_pair(phi, IndexKind::Unprimed, "phi_{AB}");
  require_symmetric_pair(phibar, IndexKind::Primed, "phi_{A'B'}");
  ComponentSpinor fs(IndexSignature{kUnDown, kPrDown, kUnDown, kPrDown});
  for_each_index(fs.signature(), [&](std::span<const int> i) {
    fs(i) = eps_low(i[1], i[3]) * phi.at({i[0], i[2]}) + eps_low(i[0], i[2]) * phibar.at({i[1], i[3]});
  });
  return antisymmetric_part(s.tensor_from_spinor(fs));
}

ComponentSpinor hodge_dual(const ComponentSpinor& f) {
  require_bivector(f);
  ComponentSpinor x(bivector_signature());
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Complex sum{};
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
          const int e = levi_civita(a, b, c, d);
          if (e != 0) sum += static_cast<double>(e) * kEta[c] * kEta[d] * f.at({c, d});
        }
      }
      x.at({a, b}) = 0.5 * kOrientation * sum;
    }
  }
  return antisymmetric_part(x);
}

ComponentSpinor duality_rotation(const ComponentSpinor& f, double angle) {
  return antisymmetric_part(std::cos(angle) * f + std::sin(angle) * hodge_dual(f));
}

std::pair<double, double> invariants(const ComponentSpinor& f) {
  const ComponentSpinor dual = hodge_dual(f);
  double ff = 0.0;
  double fd = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      ff += kEta[a] * kEta[b] * (f.at({a, b}) * f.at({a, b})).real();
      fd += kEta[a] * kEta[b] * (f.at({a, b}) * dual.at({a, b})).real();
    }
  }
  return {ff, fd};
}

ComponentSpinor stress_energy(const ComponentSpinor& phi, const ComponentSpinor& phibar,
                              const ConnectingObjects& s) {
  require_symmetric_pair(phi, IndexKind::Unprimed, "phi_{AB}");
  require_symmetric_pair(phibar, IndexKind::Primed, "phi_{A'B'}");
  ComponentSpinor ts(IndexSignature{kUnDown, kPrDown, kUnDown, kPrDown});
  const double norm = 1.0 / (2.0 * std::numbers::pi);
  for_each_index(ts.signature(), [&](std::span<const int> i) {
    ts(i) = norm * phi.at({i[0], i[2]}) * phibar.at({i[1], i[3]});
  });
  return s.tensor_from_spinor(ts);
}

Complex flat_trace(const ComponentSpinor& t) {
  if (t.signature() != bivector_signature()) {
    throw Error(ErrorKind::Index, "trace needs a (a_, b_) tensor, got " + t.signature().str());
  }
  Complex sum{};
  for (int a = 0; a < 4; ++a) sum += kEta[a] * t.at({a, a});
  return sum;
}

ComponentSpinor field_from_potential(const AnalyticField& potential, const Point& x) {
  const ComponentSpinor g = potential.gradient(x);
  if (g.signature() != bivector_signature()) {
    throw Error(ErrorKind::Index, "potential gradient must have signature (a_, b_), got " + g.signature().str());
  }
  ComponentSpinor f(bivector_signature());
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const Complex v = g.at({a, b}) - g.at({b, a});
      f.at({a, b}) = v;
      f.at({b, a}) = -v;
    }
  }
  return f;
}

namespace {

/// d_a of a sampled field at interior sample `i` of `grid`; slots (a_, ...).
ComponentSpinor central_gradient(const SampledField& field, std::size_t i) {
  const Grid& grid = field.grid;
  const auto c = grid.coords(i);
  const IndexSignature sig = IndexSignature{kWorldDown}.concat(field.values[i].signature());
  ComponentSpinor out(sig);
  const std::size_t block = field.values[i].signature().size();
  for (std::size_t a = 0; a < 4; ++a) {
    auto up = c;
    auto down = c;
    ++up[a];
    --down[a];
    const auto& vp = field.values[grid.index(up)].data();
    const auto& vm = field.values[grid.index(down)].data();
    for (std::size_t k = 0; k < block; ++k) out.data()[a * block + k] = (vp[k] - vm[k]) / (2.0 * grid.h);
  }
  return out;
}

std::size_t to_parent(const Grid& parent, const Grid& inner, std::size_t i) {
  auto c = inner.coords(i);
  for (auto& v : c) ++v;
  return parent.index(c);
}

void require_samples(const SampledField& f) {
  if (f.values.size() != f.grid.size()) {
    throw Error(ErrorKind::Grid, "field has " + std::to_string(f.values.size()) + " samples for a grid of " +
                                     std::to_string(f.grid.size()));
  }
}

}  // namespace

SampledField field_from_potential(const SampledField& potential, unsigned jobs) {
  require_samples(potential);
  SampledField out{potential.grid.interior(), {}};
  out.values.resize(out.grid.size());
  parallel_for(out.grid.size(), jobs, [&](std::size_t i) {
    const ComponentSpinor g = central_gradient(potential, to_parent(potential.grid, out.grid, i));
    if (g.signature() != bivector_signature()) {
      throw Error(ErrorKind::Index, "potential samples must have signature (a_)");
    }
    ComponentSpinor f(bivector_signature());
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        const Complex v = g.at({a, b}) - g.at({b, a});
        f.at({a, b}) = v;
        f.at({b, a}) = -v;
      }
    }
    out.values[i] = std::move(f);
  });
  return out;
}

ComponentSpinor massless_divergence(const ComponentSpinor& dphi, const ConnectingObjects& s) {
  const IndexSignature sig{kWorldDown, kUnDown, kUnDown};
  if (dphi.signature() != sig) {
    throw Error(ErrorKind::Index, "d_a phi_{AB} must have signature " + sig.str() + ", got " + dphi.signature().str());
  }
  // d_{CC'} phi_{AB}, then raise C, C', B and contract C with A
  ComponentSpinor d = contract(outer(s.to_world(), dphi), 0, 3);
  d = raise_lower(d, 0, Variance::Up);
  d = raise_lower(d, 1, Variance::Up);
  d = raise_lower(d, 3, Variance::Up);
  return contract(d, 0, 2);
}

double massless_residual(const AnalyticField& phi, std::span<const Point> points) {
  double worst = 0.0;
  for (const Point& x : points) worst = std::max(worst, max_abs(massless_divergence(phi.gradient(x))));
  return worst;
}

double massless_residual(const SampledField& phi, unsigned jobs) {
  require_samples(phi);
  const Grid inner = phi.grid.interior();
  std::vector<double> local(inner.size(), 0.0);
  parallel_for(inner.size(), jobs, [&](std::size_t i) {
    local[i] = max_abs(massless_divergence(central_gradient(phi, to_parent(phi.grid, inner, i))));
  });
  double worst = 0.0;
  for (double v : local) worst = std::max(worst, v);
  return worst;
}

ComponentSpinor null_wave_vector(const ComponentSpinor& alpha, const ConnectingObjects& s) {
  if (alpha.signature() != IndexSignature{kUnDown}) {
    throw Error(ErrorKind::Index, "alpha must have signature (A_), got " + alpha.signature().str());
  }
  ComponentSpinor kk(IndexSignature{kUnDown, kPrDown});
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) kk.at({a, b}) = alpha.at({a}) * std::conj(alpha.at({b}));
  }
  ComponentSpinor k = s.covector_from_spinor(kk);
  for (auto& v : k.data()) v = {v.real(), 0.0};
  return k;
}

AnalyticField plane_wave(const ComponentSpinor& alpha, const ComponentSpinor& k, Complex amplitude) {
  if (alpha.signature() != IndexSignature{kUnDown}) {
    throw Error(ErrorKind::Index, "alpha must have signature (A_), got " + alpha.signature().str());
  }
  if (k.signature() != IndexSignature{kWorldDown}) {
    throw Error(ErrorKind::Index, "k must have signature (a_), got " + k.signature().str());
  }
  ComponentSpinor base(IndexSignature{kUnDown, kUnDown});
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) base.at({a, b}) = amplitude * alpha.at({a}) * alpha.at({b});
  }
  auto value = [base, k](const Point& x) {
    Complex phase{};
    for (int a = 0; a < 4; ++a) phase += k.at({a}) * x[a];
    return std::exp(Complex{0.0, -1.0} * phase) * base;
  };
  auto gradient = [value, k](const Point& x) {
    const ComponentSpinor v = value(x);
    return outer(Complex{0.0, -1.0} * k, v);
  };
  return {value, gradient};
}

AnalyticField pure_gauge(std::function<std::array<double, 4>(const Point&)> gradient,
                         std::function<std::array<std::array<double, 4>, 4>(const Point&)> hessian) {
  auto value = [gradient](const Point& x) {
    ComponentSpinor v(IndexSignature{kWorldDown});
    const auto g = gradient(x);
    for (int a = 0; a < 4; ++a) v.at({a}) = g[a];
    return v;
  };
  auto grad = [hessian](const Point& x) {
    ComponentSpinor v(bivector_signature());
    const auto h = hessian(x);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) v.at({a, b}) = h[a][b];
    }
    return v;
  };
  return {value, grad};
}

SampledField sample(const std::function<ComponentSpinor(const Point&)>& f, const Grid& grid, unsigned jobs) {
  SampledField out{grid, std::vector<ComponentSpinor>(grid.size())};
  parallel_for(grid.size(), jobs, [&](std::size_t i) { out.values[i] = f(grid.point(i)); });
  return out;
}

void write_field_csv(std::ostream& out, const SampledField& phi) {
  require_samples(phi);
  out << "t,x,y,z,re_phi00,im_phi00,re_phi01,im_phi01,re_phi11,im_phi11\n";
  for (std::size_t i = 0; i < phi.values.size(); ++i) {
    const Point x = phi.grid.point(i);
    const ComponentSpinor& v = phi.values[i];
    require_symmetric_pair(v, IndexKind::Unprimed, "phi_{AB}");
    for (double c : x) out << format_double(c) << ',';
    const Complex parts[3] = {v.at({0, 0}), v.at({0, 1}), v.at({1, 1})};
    for (int k = 0; k < 3; ++k) {
      out << format_double(parts[k].real()) << ',' << format_double(parts[k].imag()) << (k == 2 ? '\n' : ',');
    }
  }
}

SampledField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y,z,re_phi00,im_phi00,re_phi01,im_phi01,re_phi11,im_phi11") {
    throw Error(ErrorKind::Config, "field CSV header mismatch");
  }
  std::vector<std::array<double, 10>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::array<double, 10> r{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k >= r.size()) throw Error(ErrorKind::Config, "field CSV line " + std::to_string(number) + ": too many columns");
      try {
        std::size_t used = 0;
        r[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::Config, "field CSV line " + std::to_string(number) + ": bad number '" + cell + "'");
      }
      ++k;
    }
    if (k != r.size()) throw Error(ErrorKind::Config, "field CSV line " + std::to_string(number) + ": expected 10 columns");
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorKind::Grid, "field CSV has no samples");

  Grid grid;
  std::array<std::vector<double>, 4> axes;
  for (std::size_t a = 0; a < 4; ++a) {
    for (const auto& r : rows) axes[a].push_back(r[a]);
    std::sort(axes[a].begin(), axes[a].end());
    axes[a].erase(std::unique(axes[a].begin(), axes[a].end()), axes[a].end());
    grid.n[a] = axes[a].size();
    grid.origin[a] = axes[a].front();
  }
  double h = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    if (axes[a].size() > 1) {
      h = (axes[a].back() - axes[a].front()) / static_cast<double>(axes[a].size() - 1);
      break;
    }
  }
  grid.h = h > 0.0 ? h : 1.0;
  if (grid.size() != rows.size()) throw Error(ErrorKind::Grid, "field CSV samples do not form a full grid");
  SampledField out{grid, std::vector<ComponentSpinor>(grid.size())};
  std::vector<bool> seen(grid.size(), false);
  for (const auto& r : rows) {
    std::array<std::size_t, 4> c{};
    for (std::size_t a = 0; a < 4; ++a) {
      const double u = (r[a] - grid.origin[a]) / grid.h;
      const double nearest = std::round(u);
      if (std::abs(u - nearest) > 1e-6 || nearest < 0 || nearest >= static_cast<double>(grid.n[a])) {
        throw Error(ErrorKind::Grid, "field CSV samples are not uniformly spaced");
      }
      c[a] = static_cast<std::size_t>(nearest);
    }
    const std::size_t i = grid.index(c);
    if (seen[i]) throw Error(ErrorKind::Grid, "field CSV repeats a sample point");
    seen[i] = true;
    ComponentSpinor v(IndexSignature{kUnDown, kUnDown});
    v.at({0, 0}) = {r[4], r[5]};
    v.at({0, 1}) = v.at({1, 0}) = {r[6], r[7]};
    v.at({1, 1}) = {r[8], r[9]};
    out.values[i] = std::move(v);
  }
  return out;
}

void write_bivector_csv(std::ostream& out, const SampledField& f) {
  require_samples(f);
  out << "t,x,y,z,F01,F02,F03,F12,F13,F23\n";
  static constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    require_bivector(f.values[i]);
    for (double c : f.grid.point(i)) out << format_double(c) << ',';
    for (int k = 0; k < 6; ++k) {
      out << format_double(f.values[i].at({kPairs[k][0], kPairs[k][1]}).real()) << (k == 5 ? '\n' : ',');
    }
  }
}

}  // namespace spinwave::em
