#include "spinwave/spinor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spinwave {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Contract: return "contract-error";
    case ErrorKind::Index: return "index-error";
    case ErrorKind::DegenerateMetric: return "degenerate-metric";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Weight: return "weight-error";
    case ErrorKind::IllPosedIdentity: return "identity-ill-posed";
    case ErrorKind::UnsupportedExpression: return "unsupported-expression";
    case ErrorKind::UnboundKernel: return "unbound-kernel";
    case ErrorKind::InvalidRule: return "invalid-rule";
    case ErrorKind::Bivector: return "bivector-error";
    case ErrorKind::Spinor: return "spinor-error";
    case ErrorKind::Grid: return "grid-error";
    case ErrorKind::Domain: return "domain-error";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::Config: return "config-error";
  }
  return "error";
}

std::size_t IndexSignature::size() const {
  std::size_t n = 1;
  for (const auto& s : slots_) n *= static_cast<std::size_t>(dimension(s.kind));
  return n;
}

std::vector<std::size_t> IndexSignature::strides() const {
  std::vector<std::size_t> st(slots_.size(), 1);
  for (std::size_t k = slots_.size(); k-- > 1;) {
    st[k - 1] = st[k] * static_cast<std::size_t>(dimension(slots_[k].kind));
  }
  return st;
}

IndexSignature IndexSignature::without(std::size_t i, std::size_t j) const {
  std::vector<Slot> out;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (k != i && k != j) out.push_back(slots_[k]);
  }
  return IndexSignature(std::move(out));
}

IndexSignature IndexSignature::with_variance(std::size_t i, Variance v) const {
  auto out = slots_;
  out.at(i).variance = v;
  return IndexSignature(std::move(out));
}

IndexSignature IndexSignature::conjugated() const {
  auto out = slots_;
  for (auto& s : out) s.kind = conjugate_kind(s.kind);
  return IndexSignature(std::move(out));
}

IndexSignature IndexSignature::concat(const IndexSignature& other) const {
  auto out = slots_;
  out.insert(out.end(), other.slots_.begin(), other.slots_.end());
  return IndexSignature(std::move(out));
}

std::string IndexSignature::str() const {
  std::string out = "(";
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (k) out += ",";
    const auto& s = slots_[k];
    out += s.kind == IndexKind::Unprimed ? "A" : s.kind == IndexKind::Primed ? "A'" : "a";
    out += s.variance == Variance::Up ? "^" : "_";
  }
  return out + ")";
}

ComponentSpinor::ComponentSpinor(IndexSignature sig)
    : sig_(std::move(sig)), data_(sig_.size(), Complex{0.0, 0.0}) {}

ComponentSpinor::ComponentSpinor(IndexSignature sig, std::vector<Complex> data)
    : sig_(std::move(sig)), data_(std::move(data)) {
  if (data_.size() != sig_.size()) {
    throw Error(ErrorKind::Index, "component count " + std::to_string(data_.size()) +
                                      " does not match signature " + sig_.str());
  }
}

ComponentSpinor ComponentSpinor::scalar(Complex value) {
  return ComponentSpinor(IndexSignature{}, std::vector<Complex>{value});
}

std::size_t ComponentSpinor::offset(std::span<const int> index) const {
  if (index.size() != sig_.rank()) throw Error(ErrorKind::Index, "wrong number of indices");
  std::size_t off = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const int d = dimension(sig_[k].kind);
    if (index[k] < 0 || index[k] >= d) throw Error(ErrorKind::Index, "index value out of range");
    off = off * static_cast<std::size_t>(d) + static_cast<std::size_t>(index[k]);
  }
  return off;
}

ComponentSpinor& ComponentSpinor::operator+=(const ComponentSpinor& o) {
  if (!(sig_ == o.sig_)) throw Error(ErrorKind::Index, "signature mismatch in sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComponentSpinor& ComponentSpinor::operator-=(const ComponentSpinor& o) {
  if (!(sig_ == o.sig_)) throw Error(ErrorKind::Index, "signature mismatch in difference");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComponentSpinor& ComponentSpinor::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

const MetricSpinorConvention& MetricSpinorConvention::standard() {
  static const MetricSpinorConvention conv{};
  return conv;
}

const MetricSpinorConvention& MetricSpinorConvention::penrose() {
  static const MetricSpinorConvention conv = [] {
    MetricSpinorConvention c;
    c.displacement = Displacement::RaiseSecondLowerFirst;
    return c;
  }();
  return conv;
}

bool MetricSpinorConvention::consistent() const {
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      double sum = 0.0;
      for (int b = 0; b < 2; ++b) sum += eps_up[a][b] * eps_low[c][b];
      if (sum != (a == c ? 1.0 : 0.0)) return false;
    }
  }
  const ComponentSpinor basis[] = {
      ComponentSpinor(IndexSignature{{IndexKind::Unprimed, Variance::Up}}, {1.0, 0.0}),
      ComponentSpinor(IndexSignature{{IndexKind::Unprimed, Variance::Up}}, {0.0, 1.0})};
  for (const auto& b : basis) {
    const auto round = raise_lower(raise_lower(b, 0, Variance::Down, *this), 0, Variance::Up, *this);
    if (max_abs_diff(round, b) != 0.0) return false;
  }
  return true;
}

ComponentSpinor epsilon(IndexKind kind, Variance first, Variance second,
                        const MetricSpinorConvention& conv) {
  if (kind == IndexKind::World) throw Error(ErrorKind::Index, "epsilon spinor needs spinor slots");
  ComponentSpinor low(IndexSignature{{kind, Variance::Down}, {kind, Variance::Down}});
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) low.at({a, b}) = conv.eps_low[a][b];
  }
  if (first == Variance::Up && second == Variance::Up) {
    ComponentSpinor up(IndexSignature{{kind, Variance::Up}, {kind, Variance::Up}});
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) up.at({a, b}) = conv.eps_up[a][b];
    }
    return up;
  }
  ComponentSpinor out = low;
  if (first == Variance::Up) out = raise_lower(out, 0, Variance::Up, conv);
  if (second == Variance::Up) out = raise_lower(out, 1, Variance::Up, conv);
  return out;
}

ComponentSpinor outer(const ComponentSpinor& a, const ComponentSpinor& b) {
  ComponentSpinor out(a.signature().concat(b.signature()));
  const auto ad = a.data();
  const auto bd = b.data();
  auto od = out.data();
  for (std::size_t i = 0; i < ad.size(); ++i) {
    for (std::size_t j = 0; j < bd.size(); ++j) od[i * bd.size() + j] = ad[i] * bd[j];
  }
  return out;
}

ComponentSpinor contract(const ComponentSpinor& s, std::size_t i, std::size_t j) {
  const auto& sig = s.signature();
  if (i >= sig.rank() || j >= sig.rank() || i == j) {
    throw Error(ErrorKind::Contract, "invalid slot pair");
  }
  if (sig[i].kind != sig[j].kind) throw Error(ErrorKind::Contract, "slot kinds differ");
  if (sig[i].variance == sig[j].variance) throw Error(ErrorKind::Contract, "slots have equal variance");
  ComponentSpinor out(sig.without(i, j));
  const int d = dimension(sig[i].kind);
  std::vector<int> full(sig.rank());
  for_each_index(out.signature(), [&](std::span<const int> idx) {
    std::size_t src = 0;
    for (std::size_t k = 0; k < sig.rank(); ++k) {
      if (k != i && k != j) full[k] = idx[src++];
    }
    Complex sum{0.0, 0.0};
    for (int c = 0; c < d; ++c) {
      full[i] = c;
      full[j] = c;
      sum += s(full);
    }
    out(idx) = sum;
  });
  return out;
}

ComponentSpinor raise_lower(const ComponentSpinor& s, std::size_t i, Variance target,
                            const MetricSpinorConvention& conv) {
  const auto& sig = s.signature();
  if (i >= sig.rank()) throw Error(ErrorKind::Index, "slot out of range");
  if (sig[i].kind == IndexKind::World) throw Error(ErrorKind::Index, "cannot displace a world index");
  if (sig[i].variance == target) throw Error(ErrorKind::Index, "slot already has the requested variance");
  ComponentSpinor out(sig.with_variance(i, target));
  std::vector<int> src(sig.rank());
  for_each_index(out.signature(), [&](std::span<const int> idx) {
    std::copy(idx.begin(), idx.end(), src.begin());
    Complex sum{0.0, 0.0};
    for (int b = 0; b < 2; ++b) {
      src[i] = b;
      const bool first = conv.displacement == Displacement::RaiseFirstLowerSecond;
      double e = 0.0;
      if (target == Variance::Up) {
        e = first ? conv.eps_up[b][idx[i]] : conv.eps_up[idx[i]][b];
      } else {
        e = first ? conv.eps_low[idx[i]][b] : conv.eps_low[b][idx[i]];
      }
      if (e != 0.0) sum += e * s(src);
    }
    out(idx) = sum;
  });
  return out;
}

ComponentSpinor symmetrize(const ComponentSpinor& s, std::span<const std::size_t> slots,
                           SymmetryMode mode) {
  const auto& sig = s.signature();
  if (slots.empty()) return s;
  for (auto k : slots) {
    if (k >= sig.rank()) throw Error(ErrorKind::Index, "slot out of range");
    if (!(sig[k] == sig[slots[0]])) throw Error(ErrorKind::Index, "symmetrized slots are heterogeneous");
  }
  std::vector<std::size_t> perm(slots.size());
  std::iota(perm.begin(), perm.end(), 0);
  double norm = 0.0;
  ComponentSpinor out(sig);
  std::vector<int> src(sig.rank());
  do {
    // parity of perm
    int inversions = 0;
    for (std::size_t a = 0; a < perm.size(); ++a) {
      for (std::size_t b = a + 1; b < perm.size(); ++b) inversions += perm[a] > perm[b] ? 1 : 0;
    }
    const double sign = (mode == SymmetryMode::Antisymmetric && (inversions % 2)) ? -1.0 : 1.0;
    norm += 1.0;
    for_each_index(sig, [&](std::span<const int> idx) {
      std::copy(idx.begin(), idx.end(), src.begin());
      for (std::size_t a = 0; a < slots.size(); ++a) src[slots[a]] = idx[slots[perm[a]]];
      out(idx) += sign * s(src);
    });
  } while (std::next_permutation(perm.begin(), perm.end()));
  out *= Complex{1.0 / norm, 0.0};
  return out;
}

ComponentSpinor symmetrize(const ComponentSpinor& s, std::initializer_list<std::size_t> slots,
                           SymmetryMode mode) {
  return symmetrize(s, std::span<const std::size_t>(slots.begin(), slots.size()), mode);
}

ComponentSpinor conjugate(const ComponentSpinor& s) {
  std::vector<Complex> data(s.data().begin(), s.data().end());
  for (auto& v : data) v = std::conj(v);
  return ComponentSpinor(s.signature().conjugated(), std::move(data));
}

ComponentSpinor permute(const ComponentSpinor& s, std::span<const std::size_t> perm) {
  const auto& sig = s.signature();
  if (perm.size() != sig.rank()) throw Error(ErrorKind::Index, "permutation size mismatch");
  std::vector<Slot> slots;
  for (auto p : perm) slots.push_back(sig[p]);
  ComponentSpinor out{IndexSignature(std::move(slots))};
  std::vector<int> src(sig.rank());
  for_each_index(out.signature(), [&](std::span<const int> idx) {
    for (std::size_t k = 0; k < perm.size(); ++k) src[perm[k]] = idx[k];
    out(idx) = s(src);
  });
  return out;
}

double max_abs(const ComponentSpinor& s) {
  double m = 0.0;
  for (const auto& v : s.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const ComponentSpinor& a, const ComponentSpinor& b) {
  if (!(a.signature() == b.signature())) throw Error(ErrorKind::Index, "signature mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace spinwave
