#include "spinwave/symbolic/eval.hpp"

#include <algorithm>

namespace spinwave::symbolic {

ComponentSpinor symmetrize_lowered(const ComponentSpinor& s, const std::vector<std::size_t>& slots,
                                   SymmetryMode mode, const MetricSpinorConvention& conv) {
  ComponentSpinor low = s;
  for (auto k : slots) {
    if (low.signature()[k].variance == Variance::Up) low = raise_lower(low, k, Variance::Down, conv);
  }
  ComponentSpinor sym = symmetrize(low, std::span<const std::size_t>(slots), mode);
  for (auto k : slots) {
    if (s.signature()[k].variance == Variance::Up) sym = raise_lower(sym, k, Variance::Up, conv);
  }
  return sym;
}

namespace {

const ComponentSpinor& lookup(const Bindings& b, const Kernel& k) {
  if (auto it = b.find(k.key()); it != b.end()) return it->second;
  if (auto it = b.find(k.name); it != b.end()) return it->second;
  throw Error(ErrorKind::UnboundKernel, "no components bound for kernel " + k.name);
}

ComponentSpinor instance(const Factor& f, const Bindings& b, const MetricSpinorConvention& conv) {
  const Kernel& k = *f.kernel;
  if (k.is_operator()) {
    throw Error(ErrorKind::UnsupportedExpression, "component evaluation of derivative operator " + k.name);
  }
  if (k.is_metric()) return epsilon(k.slots[0].kind, f.variances[0], f.variances[1], conv);
  ComponentSpinor s = lookup(b, k);
  if (!(s.signature() == IndexSignature(k.slots))) {
    throw Error(ErrorKind::Index, "binding for " + k.name + " must have signature " +
                                      IndexSignature(k.slots).str() + ", got " + s.signature().str());
  }
  for (std::size_t i = 0; i < f.rank(); ++i) {
    if (s.signature()[i].variance != f.variances[i]) s = raise_lower(s, i, f.variances[i], conv);
  }
  for (const auto& g : f.extra) {
    s = symmetrize_lowered(s, g.slots, g.antisymmetric ? SymmetryMode::Antisymmetric : SymmetryMode::Symmetric,
                           conv);
  }
  return s;
}

}  // namespace

ComponentSpinor component_eval(const Expr& e, const Bindings& bindings, const MetricSpinorConvention& conv) {
  validate(e);
  std::vector<FreeIndex> frees = e.terms.empty() ? std::vector<FreeIndex>{} : free_indices(e.terms.front());
  std::vector<Slot> out_slots;
  for (const auto& f : frees) out_slots.push_back({f.kind, f.variance});
  ComponentSpinor out{IndexSignature(out_slots)};
  const auto strides = out.signature().strides();

  for (const auto& t : e.terms) {
    std::vector<ComponentSpinor> parts;
    for (const auto& f : t.factors) parts.push_back(instance(f, bindings, conv));
    // labels: frees (result order) then dummies
    std::vector<std::string> labels;
    std::vector<int> dims;
    for (const auto& f : frees) {
      labels.push_back(f.label);
      dims.push_back(dimension(f.kind));
    }
    for (const auto& [label, refs] : occurrences(t)) {
      if (refs.size() != 2) continue;
      labels.push_back(label);
      dims.push_back(dimension(t.factors[refs[0].factor].kind(refs[0].slot)));
    }
    std::vector<std::vector<std::size_t>> slot_label(t.factors.size());
    for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
      for (const auto& l : t.factors[fi].labels) {
        slot_label[fi].push_back(static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin()));
      }
    }
    const Complex coeff{t.coeff.to_double(), 0.0};
    std::vector<int> idx(labels.size(), 0);
    std::vector<int> sub;
    bool done = false;
    while (!done) {
      Complex prod = coeff;
      for (std::size_t fi = 0; fi < parts.size() && prod != Complex{}; ++fi) {
        sub.clear();
        for (auto l : slot_label[fi]) sub.push_back(idx[l]);
        prod *= parts[fi](sub);
      }
      std::size_t off = 0;
      for (std::size_t k = 0; k < frees.size(); ++k) off += strides[k] * static_cast<std::size_t>(idx[k]);
      out.data()[off] += prod;
      done = true;
      for (std::size_t k = labels.size(); k-- > 0;) {
        if (++idx[k] < dims[k]) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
    }
  }
  return out;
}

Bindings random_bindings(const Expr& e, Rng& rng, const MetricSpinorConvention& conv) {
  Bindings b;
  for (const auto& t : e.terms) {
    for (const auto& f : t.factors) {
      const Kernel& k = *f.kernel;
      if (k.is_metric() || k.is_operator() || b.count(k.key())) continue;
      ComponentSpinor s = random_spinor(IndexSignature(k.slots), rng);
      for (const auto& g : k.symmetries) {
        s = symmetrize_lowered(s, g.slots, g.antisymmetric ? SymmetryMode::Antisymmetric : SymmetryMode::Symmetric,
                               conv);
      }
      b.emplace(k.key(), std::move(s));
    }
  }
  return b;
}

}  // namespace spinwave::symbolic
