#include "spinwave/symbolic/kernel.hpp"

#include <cctype>

namespace spinwave::symbolic {

IndexKind label_kind(const std::string& label) {
  if (label.empty()) throw Error(ErrorKind::Parse, "empty index label");
  if (label.back() == '\'') return IndexKind::Primed;
  if (std::islower(static_cast<unsigned char>(label.front()))) return IndexKind::World;
  return IndexKind::Unprimed;
}

namespace {

char kind_code(IndexKind k) {
  switch (k) {
    case IndexKind::Unprimed: return 'U';
    case IndexKind::Primed: return 'P';
    case IndexKind::World: return 'W';
  }
  return '?';
}

}  // namespace

std::string Kernel::key() const {
  std::string k = name + "[";
  for (const auto& s : slots) k += kind_code(s.kind);
  return k + "]";
}

std::pair<Rational, Rational> Kernel::weight_at(const std::vector<Variance>& variances) const {
  Rational w = weight;
  Rational aw = antiweight;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (variances.at(i) == slots[i].variance) continue;
    const Rational shift = variances[i] == Variance::Up ? Rational(1) : Rational(-1);
    if (slots[i].kind == IndexKind::Unprimed) w += shift;
    if (slots[i].kind == IndexKind::Primed) aw += shift;
  }
  return {w, aw};
}

const SymmetryGroup* Kernel::group_of(std::size_t slot) const {
  for (const auto& g : symmetries) {
    for (auto s : g.slots) {
      if (s == slot) return &g;
    }
  }
  return nullptr;
}

std::pair<Rational, Rational> natural_weight(const std::vector<Slot>& slots) {
  Rational w;
  Rational aw;
  for (const auto& s : slots) {
    const Rational half = s.variance == Variance::Up ? Rational(1, 2) : Rational(-1, 2);
    if (s.kind == IndexKind::Unprimed) w += half;
    if (s.kind == IndexKind::Primed) aw += half;
  }
  return {w, aw};
}

KernelTable KernelTable::builtin() {
  using K = IndexKind;
  using V = Variance;
  KernelTable t;
  auto add = [&](std::string name, std::vector<Slot> slots, std::vector<SymmetryGroup> sym,
                 KernelRole role, std::optional<std::pair<Rational, Rational>> w = std::nullopt) {
    Kernel k;
    k.name = std::move(name);
    k.slots = std::move(slots);
    k.symmetries = std::move(sym);
    k.role = role;
    const auto weights = w ? *w : natural_weight(k.slots);
    k.weight = weights.first;
    k.antiweight = weights.second;
    t.declare(std::move(k));
  };
  const SymmetryGroup pair_sym{{0, 1}, false};
  const SymmetryGroup pair_anti{{0, 1}, true};

  // eps_{AB}: weight -1; eps_{A'B'}: antiweight -1
  add("eps", {{K::Unprimed, V::Down}, {K::Unprimed, V::Down}}, {pair_anti}, KernelRole::Metric);
  add("eps", {{K::Primed, V::Down}, {K::Primed, V::Down}}, {pair_anti}, KernelRole::Metric);
  // phi_A^B: invariant, weight 0
  add("phi", {{K::Unprimed, V::Down}, {K::Unprimed, V::Up}}, {pair_sym}, KernelRole::Field);
  add("phi", {{K::Primed, V::Down}, {K::Primed, V::Up}}, {pair_sym}, KernelRole::Field);
  // Psi_{ABCD}, omega_{ABCD}: weight -2 all-down
  add("Psi", {{K::Unprimed, V::Down}, {K::Unprimed, V::Down}, {K::Unprimed, V::Down}, {K::Unprimed, V::Down}},
      {SymmetryGroup{{0, 1, 2, 3}, false}}, KernelRole::Field);
  add("omega", {{K::Unprimed, V::Down}, {K::Unprimed, V::Down}, {K::Unprimed, V::Down}, {K::Unprimed, V::Down}},
      {}, KernelRole::Field);
  add("R", {}, {}, KernelRole::Field);
  // nabla_{AA'}: weight and antiweight -1/2, so Box is weight 0 and
  // Delta^{AB} is weight +1
  add("nabla", {{K::Unprimed, V::Down}, {K::Primed, V::Down}}, {}, KernelRole::Operator);
  add("nabla", {{K::World, V::Down}}, {}, KernelRole::Operator);
  add("Delta", {{K::Unprimed, V::Up}, {K::Unprimed, V::Up}}, {pair_sym}, KernelRole::Operator);
  add("Box", {}, {}, KernelRole::Operator);
  // vartheta_{a(BC)}: weight -1; raised pair weight +1
  add("vartheta", {{K::World, V::Down}, {K::Unprimed, V::Down}, {K::Unprimed, V::Down}},
      {SymmetryGroup{{1, 2}, false}}, KernelRole::Field);
  return t;
}

void KernelTable::declare(Kernel kernel) {
  for (const auto& g : kernel.symmetries) {
    for (auto s : g.slots) {
      if (s >= kernel.slots.size()) throw Error(ErrorKind::Index, "symmetry slot out of range");
      if (kernel.slots[s].kind != kernel.slots[g.slots[0]].kind) {
        throw Error(ErrorKind::Index, "symmetry group mixes index kinds in " + kernel.name);
      }
    }
  }
  auto& variants = kernels_[kernel.name];
  const std::string key = kernel.key();
  for (auto& v : variants) {
    if (v->key() == key) {
      v = std::make_shared<const Kernel>(std::move(kernel));
      return;
    }
  }
  variants.push_back(std::make_shared<const Kernel>(std::move(kernel)));
}

std::optional<std::pair<KernelPtr, std::vector<std::size_t>>> KernelTable::resolve(
    const std::string& name, const std::vector<IndexKind>& kinds) const {
  const auto it = kernels_.find(name);
  if (it == kernels_.end()) return std::nullopt;
  for (const auto& k : it->second) {
    if (k->slots.size() != kinds.size()) continue;
    // written labels fill template slots of their kind in order
    std::vector<std::size_t> assign(kinds.size());
    std::vector<bool> used(kinds.size(), false);
    bool ok = true;
    for (std::size_t w = 0; w < kinds.size() && ok; ++w) {
      ok = false;
      for (std::size_t s = 0; s < k->slots.size(); ++s) {
        if (!used[s] && k->slots[s].kind == kinds[w]) {
          used[s] = true;
          assign[w] = s;
          ok = true;
          break;
        }
      }
    }
    if (ok) return std::make_pair(k, assign);
  }
  return std::nullopt;
}

std::pair<KernelPtr, std::vector<std::size_t>> KernelTable::resolve_or_declare(
    const std::string& name, const std::vector<Slot>& written) {
  std::vector<IndexKind> kinds;
  for (const auto& s : written) kinds.push_back(s.kind);
  if (auto found = resolve(name, kinds)) return *found;
  Kernel k;
  k.name = name;
  k.slots = written;
  const auto w = natural_weight(written);
  k.weight = w.first;
  k.antiweight = w.second;
  declare(std::move(k));
  return *resolve(name, kinds);
}

KernelPtr KernelTable::metric(IndexKind kind) const {
  const auto found = resolve("eps", {kind, kind});
  if (!found) throw Error(ErrorKind::Index, "no metric spinor for this index kind");
  return found->first;
}

}  // namespace spinwave::symbolic
