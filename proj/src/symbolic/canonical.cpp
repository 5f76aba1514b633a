#include "spinwave/symbolic/canonical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <tuple>
#include <map>
#include <optional>
#include <set>

namespace spinwave::symbolic {

namespace {

int vi(Variance v) { return v == Variance::Up ? 0 : 1; }

int exact_sign(Complex got, Complex expect) {
  const Complex r = got / expect;
  const double n = std::round(r.real());
  if (std::abs(r - Complex{n, 0.0}) > 1e-12 || std::abs(n) != 1.0) {
    throw Error(ErrorKind::Config, "metric spinor convention is not a consistent sign convention");
  }
  return static_cast<int>(n);
}

}  // namespace

ConventionSigns ConventionSigns::from(const MetricSpinorConvention& conv) {
  if (!conv.consistent()) throw Error(ErrorKind::Config, "inconsistent metric spinor convention");
  ConventionSigns sg;
  for (Variance v0 : {Variance::Up, Variance::Down}) {
    for (Variance v1 : {Variance::Up, Variance::Down}) {
      const ComponentSpinor eps = epsilon(IndexKind::Unprimed, v0, v1, conv);
      for (std::size_t i = 0; i < 2; ++i) {
        const Variance in = i == 0 ? v0 : v1;
        const Variance out = i == 0 ? v1 : v0;
        ComponentSpinor xi(IndexSignature{Slot{IndexKind::Unprimed, flipped(in)}});
        xi.at({0}) = 1.0;
        xi.at({1}) = 2.0;
        const ComponentSpinor got = spinwave::contract(outer(eps, xi), i, 2);
        const ComponentSpinor expect = flipped(in) == out ? xi : raise_lower(xi, 0, out, conv);
        const int s0 = exact_sign(got.at({0}), expect.at({0}));
        const int s1 = exact_sign(got.at({1}), expect.at({1}));
        if (s0 != s1) throw Error(ErrorKind::Config, "metric spinor contraction is not a multiple of identity");
        sg.contract[vi(v0)][vi(v1)][i] = s0;
      }
    }
  }
  auto trace = [&](Variance a, Variance b) {
    const Complex t = spinwave::contract(epsilon(IndexKind::Unprimed, a, b, conv), 0, 1).at({});
    return static_cast<int>(std::lround(t.real()));
  };
  sg.trace_up_down = trace(Variance::Up, Variance::Down);
  sg.trace_down_up = trace(Variance::Down, Variance::Up);
  sg.pair = 2 / sg.trace_up_down;
  return sg;
}

std::string fresh_label() {
  static std::atomic<unsigned long> counter{0};
  return "%" + std::to_string(++counter);
}

std::string factor_key(const Term& t) {
  std::string k;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (i) k += ' ';
    k += to_string(t.factors[i]);
  }
  return k;
}

namespace {

using Occ = std::map<std::string, std::vector<SlotRef>>;

bool is_spinor(IndexKind k) { return k != IndexKind::World; }

SlotRef partner_of(const Occ& occ, const std::string& label, SlotRef self) {
  const auto& refs = occ.at(label);
  return refs[0] == self ? refs[1] : refs[0];
}

/// Rename-invariant ordering key of a slot: free labels by name, ahead of
/// dummies, which are ordered by the position of their partner.
struct SlotKey {
  int dummy = 0;
  std::string free;
  SlotRef partner{};
  friend auto operator<=>(const SlotKey&, const SlotKey&) = default;
};

SlotKey key_of(const Term& t, const Occ& occ, SlotRef r) {
  const std::string& label = t.factors[r.factor].labels[r.slot];
  if (occ.at(label).size() == 1) return {0, label, {}};
  return {1, {}, partner_of(occ, label, r)};
}

}  // namespace

void eliminate_metrics(Term& t, const ConventionSigns& sg) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < t.factors.size() && !changed; ++f) {
      const Factor m = t.factors[f];
      if (!m.is_metric()) continue;
      if (m.labels[0] == m.labels[1]) {
        t.coeff *= m.variances[0] == Variance::Up ? sg.trace_up_down : sg.trace_down_up;
        t.factors.erase(t.factors.begin() + static_cast<std::ptrdiff_t>(f));
        changed = true;
        break;
      }
      const Occ occ = occurrences(t);
      for (std::size_t i = 0; i < 2; ++i) {
        if (occ.at(m.labels[i]).size() != 2) continue;
        const SlotRef other = partner_of(occ, m.labels[i], {f, i});
        t.factors[other.factor].labels[other.slot] = m.labels[1 - i];
        t.factors[other.factor].variances[other.slot] = m.variances[1 - i];
        t.coeff *= sg.contract[vi(m.variances[0])][vi(m.variances[1])][i];
        t.factors.erase(t.factors.begin() + static_cast<std::ptrdiff_t>(f));
        changed = true;
        break;
      }
    }
  }
}

namespace {

bool vanishes_by_symmetry(const Term& t) {
  for (const auto& f : t.factors) {
    for (const auto& g : f.groups()) {
      if (!is_spinor(f.kind(g.slots[0]))) continue;
      if (g.antisymmetric && g.slots.size() >= 3) return true;
      if (g.antisymmetric) continue;
      std::set<std::string> seen;
      for (auto s : g.slots) {
        if (!seen.insert(f.labels[s]).second) return true;
      }
    }
  }
  return false;
}

/// Factor order key: kernel and annotations.  Equal keys keep their order
/// here; merge_ties settles them at the end.
std::string shape_key(const Factor& f) {
  std::string k = f.kernel->key();
  for (const auto& g : f.extra) {
    k += g.antisymmetric ? "[" : "(";
    for (auto s : g.slots) k += std::to_string(s);
  }
  return k;
}

/// Metrics first, then the commuting prefix, then the operator word whose
/// trailing operand is sorted.  Factors between operators keep their place.
void order_factors(Term& t) {
  std::vector<std::pair<std::string, std::size_t>> metrics;
  std::vector<std::pair<std::string, std::size_t>> rest;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    (t.factors[i].is_metric() ? metrics : rest).emplace_back(shape_key(t.factors[i]), i);
  }
  std::size_t first_op = rest.size();
  std::size_t last_op = rest.size();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (t.factors[rest[i].second].is_operator()) {
      if (first_op == rest.size()) first_op = i;
      last_op = i;
    }
  }
  auto by_key = [](const auto& a, const auto& b) { return a.first < b.first; };
  std::stable_sort(metrics.begin(), metrics.end(), by_key);
  const auto prefix_end = rest.begin() + static_cast<std::ptrdiff_t>(first_op);
  std::stable_sort(rest.begin(), prefix_end, by_key);
  if (last_op < rest.size()) {
    std::stable_sort(rest.begin() + static_cast<std::ptrdiff_t>(last_op + 1), rest.end(), by_key);
  }
  std::vector<Factor> out;
  out.reserve(t.factors.size());
  for (const auto& m : metrics) out.push_back(t.factors[m.second]);
  for (const auto& r : rest) out.push_back(t.factors[r.second]);
  t.factors = std::move(out);
}

/// The up occurrence of each dummy comes first; moving a spinor see-saw
/// costs a sign.
void seesaw(Term& t) {
  for (const auto& [label, refs] : occurrences(t)) {
    if (refs.size() != 2) continue;
    Factor& a = t.factors[refs[0].factor];
    Factor& b = t.factors[refs[1].factor];
    if (a.variances[refs[0].slot] == Variance::Up) continue;
    a.variances[refs[0].slot] = Variance::Up;
    b.variances[refs[1].slot] = Variance::Down;
    if (is_spinor(a.kind(refs[0].slot))) t.coeff = -t.coeff;
  }
}

int permutation_sign(std::vector<std::size_t> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (p[i] != i) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  }
  return sign;
}

/// Spinor slots of one kind laid out on a line in term order (metric
/// factors excluded), followed by that kind's free labels in descending
/// order.  Every label is a chord; a metric with two free labels is a chord
/// between two free points.
struct Line {
  std::map<SlotRef, int> pos;
  std::map<std::string, int> free_pos;
};

Line make_line(const Term& t, IndexKind kind, const Occ& occ) {
  Line line;
  int n = 0;
  for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
    const Factor& f = t.factors[fi];
    if (f.is_metric()) continue;
    for (std::size_t s = 0; s < f.rank(); ++s) {
      if (f.kind(s) == kind) line.pos[{fi, s}] = n++;
    }
  }
  std::vector<std::string> frees;
  for (const auto& [label, refs] : occ) {
    if (refs.size() == 1 && t.factors[refs[0].factor].kind(refs[0].slot) == kind) frees.push_back(label);
  }
  std::sort(frees.rbegin(), frees.rend());
  for (const auto& f : frees) line.free_pos[f] = n++;
  return line;
}

/// Line position of the far end of the chord through non-metric slot r.
int far_end(const Term& t, const Occ& occ, const Line& line, SlotRef r) {
  const std::string& label = t.factors[r.factor].labels[r.slot];
  if (occ.at(label).size() == 2) return line.pos.at(partner_of(occ, label, r));
  return line.free_pos.at(label);
}

struct Chord {
  int a;
  int b;
  std::vector<SlotRef> slots;  // slots realizing the chord
};

std::vector<Chord> chords(const Term& t, IndexKind kind, const Occ& occ, const Line& line) {
  std::vector<Chord> out;
  for (const auto& [label, refs] : occ) {
    const Factor& f = t.factors[refs[0].factor];
    if (f.kind(refs[0].slot) != kind) continue;
    Chord c;
    if (refs.size() == 2) {
      c = {line.pos.at(refs[0]), line.pos.at(refs[1]), {refs[0], refs[1]}};
    } else if (f.is_metric()) {
      if (refs[0].slot != 0) continue;
      c = {line.free_pos.at(f.labels[0]), line.free_pos.at(f.labels[1]),
           {SlotRef{refs[0].factor, 0}, SlotRef{refs[0].factor, 1}}};
    } else {
      c = {line.pos.at(refs[0]), line.free_pos.at(label), {refs[0]}};
    }
    if (c.a > c.b) std::swap(c.a, c.b);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Chord& x, const Chord& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

bool same_group(const Factor& f, std::size_t a, std::size_t b) {
  for (const auto& g : f.groups()) {
    const bool ha = std::find(g.slots.begin(), g.slots.end(), a) != g.slots.end();
    const bool hb = std::find(g.slots.begin(), g.slots.end(), b) != g.slots.end();
    if (ha && hb) return true;
  }
  return false;
}

/// Sorts every symmetry group.  Spinor groups are arranged so that their
/// chords nest: chords leaving to the left first, then those leaving to the
/// right, each by decreasing far end.  Other groups sort free labels by name
/// ahead of dummies ordered by partner position.
void sort_groups(Term& t) {
  for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
    const std::vector<SymmetryGroup> groups = t.factors[fi].groups();
    for (const auto& g : groups) {
      if (g.slots.size() < 2) continue;
      const Occ occ = occurrences(t);
      Factor& f = t.factors[fi];
      const IndexKind kind = f.kind(g.slots[0]);
      std::vector<std::tuple<int, std::string, long, long>> keys;
      if (is_spinor(kind) && !f.is_metric()) {
        const Line line = make_line(t, kind, occ);
        for (auto s : g.slots) {
          const int own = line.pos.at({fi, s});
          const int far = far_end(t, occ, line, {fi, s});
          keys.emplace_back(far < own ? 0 : 1, std::string{}, -far, 0);
        }
      } else {
        for (auto s : g.slots) {
          const SlotKey k = key_of(t, occ, {fi, s});
          keys.emplace_back(k.dummy, k.free, static_cast<long>(k.partner.factor), static_cast<long>(k.partner.slot));
        }
      }
      std::vector<std::size_t> order(g.slots.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
      std::vector<std::string> labels;
      std::vector<Variance> vars;
      for (auto o : order) {
        labels.push_back(f.labels[g.slots[o]]);
        vars.push_back(f.variances[g.slots[o]]);
      }
      for (std::size_t i = 0; i < order.size(); ++i) {
        f.labels[g.slots[i]] = labels[i];
        f.variances[g.slots[i]] = vars[i];
      }
      if (g.antisymmetric && permutation_sign(order) < 0) t.coeff = -t.coeff;
    }
  }
}

KernelPtr builtin_metric(IndexKind kind) {
  static const KernelTable table = KernelTable::builtin();
  return table.metric(kind);
}

/// Resolves the first crossing pair of chords with the pair identity
///   X[P(p) Q(q)] = X[Q(q) P(p)] + pair * eps_{PQ} X[D^(p) D_(q)]
/// where labels move together with their variance.  Both right-hand terms
/// have fewer crossings.  Returns the trace term, or nothing if no chords
/// cross.
std::optional<Term> uncross_step(Term& t, const ConventionSigns& sg) {
  const Occ occ = occurrences(t);
  for (IndexKind kind : {IndexKind::Unprimed, IndexKind::Primed}) {
    const Line line = make_line(t, kind, occ);
    const std::vector<Chord> cs = chords(t, kind, occ, line);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        const Chord& c1 = cs[i];
        const Chord& c2 = cs[j];
        if (!(c1.a < c2.a && c2.a < c1.b && c1.b < c2.b)) continue;
        for (const SlotRef p : c1.slots) {
          for (const SlotRef q : c2.slots) {
            if (p.factor == q.factor && same_group(t.factors[p.factor], p.slot, q.slot)) continue;
            Factor& fp = t.factors[p.factor];
            Factor& fq = t.factors[q.factor];
            Term trace = t;
            trace.coeff *= sg.pair;
            const std::string d = fresh_label();
            trace.factors[p.factor].labels[p.slot] = d;
            trace.factors[p.factor].variances[p.slot] = Variance::Up;
            trace.factors[q.factor].labels[q.slot] = d;
            trace.factors[q.factor].variances[q.slot] = Variance::Down;
            trace.factors.insert(trace.factors.begin(),
                                 Factor{builtin_metric(kind),
                                        {fp.labels[p.slot], fq.labels[q.slot]},
                                        {fp.variances[p.slot], fq.variances[q.slot]},
                                        {}});
            std::swap(fp.labels[p.slot], fq.labels[q.slot]);
            std::swap(fp.variances[p.slot], fq.variances[q.slot]);
            return trace;
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::string next_name(IndexKind kind, std::size_t& counter, const std::set<std::string>& taken) {
  for (;; ++counter) {
    const std::size_t letter = counter % 26;
    const std::size_t round = counter / 26;
    std::string name(1, static_cast<char>((kind == IndexKind::World ? 'a' : 'A') + letter));
    if (round > 0) name += std::to_string(round);
    if (kind == IndexKind::Primed) name += '\'';
    if (!taken.count(name)) {
      ++counter;
      return name;
    }
  }
}

void rename_dummies(Term& t) {
  const Occ occ = occurrences(t);
  std::set<std::string> taken;
  for (const auto& [label, refs] : occ) {
    if (refs.size() == 1) taken.insert(label);
  }
  std::map<std::string, std::string> rename;
  std::size_t counters[3] = {0, 0, 0};
  for (const auto& f : t.factors) {
    for (std::size_t s = 0; s < f.rank(); ++s) {
      const std::string& l = f.labels[s];
      if (occ.at(l).size() != 2 || rename.count(l)) continue;
      const IndexKind k = f.kind(s);
      rename[l] = next_name(k, counters[static_cast<int>(k)], taken);
    }
  }
  for (auto& f : t.factors) {
    for (auto& l : f.labels) {
      if (auto it = rename.find(l); it != rename.end()) l = it->second;
    }
  }
}

/// An antisymmetric pair of spinor slots is a multiple of the metric:
///   X[P(p) Q(q)] = pair/2 * eps_{PQ} X[D^(p) D_(q)].
/// Rewrites every such pair into its trace form.
void reduce_antisymmetric_pairs(Term& t, const ConventionSigns& sg) {
  for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
    if (t.factors[fi].is_metric()) continue;
    for (const auto& g : t.factors[fi].groups()) {
      if (!g.antisymmetric || g.slots.size() != 2 || !is_spinor(t.factors[fi].kind(g.slots[0]))) continue;
      Factor& f = t.factors[fi];
      const std::size_t p = g.slots[0];
      const std::size_t q = g.slots[1];
      if (f.labels[p] == f.labels[q]) continue;
      Factor eps{builtin_metric(f.kind(p)), {f.labels[p], f.labels[q]}, {f.variances[p], f.variances[q]}, {}};
      const std::string d = fresh_label();
      f.labels[p] = d;
      f.variances[p] = Variance::Up;
      f.labels[q] = d;
      f.variances[q] = Variance::Down;
      t.coeff *= Rational(sg.pair, 2);
      t.factors.insert(t.factors.begin(), std::move(eps));
      ++fi;
    }
  }
}

int count_crossings(const Term& t) {
  const Occ occ = occurrences(t);
  int n = 0;
  for (IndexKind kind : {IndexKind::Unprimed, IndexKind::Primed}) {
    const Line line = make_line(t, kind, occ);
    const std::vector<Chord> cs = chords(t, kind, occ, line);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        if (cs[i].a < cs[j].a && cs[j].a < cs[i].b && cs[i].b < cs[j].b) ++n;
      }
    }
  }
  return n;
}

void sort_metrics(Term& t) {
  const auto end = std::find_if(t.factors.begin(), t.factors.end(), [](const Factor& f) { return !f.is_metric(); });
  std::stable_sort(t.factors.begin(), end,
                   [](const Factor& a, const Factor& b) { return to_string(a) < to_string(b); });
}

constexpr int kMaxSortPasses = 16;
constexpr std::size_t kMaxWork = 500000;

/// Exact single-term simplifications that keep the factor order (apart from
/// the initial ordering when `reorder` is set).  Returns false if the term
/// vanishes.
bool prenormalize(Term& t, const ConventionSigns& sg, bool reorder) {
  eliminate_metrics(t, sg);
  reduce_antisymmetric_pairs(t, sg);
  eliminate_metrics(t, sg);
  if (t.coeff.is_zero()) return false;
  if (reorder) order_factors(t);
  for (int pass = 0; pass < kMaxSortPasses; ++pass) {
    const std::vector<Factor> before = t.factors;
    seesaw(t);
    sort_groups(t);
    bool same = true;
    for (std::size_t i = 0; i < before.size() && same; ++i) {
      same = before[i].labels == t.factors[i].labels && before[i].variances == t.factors[i].variances;
    }
    if (same) break;
  }
  seesaw(t);
  if (vanishes_by_symmetry(t)) return false;
  sort_metrics(t);
  rename_dummies(t);
  return true;
}

/// Expands every term over the non-crossing basis of its own factor order.
/// Pending terms are processed in order of decreasing crossing number, so
/// all copies of an intermediate term are merged before it is split.
std::map<std::string, Term> expand_fixed_order(std::vector<Term> input, const ConventionSigns& sg, bool reorder) {
  using Key = std::pair<int, std::string>;
  std::map<Key, Term, std::greater<>> pending;
  std::map<std::string, Term> done;
  auto push = [&](Term t, bool first) {
    if (t.coeff.is_zero() || !prenormalize(t, sg, first && reorder)) return;
    Key key{count_crossings(t), factor_key(t)};
    auto it = pending.find(key);
    if (it == pending.end()) {
      pending.emplace(std::move(key), std::move(t));
    } else {
      it->second.coeff += t.coeff;
    }
  };
  for (auto& t : input) push(std::move(t), true);
  std::size_t processed = 0;
  while (!pending.empty()) {
    if (++processed > kMaxWork) {
      throw Error(ErrorKind::UnsupportedExpression, "canonicalization exceeded its work budget");
    }
    auto node = pending.extract(pending.begin());
    Term t = std::move(node.mapped());
    if (t.coeff.is_zero()) continue;
    if (node.key().first == 0) {
      auto it = done.find(node.key().second);
      if (it == done.end()) {
        done.emplace(node.key().second, std::move(t));
      } else {
        it->second.coeff += t.coeff;
      }
      continue;
    }
    auto trace = uncross_step(t, sg);
    if (!trace) throw Error(ErrorKind::UnsupportedExpression, "crossing chords could not be resolved");
    push(std::move(t), false);
    push(std::move(*trace), false);
  }
  return done;
}

/// Factors that may trade places: same kernel and annotations, in the
/// commuting prefix or in the trailing operand.
std::vector<std::vector<std::size_t>> tie_classes(const Term& t) {
  std::size_t first_op = t.factors.size();
  std::size_t last_op = t.factors.size();
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (t.factors[i].is_operator()) {
      if (first_op == t.factors.size()) first_op = i;
      last_op = i;
    }
  }
  std::vector<std::vector<std::size_t>> out;
  auto scan = [&](std::size_t b, std::size_t e) {
    std::map<std::string, std::vector<std::size_t>> by;
    for (std::size_t i = b; i < e; ++i) {
      const Factor& f = t.factors[i];
      if (!f.is_metric()) by[shape_key(f)].push_back(i);
    }
    for (auto& [k, v] : by) {
      if (v.size() > 1) out.push_back(std::move(v));
    }
  };
  scan(0, first_op);
  if (last_op < t.factors.size()) scan(last_op + 1, t.factors.size());
  return out;
}

constexpr std::size_t kMaxTiePermutations = 720;

/// Calls `visit` on `t` with its interchangeable factors in every order.
template <class Visit>
void for_each_tie_order(const Term& t, Visit&& visit) {
  const auto classes = tie_classes(t);
  std::vector<std::vector<std::size_t>> perms = classes;
  for (std::size_t tried = 0; tried < kMaxTiePermutations; ++tried) {
    Term p = t;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (std::size_t i = 0; i < classes[c].size(); ++i) p.factors[classes[c][i]] = t.factors[perms[c][i]];
    }
    visit(p);
    std::size_t c = 0;
    for (; c < perms.size(); ++c) {
      if (std::next_permutation(perms[c].begin(), perms[c].end())) break;
    }
    if (c == perms.size()) break;
  }
}

/// Printed form up to an overall factor: coefficients relative to the first.
std::string printed(const std::map<std::string, Term>& terms) {
  std::string out;
  for (const auto& [key, t] : terms) out += key + ' ' + (t.coeff / terms.begin()->second.coeff).str() + ';';
  return out;
}

/// Among the orderings of interchangeable factors that keep a non-crossing
/// term a single product, picks the one with the smallest printed form.
/// A term mapped onto a different multiple of itself vanishes.
Term merge_ties(const Term& t, const ConventionSigns& sg) {
  Term best = t;
  const std::string own_key = factor_key(t);
  std::string best_key = own_key;
  bool vanishes = false;
  for_each_tie_order(t, [&](const Term& p) {
    auto r = expand_fixed_order({p}, sg, false);
    if (r.size() != 1) return;
    const auto& [key, image] = *r.begin();
    if (key == own_key && image.coeff != t.coeff) vanishes = true;
    if (key < best_key) {
      best_key = key;
      best = image;
    }
  });
  if (vanishes) best.coeff = Rational(0);
  return best;
}

/// Expansion of one input term: over all orders of interchangeable factors,
/// the one with fewest terms, then smallest printed form.  Every order
/// expands the same polynomial, so two expansions that agree up to a factor
/// other than one prove it zero.
std::map<std::string, Term> expand_term(Term t, const ConventionSigns& sg) {
  if (!prenormalize(t, sg, true)) return {};
  std::map<std::string, Term> best;
  std::string best_print;
  bool have = false;
  bool zero = false;
  std::map<std::string, Rational> lead;
  for_each_tie_order(t, [&](const Term& p) {
    if (zero) return;
    auto r = expand_fixed_order({p}, sg, false);
    if (r.empty()) {
      zero = true;
      return;
    }
    std::string pr = printed(r);
    const Rational c = r.begin()->second.coeff;
    if (auto [it, fresh] = lead.emplace(pr, c); !fresh && it->second != c) {
      zero = true;
      return;
    }
    if (!have || r.size() < best.size() || (r.size() == best.size() && pr < best_print)) {
      best = std::move(r);
      best_print = std::move(pr);
      have = true;
    }
  });
  if (zero) return {};
  return best;
}

}  // namespace

namespace {

std::map<std::string, Term> canonical_terms(const std::vector<Term>& terms, const ConventionSigns& sg) {
  std::map<std::string, Term> acc;
  for (const Term& input : terms) {
    for (auto& [key, t] : expand_term(input, sg)) {
      Term m = merge_ties(t, sg);
      if (m.coeff.is_zero()) continue;
      const std::string k = factor_key(m);
      auto it = acc.find(k);
      if (it == acc.end()) {
        acc.emplace(k, std::move(m));
      } else {
        it->second.coeff += m.coeff;
      }
    }
  }
  std::erase_if(acc, [](const auto& kv) { return kv.second.coeff.is_zero(); });
  return acc;
}

/// A term odd under exchange of two free spinor indices on field factors
/// (through swapping identical factors) equals pair/2 eps_PQ times its trace.
/// Returns the replacement, or nothing if no such pair exists.
std::optional<Term> reduce_odd_free_pair(const Term& t, const ConventionSigns& sg) {
  std::vector<SlotRef> frees;
  for (const auto& [label, refs] : occurrences(t)) {
    if (refs.size() == 1 && !t.factors[refs[0].factor].is_metric() && is_spinor(label_kind(label))) {
      frees.push_back(refs[0]);
    }
  }
  for (std::size_t i = 0; i < frees.size(); ++i) {
    for (std::size_t j = i + 1; j < frees.size(); ++j) {
      const SlotRef p = frees[i];
      const SlotRef q = frees[j];
      const Factor& fp = t.factors[p.factor];
      const Factor& fq = t.factors[q.factor];
      if (fp.kind(p.slot) != fq.kind(q.slot)) continue;
      Term swapped = t;
      std::swap(swapped.factors[p.factor].labels[p.slot], swapped.factors[q.factor].labels[q.slot]);
      std::swap(swapped.factors[p.factor].variances[p.slot], swapped.factors[q.factor].variances[q.slot]);
      const auto image = canonical_terms({swapped}, sg);
      if (image.size() != 1) continue;
      const Term& im = image.begin()->second;
      if (factor_key(im) != factor_key(t) || im.coeff != -t.coeff) continue;
      Term out = t;
      Factor eps{builtin_metric(fp.kind(p.slot)), {fp.labels[p.slot], fq.labels[q.slot]},
                 {fp.variances[p.slot], fq.variances[q.slot]}, {}};
      const std::string d = fresh_label();
      out.factors[p.factor].labels[p.slot] = d;
      out.factors[p.factor].variances[p.slot] = Variance::Up;
      out.factors[q.factor].labels[q.slot] = d;
      out.factors[q.factor].variances[q.slot] = Variance::Down;
      out.coeff *= Rational(sg.pair, 2);
      out.factors.insert(out.factors.begin(), std::move(eps));
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

Expr canonicalize(const Expr& e, const MetricSpinorConvention& conv) {
  const ConventionSigns sg = ConventionSigns::from(conv);
  std::map<std::string, Term> acc = canonical_terms(e.terms, sg);
  // each reduction moves two frees onto a metric, so this terminates
  while (true) {
    std::vector<Term> next;
    bool changed = false;
    for (const auto& [key, t] : acc) {
      if (auto r = reduce_odd_free_pair(t, sg)) {
        next.push_back(std::move(*r));
        changed = true;
      } else {
        next.push_back(t);
      }
    }
    if (!changed) break;
    acc = canonical_terms(next, sg);
  }
  Expr out;
  for (auto& [key, t] : acc) out.terms.push_back(std::move(t));
  return out;
}

}  // namespace spinwave::symbolic
