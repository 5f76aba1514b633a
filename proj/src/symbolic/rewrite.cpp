#include "spinwave/symbolic/rewrite.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace spinwave::symbolic {

namespace {

using Occ = std::map<std::string, std::vector<SlotRef>>;

bool is_spinor(IndexKind k) { return k != IndexKind::World; }

void lower_frees(Term& t) {
  for (const auto& [label, refs] : occurrences(t)) {
    if (refs.size() != 1) continue;
    Factor& f = t.factors[refs[0].factor];
    if (is_spinor(f.kind(refs[0].slot))) f.variances[refs[0].slot] = Variance::Down;
  }
}

bool has_operator(const Term& t) {
  return std::any_of(t.factors.begin(), t.factors.end(), [](const Factor& f) { return f.is_operator(); });
}

int permutation_sign(const std::vector<std::size_t>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

/// All slot maps of one factor onto itself allowed by its symmetry groups,
/// with their signs.  Slots outside every group map to themselves.
std::vector<std::pair<std::vector<std::size_t>, int>> slot_maps(const Factor& f) {
  std::vector<std::pair<std::vector<std::size_t>, int>> out;
  std::vector<std::size_t> id(f.rank());
  std::iota(id.begin(), id.end(), 0);
  out.emplace_back(id, 1);
  for (const auto& g : f.groups()) {
    std::vector<std::pair<std::vector<std::size_t>, int>> next;
    std::vector<std::size_t> perm(g.slots.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      const int s = g.antisymmetric ? permutation_sign(perm) : 1;
      for (const auto& [m, sign] : out) {
        std::vector<std::size_t> m2 = m;
        for (std::size_t i = 0; i < perm.size(); ++i) m2[g.slots[i]] = m[g.slots[perm[i]]];
        next.emplace_back(std::move(m2), sign * s);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    out = std::move(next);
  }
  return out;
}

bool same_shape(const Factor& p, const Factor& t) {
  if (p.kernel->key() != t.kernel->key()) return false;
  auto norm = [](std::vector<SymmetryGroup> g) {
    for (auto& x : g) std::sort(x.slots.begin(), x.slots.end());
    std::sort(g.begin(), g.end(), [](const SymmetryGroup& a, const SymmetryGroup& b) {
      return std::tie(a.slots, a.antisymmetric) < std::tie(b.slots, b.antisymmetric);
    });
    return g;
  };
  return norm(p.extra) == norm(t.extra);
}

struct Matcher {
  const Term& t;
  const PreparedRule& rule;
  const ConventionSigns& sg;
  Occ occ_t;
  Occ occ_p;

  Matcher(const Term& term, const PreparedRule& r, const ConventionSigns& s)
      : t(term), rule(r), sg(s), occ_t(occurrences(term)), occ_p(occurrences(r.pattern)) {}

  /// Tries one factor alignment (pattern factor i -> term factor align[i]).
  std::optional<Expr> try_alignment(const std::vector<std::size_t>& align, std::size_t insert_at) const {
    const auto& pf = rule.pattern.factors;
    for (std::size_t i = 0; i < pf.size(); ++i) {
      if (!same_shape(pf[i], t.factors[align[i]])) return std::nullopt;
    }
    std::vector<std::vector<std::pair<std::vector<std::size_t>, int>>> maps;
    for (const auto& f : pf) maps.push_back(slot_maps(f));
    std::vector<std::size_t> pick(pf.size(), 0);
    while (true) {
      if (auto r = try_slots(align, maps, pick, insert_at)) return r;
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == maps[k].size()) pick[k++] = 0;
      if (k == pick.size()) return std::nullopt;
    }
  }

  std::optional<Expr> try_slots(const std::vector<std::size_t>& align,
                                const std::vector<std::vector<std::pair<std::vector<std::size_t>, int>>>& maps,
                                const std::vector<std::size_t>& pick, std::size_t insert_at) const {
    Rational coeff = t.coeff / rule.pattern.coeff;
    std::map<SlotRef, SlotRef> image;  // pattern slot -> term slot
    std::set<SlotRef> in_s;
    for (std::size_t i = 0; i < align.size(); ++i) {
      const auto& [m, sign] = maps[i][pick[i]];
      coeff *= sign;
      for (std::size_t s = 0; s < m.size(); ++s) {
        image[{i, s}] = {align[i], m[s]};
        in_s.insert({align[i], m[s]});
      }
    }
    std::map<SlotRef, SlotRef> preimage;
    for (const auto& [p, q] : image) preimage[q] = p;

    Term work = t;
    auto label_at = [&](SlotRef r) -> const std::string& { return t.factors[r.factor].labels[r.slot]; };
    auto var_at = [&](SlotRef r) { return t.factors[r.factor].variances[r.slot]; };
    auto set_at = [&](SlotRef r, const std::string& l, Variance v) {
      work.factors[r.factor].labels[r.slot] = l;
      work.factors[r.factor].variances[r.slot] = v;
    };
    std::map<std::string, std::string> beta;
    std::vector<std::string> raise_back;
    std::vector<Factor> metrics;
    std::set<std::string> handled;

    for (const auto& [plabel, prefs] : occ_p) {
      const Factor& pfac = rule.pattern.factors[prefs[0].factor];
      const IndexKind kind = pfac.kind(prefs[0].slot);
      if (prefs.size() == 2) {
        const SlotRef x = image.at(prefs[0]);
        const SlotRef y = image.at(prefs[1]);
        if (label_at(x) != label_at(y)) return std::nullopt;
        const Variance px = pfac.variances[prefs[0].slot];
        if (var_at(x) != px) {
          if (!is_spinor(kind)) return std::nullopt;
          coeff = -coeff;
        }
        continue;
      }
      const SlotRef x = image.at(prefs[0]);
      const std::string& label = label_at(x);
      const Variance pv = pfac.variances[prefs[0].slot];
      const auto& trefs = occ_t.at(label);
      if (!is_spinor(kind)) {
        if (var_at(x) != pv) return std::nullopt;
        if (trefs.size() == 2) {
          const SlotRef y = trefs[0] == x ? trefs[1] : trefs[0];
          if (in_s.count(y)) return std::nullopt;
        }
        beta[plabel] = label;
        continue;
      }
      if (trefs.size() == 1) {
        if (var_at(x) == Variance::Up) {
          set_at(x, label, Variance::Down);
          raise_back.push_back(label);
        }
        beta[plabel] = label;
        continue;
      }
      const SlotRef y = trefs[0] == x ? trefs[1] : trefs[0];
      if (!in_s.count(y)) {
        if (var_at(x) == Variance::Up) {
          set_at(x, label, Variance::Down);
          set_at(y, label, Variance::Up);
          coeff = -coeff;
        }
        beta[plabel] = label;
        continue;
      }
      // Both occurrences inside the match: they must be two pattern frees,
      // both down.  The up one is lowered through a metric spinor left outside.
      const SlotRef py = preimage.at(y);
      const std::string& plabel_y = rule.pattern.factors[py.factor].labels[py.slot];
      if (occ_p.at(plabel_y).size() != 1) return std::nullopt;
      if (handled.count(label)) continue;
      handled.insert(label);
      const SlotRef up = var_at(x) == Variance::Up ? x : y;
      const SlotRef down = up == x ? y : x;
      const std::string g = fresh_label();
      set_at(up, g, Variance::Down);
      metrics.push_back({metric_kernel(kind), {g, label}, {Variance::Up, Variance::Up}, {}});
      coeff *= sg.contract[0][0][0];
      const SlotRef p_up = preimage.at(up);
      const SlotRef p_down = preimage.at(down);
      beta[rule.pattern.factors[p_up.factor].labels[p_up.slot]] = g;
      beta[rule.pattern.factors[p_down.factor].labels[p_down.slot]] = label;
    }

    std::vector<std::size_t> removed = align;
    std::sort(removed.rbegin(), removed.rend());
    for (auto i : removed) work.factors.erase(work.factors.begin() + static_cast<std::ptrdiff_t>(i));
    if (insert_at > work.factors.size()) insert_at = work.factors.size();

    Expr out;
    for (const Term& q : rule.replacement.terms) {
      std::map<std::string, std::string> rename = beta;
      for (const auto& [label, refs] : occurrences(q)) {
        if (refs.size() == 2) rename[label] = fresh_label();
      }
      std::vector<Factor> inserted = q.factors;
      for (auto& f : inserted) {
        for (auto& l : f.labels) l = rename.at(l);
      }
      Term n;
      n.coeff = coeff * q.coeff;
      n.factors = metrics;
      n.factors.insert(n.factors.end(), work.factors.begin(),
                       work.factors.begin() + static_cast<std::ptrdiff_t>(insert_at));
      n.factors.insert(n.factors.end(), inserted.begin(), inserted.end());
      n.factors.insert(n.factors.end(), work.factors.begin() + static_cast<std::ptrdiff_t>(insert_at),
                       work.factors.end());
      const Occ occ_n = occurrences(n);
      for (const auto& l : raise_back) {
        const SlotRef r = occ_n.at(l).front();
        n.factors[r.factor].variances[r.slot] = Variance::Up;
      }
      out.terms.push_back(std::move(n));
    }
    return out;
  }

  static KernelPtr metric_kernel(IndexKind kind) {
    static const KernelTable table = KernelTable::builtin();
    return table.metric(kind);
  }
};

/// Calls `visit` with every ordered choice of `k` distinct entries of `pool`.
template <class Visit>
bool choose_ordered(const std::vector<std::size_t>& pool, std::size_t k, std::vector<std::size_t>& chosen,
                    Visit&& visit) {
  if (chosen.size() == k) return visit(chosen);
  for (auto i : pool) {
    if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
    chosen.push_back(i);
    if (choose_ordered(pool, k, chosen, visit)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace

PreparedRule prepare_rule(const RewriteRule& rule, const MetricSpinorConvention& conv) {
  const ConventionSigns sg = ConventionSigns::from(conv);
  auto fail = [&](const std::string& why) {
    return Error(ErrorKind::InvalidRule, "rule " + rule.name + ": " + why);
  };
  if (rule.pattern.terms.size() != 1) throw fail("pattern must be a single product");
  PreparedRule out;
  out.name = rule.name;
  out.pattern = rule.pattern.terms.front();
  try {
    validate(rule.pattern);
    validate(rule.replacement);
  } catch (const Error& e) {
    throw fail(e.what());
  }
  if (out.pattern.coeff.is_zero()) throw fail("pattern has zero coefficient");
  if (!rule.replacement.is_zero()) {
    if (free_indices(out.pattern) != free_indices(rule.replacement.terms.front())) {
      throw fail("pattern and replacement have different free indices");
    }
    if (weight_of(out.pattern) != weight_of(rule.replacement)) {
      throw fail("pattern and replacement have different (weight, antiweight)");
    }
  }
  eliminate_metrics(out.pattern, sg);
  for (const auto& f : out.pattern.factors) {
    if (f.is_metric()) throw fail("pattern keeps a metric spinor on free indices");
  }
  if (out.pattern.factors.empty()) throw fail("pattern has no factors");
  lower_frees(out.pattern);
  out.replacement = rule.replacement;
  for (auto& q : out.replacement.terms) lower_frees(q);

  const auto& pf = out.pattern.factors;
  if (!has_operator(out.pattern)) {
    out.shape = PreparedRule::Shape::Algebraic;
    for (const auto& q : out.replacement.terms) {
      if (has_operator(q)) throw fail("replacement of an algebraic pattern introduces an operator");
    }
  } else if (pf.back().is_operator()) {
    out.shape = PreparedRule::Shape::OperatorRun;
  } else {
    out.shape = PreparedRule::Shape::Suffix;
    std::size_t h = pf.size();
    while (!pf[h - 1].is_operator()) --h;
    out.head = h;
  }
  return out;
}

std::optional<Expr> apply_rule(const Term& t, const PreparedRule& rule, const ConventionSigns& sg) {
  const Matcher m(t, rule, sg);
  const auto& pf = rule.pattern.factors;
  const std::size_t k = pf.size();
  std::optional<Expr> found;

  switch (rule.shape) {
    case PreparedRule::Shape::Algebraic: {
      // group field factors by the operators standing to their left
      std::map<std::size_t, std::vector<std::size_t>> by_depth;
      std::size_t depth = 0;
      for (std::size_t i = 0; i < t.factors.size(); ++i) {
        const Factor& f = t.factors[i];
        if (f.is_operator()) {
          ++depth;
        } else if (!f.is_metric()) {
          by_depth[depth].push_back(i);
        }
      }
      for (const auto& [d, pool] : by_depth) {
        std::vector<std::size_t> chosen;
        if (choose_ordered(pool, k, chosen, [&](const std::vector<std::size_t>& align) {
              const std::size_t at = *std::min_element(align.begin(), align.end());
              found = m.try_alignment(align, at);
              return found.has_value();
            })) {
          return found;
        }
      }
      return std::nullopt;
    }
    case PreparedRule::Shape::OperatorRun: {
      for (std::size_t start = 0; start + k <= t.factors.size(); ++start) {
        std::vector<std::size_t> align(k);
        std::iota(align.begin(), align.end(), start);
        if (std::any_of(align.begin(), align.end(), [&](std::size_t i) { return t.factors[i].is_metric(); })) {
          continue;
        }
        if ((found = m.try_alignment(align, start))) return found;
      }
      return std::nullopt;
    }
    case PreparedRule::Shape::Suffix: {
      if (t.factors.size() < k) return std::nullopt;
      const std::size_t start = t.factors.size() - k;
      std::vector<std::size_t> head(rule.head);
      std::iota(head.begin(), head.end(), start);
      std::vector<std::size_t> tail(k - rule.head);
      std::iota(tail.begin(), tail.end(), start + rule.head);
      for (auto i : head) {
        if (t.factors[i].is_metric()) return std::nullopt;
      }
      for (auto i : tail) {
        if (t.factors[i].is_operator() || t.factors[i].is_metric()) return std::nullopt;
      }
      do {
        std::vector<std::size_t> align = head;
        align.insert(align.end(), tail.begin(), tail.end());
        if ((found = m.try_alignment(align, start))) return found;
      } while (std::next_permutation(tail.begin(), tail.end()));
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string VerifyReport::trace_text() const {
  std::ostringstream os;
  os << "difference: " << difference << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& s = trace[i];
    os << "step " << (i + 1) << ": " << s.rule << '\n';
    os << "  term:   " << s.term << '\n';
    os << "  becomes: " << s.replacement << '\n';
    os << "  result: " << s.result << '\n';
  }
  if (step_limit_hit) os << "step limit reached\n";
  os << "residual: " << residual << '\n';
  os << (success ? "verified" : "not verified") << '\n';
  return os.str();
}

VerifyReport verify_identity(const Expr& lhs, const Expr& rhs, const std::vector<RewriteRule>& rules,
                             const MetricSpinorConvention& conv, std::size_t max_steps) {
  validate(lhs);
  validate(rhs);
  if (!lhs.is_zero() && !rhs.is_zero()) {
    if (free_indices(lhs.terms.front()) != free_indices(rhs.terms.front())) {
      throw Error(ErrorKind::IllPosedIdentity, "the two sides have different free indices");
    }
    if (weight_of(lhs) != weight_of(rhs)) {
      throw Error(ErrorKind::Weight, "the two sides have different (weight, antiweight)");
    }
  }
  const ConventionSigns sg = ConventionSigns::from(conv);
  std::vector<PreparedRule> prepared;
  for (const auto& r : rules) prepared.push_back(prepare_rule(r, conv));

  VerifyReport report;
  Expr current = canonicalize(lhs - rhs, conv);
  report.difference = to_string(current);
  std::size_t steps = 0;
  while (!current.is_zero()) {
    if (steps == max_steps) {
      report.step_limit_hit = true;
      break;
    }
    bool applied = false;
    for (std::size_t ti = 0; ti < current.terms.size() && !applied; ++ti) {
      for (const auto& rule : prepared) {
        auto repl = apply_rule(current.terms[ti], rule, sg);
        if (!repl) continue;
        Expr rest;
        for (std::size_t j = 0; j < current.terms.size(); ++j) {
          if (j != ti) rest.terms.push_back(current.terms[j]);
        }
        RewriteStep step;
        step.rule = rule.name;
        step.term = to_string(Expr{{current.terms[ti]}});
        step.replacement = to_string(canonicalize(*repl, conv));
        current = canonicalize(rest + *repl, conv);
        step.result = to_string(current);
        report.trace.push_back(std::move(step));
        applied = true;
        break;
      }
    }
    if (!applied) break;
    ++steps;
  }
  report.residual = to_string(current);
  report.success = current.is_zero();
  return report;
}

}  // namespace spinwave::symbolic
