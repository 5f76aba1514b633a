#include "spinwave/symbolic/expr.hpp"

#include <algorithm>
#include <set>

namespace spinwave::symbolic {

std::vector<SymmetryGroup> Factor::groups() const {
  std::vector<SymmetryGroup> g = kernel->symmetries;
  g.insert(g.end(), extra.begin(), extra.end());
  return g;
}

std::string to_string(const Factor& f) {
  std::string out = f.kernel->name;
  // slots opened / closed by a contiguous annotation
  std::vector<std::string> opens(f.rank());
  std::vector<std::string> closes(f.rank());
  std::string loose;
  for (const auto& g : f.extra) {
    std::vector<std::size_t> sl = g.slots;
    std::sort(sl.begin(), sl.end());
    const char open = g.antisymmetric ? '[' : '(';
    const char close = g.antisymmetric ? ']' : ')';
    if (sl.back() - sl.front() + 1 == sl.size()) {
      opens[sl.front()] += open;
      closes[sl.back()] += close;
    } else {
      loose += open;
      for (std::size_t k = 0; k < sl.size(); ++k) loose += (k ? "," : "") + std::to_string(sl[k]);
      loose += close;
    }
  }
  std::size_t i = 0;
  while (i < f.rank()) {
    const Variance v = f.variances[i];
    out += v == Variance::Up ? "^{" : "_{";
    while (i < f.rank() && f.variances[i] == v) {
      out += opens[i];
      out += f.labels[i];
      out += closes[i];
      ++i;
    }
    out += '}';
  }
  if (!loose.empty()) out += "@" + loose;
  return out;
}

std::string to_string(const Term& t, bool leading_sign) {
  std::string out;
  Rational c = t.coeff;
  if (c < Rational(0)) {
    out += leading_sign ? "-" : "";
    c = -c;
  }
  const bool unit = c == Rational(1);
  if (!unit || t.factors.empty()) out += c.str();
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (i > 0 || !unit) out += ' ';
    out += to_string(t.factors[i]);
  }
  return out;
}

std::string to_string(const Expr& e) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const Term& t = e.terms[i];
    if (i == 0) {
      out += to_string(t, true);
    } else {
      out += t.coeff < Rational(0) ? " - " : " + ";
      out += to_string(t, false);
    }
  }
  return out;
}

std::map<std::string, std::vector<SlotRef>> occurrences(const Term& t) {
  std::map<std::string, std::vector<SlotRef>> occ;
  for (std::size_t f = 0; f < t.factors.size(); ++f) {
    for (std::size_t s = 0; s < t.factors[f].rank(); ++s) occ[t.factors[f].labels[s]].push_back({f, s});
  }
  return occ;
}

void validate_term(const Term& t) {
  for (const auto& f : t.factors) {
    if (f.labels.size() != f.kernel->slots.size() || f.variances.size() != f.labels.size()) {
      throw Error(ErrorKind::Index, "factor " + f.kernel->name + " has the wrong number of indices");
    }
    for (std::size_t s = 0; s < f.rank(); ++s) {
      if (label_kind(f.labels[s]) != f.kind(s) && f.labels[s].front() != '%') {
        throw Error(ErrorKind::Index, "index " + f.labels[s] + " has the wrong kind for " + f.kernel->name);
      }
    }
  }
  for (const auto& [label, refs] : occurrences(t)) {
    if (refs.size() > 2) {
      throw Error(ErrorKind::Index, "unbalanced dummy index " + label + " occurs " +
                                        std::to_string(refs.size()) + " times");
    }
    if (refs.size() == 2) {
      const Factor& a = t.factors[refs[0].factor];
      const Factor& b = t.factors[refs[1].factor];
      if (a.variances[refs[0].slot] == b.variances[refs[1].slot]) {
        throw Error(ErrorKind::Index, "unbalanced dummy index " + label + " has equal variance twice");
      }
    }
  }
}

std::vector<FreeIndex> free_indices(const Term& t) {
  std::vector<FreeIndex> out;
  for (const auto& [label, refs] : occurrences(t)) {
    if (refs.size() != 1) continue;
    const Factor& f = t.factors[refs[0].factor];
    out.push_back({label, f.kind(refs[0].slot), f.variances[refs[0].slot]});
  }
  return out;
}

std::pair<Rational, Rational> weight_of(const Term& t) {
  Rational w;
  Rational aw;
  for (const auto& f : t.factors) {
    const auto [fw, faw] = f.kernel->weight_at(f.variances);
    w += fw;
    aw += faw;
  }
  return {w, aw};
}

namespace {

std::string free_set_str(const std::vector<FreeIndex>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += (v[i].variance == Variance::Up ? "^" : "_") + v[i].label;
  }
  return s + "}";
}

std::string weight_str(const std::pair<Rational, Rational>& w) {
  return "(" + w.first.str() + ", " + w.second.str() + ")";
}

}  // namespace

std::pair<Rational, Rational> weight_of(const Expr& e) {
  if (e.terms.empty()) return {};
  const auto w0 = weight_of(e.terms.front());
  for (const auto& t : e.terms) {
    const auto w = weight_of(t);
    if (w != w0) {
      throw Error(ErrorKind::Weight, "weight-inhomogeneous sum: " + weight_str(w0) + " vs " + weight_str(w) +
                                         " in term " + to_string(t));
    }
  }
  return w0;
}

void validate(const Expr& e) {
  for (const auto& t : e.terms) validate_term(t);
  if (e.terms.empty()) return;
  const auto f0 = free_indices(e.terms.front());
  for (const auto& t : e.terms) {
    const auto f = free_indices(t);
    if (f != f0) {
      throw Error(ErrorKind::Index, "mixed free-index sets " + free_set_str(f0) + " and " + free_set_str(f));
    }
  }
  weight_of(e);
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr r = a;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  return r;
}

Expr operator*(const Rational& c, const Expr& e) {
  if (c == Rational(0)) return {};
  Expr r = e;
  for (auto& t : r.terms) t.coeff *= c;
  return r;
}

Expr operator-(const Expr& a, const Expr& b) { return a + Rational(-1) * b; }

Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      Term t;
      t.coeff = ta.coeff * tb.coeff;
      t.factors = ta.factors;
      t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
      r.terms.push_back(std::move(t));
    }
  }
  return r;
}

}  // namespace spinwave::symbolic
