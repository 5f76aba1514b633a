#include "spinwave/symbolic/parser.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>

namespace spinwave::symbolic {

namespace {

struct Member {
  std::size_t item;
  std::size_t written;
};

struct Group {
  std::vector<Member> members;
  bool antisymmetric = false;
  std::size_t pos = 0;
};

struct RawFactor {
  std::string name;
  std::vector<std::string> labels;
  std::vector<Variance> variances;
  std::size_t pos = 0;
};

struct Item {
  Expr expr;
  bool is_factor = false;
  std::vector<std::size_t> written_to_slot;
};

std::string canonical_name(const std::string& name) {
  if (name == "M" || name == "epsilon") return "eps";
  return name;
}

Rational factorial(std::size_t n) {
  std::int64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<std::int64_t>(k);
  return Rational(f);
}

int permutation_parity(const std::vector<std::size_t>& p) {
  int inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) inversions += p[i] > p[j];
  }
  return inversions % 2 ? -1 : 1;
}

class Parser {
 public:
  Parser(std::string_view s, KernelTable* table, std::size_t base) : s_(s), table_(table), base_(base) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (!eof()) fail("unexpected character '" + std::string(1, s_[i_]) + "'");
    return e;
  }

  WrittenFactor parse_template() {
    skip_ws();
    std::vector<Group> groups;
    std::optional<std::size_t> open;
    RawFactor raw = parse_factor(groups, open, 0);
    if (open) fail("unclosed symmetrization bracket", groups[*open].pos);
    skip_ws();
    WrittenFactor w;
    w.name = raw.name;
    w.labels = raw.labels;
    for (std::size_t k = 0; k < raw.labels.size(); ++k) w.slots.push_back({label_kind(raw.labels[k]), raw.variances[k]});
    for (const auto& g : groups) {
      SymmetryGroup sg;
      sg.antisymmetric = g.antisymmetric;
      for (const auto& m : g.members) sg.slots.push_back(m.written);
      if (sg.slots.size() >= 2) w.brackets.push_back(std::move(sg));
    }
    return w;
  }

  std::size_t position() const { return i_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, i_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t pos) const { throw ParseError(base_ + pos, msg); }

  bool eof() const { return i_ >= s_.size(); }
  char cur() const { return eof() ? '\0' : s_[i_]; }
  bool at(std::string_view tok) const { return s_.substr(i_, tok.size()) == tok; }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    skip_ws();
    if (cur() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  bool at_product_end() const {
    return eof() || cur() == '+' || cur() == '-' || cur() == ')' || cur() == ',' || cur() == ':' || at("==");
  }

  std::int64_t parse_integer() {
    const std::size_t start = i_;
    while (std::isdigit(static_cast<unsigned char>(cur()))) ++i_;
    if (start == i_) fail("expected a number");
    if (i_ - start > 15) fail("number too large", start);
    return std::stoll(std::string(s_.substr(start, i_ - start)));
  }

  /// Optional `/ N` after an item.
  Rational parse_divisor() {
    skip_ws();
    if (cur() != '/') return Rational(1);
    ++i_;
    skip_ws();
    const std::size_t pos = i_;
    const std::int64_t d = parse_integer();
    if (d == 0) fail("division by zero", pos);
    return Rational(1, d);
  }

  std::string parse_label() {
    const std::size_t start = i_;
    const char c = cur();
    if (std::isupper(static_cast<unsigned char>(c))) {
      ++i_;
      while (std::isdigit(static_cast<unsigned char>(cur()))) ++i_;
      if (cur() == '\'') ++i_;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      ++i_;
      while (std::isdigit(static_cast<unsigned char>(cur()))) ++i_;
    } else {
      fail("expected an index label");
    }
    return std::string(s_.substr(start, i_ - start));
  }

  RawFactor parse_factor(std::vector<Group>& groups, std::optional<std::size_t>& open, std::size_t item) {
    RawFactor f;
    f.pos = i_;
    const std::size_t start = i_;
    while (std::isalnum(static_cast<unsigned char>(cur()))) ++i_;
    f.name = canonical_name(std::string(s_.substr(start, i_ - start)));
    auto add_label = [&](std::string label, Variance v) {
      f.labels.push_back(std::move(label));
      f.variances.push_back(v);
      if (open) groups[*open].members.push_back({item, f.labels.size() - 1});
    };
    while (cur() == '_' || cur() == '^') {
      const Variance v = cur() == '^' ? Variance::Up : Variance::Down;
      ++i_;
      if (cur() != '{') {
        add_label(parse_label(), v);
        continue;
      }
      ++i_;
      for (;;) {
        skip_ws();
        const char c = cur();
        if (c == '}') {
          ++i_;
          break;
        }
        if (c == '(' || c == '[') {
          if (open) fail("nested symmetrization brackets");
          groups.push_back({{}, c == '[', i_});
          open = groups.size() - 1;
          ++i_;
        } else if (c == ')' || c == ']') {
          if (!open) fail("unmatched closing bracket");
          if (groups[*open].antisymmetric != (c == ']')) fail("mismatched symmetrization bracket");
          open.reset();
          ++i_;
        } else if (eof()) {
          fail("unterminated index block");
        } else {
          add_label(parse_label(), v);
        }
      }
    }
    return f;
  }

  Item resolve(const RawFactor& raw) {
    std::vector<Slot> written;
    std::vector<IndexKind> kinds;
    for (std::size_t k = 0; k < raw.labels.size(); ++k) {
      written.push_back({label_kind(raw.labels[k]), raw.variances[k]});
      kinds.push_back(written.back().kind);
    }
    std::pair<KernelPtr, std::vector<std::size_t>> found;
    if (auto r = table_->resolve(raw.name, kinds)) {
      found = *r;
    } else if (table_->knows(raw.name)) {
      fail("kernel " + raw.name + " does not accept these index kinds", raw.pos);
    } else {
      found = table_->resolve_or_declare(raw.name, written);
    }
    Factor f;
    f.kernel = found.first;
    f.labels.resize(raw.labels.size());
    f.variances.resize(raw.labels.size());
    for (std::size_t w = 0; w < raw.labels.size(); ++w) {
      f.labels[found.second[w]] = raw.labels[w];
      f.variances[found.second[w]] = raw.variances[w];
    }
    Item item;
    item.is_factor = true;
    item.written_to_slot = found.second;
    item.expr.terms.push_back(Term{Rational(1), {std::move(f)}});
    return item;
  }

 public:
  Expr parse_expr() {
    skip_ws();
    Rational sign(1);
    if (cur() == '+') {
      ++i_;
    } else if (cur() == '-' && !at("->")) {
      sign = Rational(-1);
      ++i_;
    }
    Expr e = sign * parse_product();
    for (;;) {
      skip_ws();
      if (at("->") || at("==")) break;
      if (cur() == '+' || cur() == '-') {
        const Rational s = cur() == '-' ? Rational(-1) : Rational(1);
        ++i_;
        e = e + s * parse_product();
      } else {
        break;
      }
    }
    return e;
  }

 private:
  Expr parse_product() {
    std::vector<Item> items;
    std::vector<Group> groups;
    std::optional<std::size_t> open;
    Rational coeff(1);
    bool any = false;
    for (;;) {
      skip_ws();
      if (at_product_end() || at("->")) break;
      const char c = cur();
      if (c == '*') {
        if (!any) fail("'*' without a left operand");
        ++i_;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        const Rational n(parse_integer());
        coeff *= n * parse_divisor();
      } else if (c == '(') {
        ++i_;
        Item item;
        item.expr = parse_expr();
        expect(')');
        item.expr = parse_divisor() * item.expr;
        items.push_back(std::move(item));
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        const RawFactor raw = parse_factor(groups, open, items.size());
        Item item = resolve(raw);
        item.expr = parse_divisor() * item.expr;
        items.push_back(std::move(item));
      } else {
        fail("unexpected character '" + std::string(1, c) + "'");
      }
      any = true;
    }
    if (!any) fail("expected a term");
    if (open) fail("unclosed symmetrization bracket", groups[*open].pos);
    return expand(items, groups, coeff);
  }

  Expr expand(const std::vector<Item>& items, const std::vector<Group>& groups, const Rational& coeff) {
    std::vector<std::pair<Term, std::vector<std::size_t>>> partial{{Term{coeff, {}}, {}}};
    for (const auto& item : items) {
      std::vector<std::pair<Term, std::vector<std::size_t>>> next;
      for (const auto& [t, offs] : partial) {
        for (const auto& it : item.expr.terms) {
          Term n = t;
          n.coeff *= it.coeff;
          auto o = offs;
          o.push_back(n.factors.size());
          n.factors.insert(n.factors.end(), it.factors.begin(), it.factors.end());
          next.emplace_back(std::move(n), std::move(o));
        }
      }
      partial = std::move(next);
    }
    Expr out;
    for (auto& [t, offs] : partial) {
      std::vector<Term> current{t};
      for (const auto& g : groups) {
        std::vector<Term> next;
        for (const auto& c : current) {
          auto expanded = expand_group(c, g, offs, items);
          next.insert(next.end(), expanded.begin(), expanded.end());
        }
        current = std::move(next);
      }
      out.terms.insert(out.terms.end(), current.begin(), current.end());
    }
    return out;
  }

  std::vector<Term> expand_group(const Term& t, const Group& g, const std::vector<std::size_t>& offs,
                                 const std::vector<Item>& items) {
    const std::size_t n = g.members.size();
    if (n < 2) return {t};
    std::vector<SlotRef> refs;
    for (const auto& m : g.members) refs.push_back({offs[m.item], items[m.item].written_to_slot[m.written]});
    const Factor& f0 = t.factors[refs[0].factor];
    const IndexKind kind = f0.kind(refs[0].slot);
    bool same_factor = true;
    for (const auto& r : refs) {
      const Factor& f = t.factors[r.factor];
      if (f.kind(r.slot) != kind) {
        fail("symmetrization over indices of different kind", g.pos);
      }
      same_factor = same_factor && r.factor == refs[0].factor;
    }
    if (kind != IndexKind::World && g.antisymmetric && n >= 3) return {};
    if (same_factor && n >= 3 && !g.antisymmetric) {
      std::vector<std::size_t> slots;
      for (const auto& r : refs) slots.push_back(r.slot);
      std::sort(slots.begin(), slots.end());
      Term c = t;
      Factor& f = c.factors[refs[0].factor];
      for (const auto& kg : f.kernel->symmetries) {
        if (!kg.antisymmetric && std::includes(kg.slots.begin(), kg.slots.end(), slots.begin(), slots.end())) {
          return {c};
        }
      }
      f.extra.push_back(SymmetryGroup{slots, false});
      return {c};
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const Rational weight = Rational(1) / factorial(n);
    std::vector<Term> out;
    do {
      Term c = t;
      c.coeff *= weight;
      if (g.antisymmetric && permutation_parity(perm) < 0) c.coeff = -c.coeff;
      for (std::size_t k = 0; k < n; ++k) {
        const SlotRef from = refs[perm[k]];
        c.factors[refs[k].factor].labels[refs[k].slot] = t.factors[from.factor].labels[from.slot];
        c.factors[refs[k].factor].variances[refs[k].slot] = t.factors[from.factor].variances[from.slot];
      }
      out.push_back(std::move(c));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  KernelTable* table_;
  std::size_t base_;
};

}  // namespace

Expr parse_unchecked(std::string_view text, KernelTable& table, std::size_t base) {
  Parser p(text, &table, base);
  return p.parse_all();
}

Expr parse(std::string_view text, KernelTable& table, std::size_t base) {
  Expr e = parse_unchecked(text, table, base);
  validate(e);
  return e;
}

Expr parse(std::string_view text) {
  KernelTable table = KernelTable::builtin();
  return parse(text, table);
}

WrittenFactor parse_factor_template(std::string_view text, std::size_t base) {
  Parser p(text, nullptr, base);
  WrittenFactor w = p.parse_template();
  if (p.position() != text.size()) throw ParseError(base + p.position(), "trailing characters after kernel");
  return w;
}

}  // namespace spinwave::symbolic
