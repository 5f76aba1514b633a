#include "spinwave/symbolic/identity_file.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spinwave/symbolic/parser.hpp"

namespace spinwave::symbolic {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Line {
  std::string_view text;
  std::size_t offset = 0;  // of text[0] in the file
  std::size_t number = 0;

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ParseError(offset + at, "line " + std::to_string(number) + ": " + msg);
  }
};

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

std::string_view trim(std::string_view s) {
  std::size_t b = skip_space(s, 0);
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

/// Next whitespace-delimited word from `i`; advances `i`.
std::string_view word(std::string_view s, std::size_t& i) {
  i = skip_space(s, i);
  const std::size_t b = i;
  while (i < s.size() && !is_space(s[i]) && s[i] != ':') ++i;
  return s.substr(b, i - b);
}

Rational parse_rational(const Line& ln, std::string_view w, std::size_t at) {
  try {
    const auto slash = w.find('/');
    std::size_t used = 0;
    const std::string num(w.substr(0, slash));
    const long long n = std::stoll(num, &used);
    if (used != num.size()) ln.fail(at, "bad number '" + std::string(w) + "'");
    if (slash == std::string_view::npos) return Rational(n);
    const std::string den(w.substr(slash + 1));
    const long long d = std::stoll(den, &used);
    if (used != den.size() || d == 0) ln.fail(at, "bad number '" + std::string(w) + "'");
    return Rational(n, d);
  } catch (const std::logic_error&) {
    ln.fail(at, "bad number '" + std::string(w) + "'");
  }
}

Expr parse_side(const Line& ln, std::string_view full, std::size_t begin, std::size_t end, KernelTable& table) {
  const std::string_view part = full.substr(begin, end - begin);
  if (trim(part).empty()) ln.fail(begin, "empty expression");
  try {
    return parse(part, table, ln.offset + begin);
  } catch (const ParseError& e) {
    throw ParseError(e.position(), "line " + std::to_string(ln.number) + ": " + e.detail());
  }
}

void parse_kernel(const Line& ln, std::size_t i, KernelTable& table) {
  const std::size_t at = skip_space(ln.text, i);
  const std::string_view tmpl = word(ln.text, i);
  if (tmpl.empty()) ln.fail(at, "kernel needs a template");
  WrittenFactor w;
  try {
    w = parse_factor_template(tmpl, ln.offset + at);
  } catch (const ParseError& e) {
    throw ParseError(e.position(), "line " + std::to_string(ln.number) + ": " + e.detail());
  }
  Kernel k;
  k.name = w.name;
  k.slots = w.slots;
  k.symmetries = w.brackets;
  std::tie(k.weight, k.antiweight) = natural_weight(w.slots);
  while (true) {
    const std::size_t opt_at = skip_space(ln.text, i);
    const std::string_view opt = word(ln.text, i);
    if (opt.empty()) break;
    if (opt == "symmetric" || opt == "antisymmetric") {
      SymmetryGroup g;
      g.slots.resize(k.slots.size());
      std::iota(g.slots.begin(), g.slots.end(), 0);
      g.antisymmetric = opt == "antisymmetric";
      k.symmetries = {g};
    } else if (opt == "operator") {
      k.role = KernelRole::Operator;
    } else if (opt == "weight" || opt == "antiweight") {
      const std::size_t v_at = skip_space(ln.text, i);
      const std::string_view v = word(ln.text, i);
      (opt == "weight" ? k.weight : k.antiweight) = parse_rational(ln, v, v_at);
    } else {
      ln.fail(opt_at, "unknown kernel option '" + std::string(opt) + "'");
    }
  }
  try {
    table.declare(std::move(k));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    ln.fail(at, e.what());
  }
}

}  // namespace

const MetricSpinorConvention& convention_named(const std::string& name) {
  if (name == "standard") return MetricSpinorConvention::standard();
  if (name == "penrose") return MetricSpinorConvention::penrose();
  throw Error(ErrorKind::Config, "unknown convention '" + name + "' (standard, penrose)");
}

IdentityFile parse_identity_file(std::string_view text) {
  IdentityFile out;
  KernelTable table = KernelTable::builtin();
  std::string convention = "standard";
  std::size_t offset = 0;
  std::size_t number = 0;
  while (offset <= text.size()) {
    std::size_t eol = text.find('\n', offset);
    if (eol == std::string_view::npos) eol = text.size();
    Line ln{text.substr(offset, eol - offset), offset, ++number};
    if (const auto hash = ln.text.find('#'); hash != std::string_view::npos) ln.text = ln.text.substr(0, hash);
    const std::size_t next = eol + 1;

    if (!trim(ln.text).empty()) {
      std::size_t i = 0;
      const std::size_t kw_at = skip_space(ln.text, 0);
      const std::string_view kw = word(ln.text, i);
      const std::string_view s = ln.text;

      if (kw == "kernel") {
        parse_kernel(ln, i, table);
      } else if (kw == "convention") {
        const std::size_t at = skip_space(s, i);
        const std::string name(word(s, i));
        if (name != "standard" && name != "penrose") ln.fail(at, "unknown convention '" + name + "'");
        if (!trim(s.substr(i)).empty()) ln.fail(i, "trailing text after convention");
        convention = name;
      } else if (kw == "rule") {
        const std::size_t colon = s.find(':', i);
        if (colon == std::string_view::npos) ln.fail(i, "expected ':' after rule name");
        const std::string name(trim(s.substr(i, colon - i)));
        if (name.empty()) ln.fail(i, "rule needs a name");
        const std::size_t arrow = s.find("->", colon);
        if (arrow == std::string_view::npos) ln.fail(colon, "expected '->' in rule");
        RewriteRule r;
        r.name = name;
        r.pattern = parse_side(ln, s, colon + 1, arrow, table);
        const std::string_view rhs = trim(s.substr(arrow + 2));
        r.replacement = rhs == "0" ? Expr::zero() : parse_side(ln, s, arrow + 2, s.size(), table);
        try {
          (void)prepare_rule(r, MetricSpinorConvention::standard());
        } catch (const Error& e) {
          ln.fail(kw_at, e.what());
        }
        out.rules.push_back(std::move(r));
      } else {
        ClaimDecl c;
        c.line = number;
        c.convention = convention;
        std::size_t body = kw_at;
        if (kw == "claim" || kw == "refute") {
          c.refute = kw == "refute";
          const std::size_t colon = s.find(':', i);
          if (colon == std::string_view::npos) ln.fail(i, "expected ':' after claim header");
          std::size_t j = i;
          c.name = std::string(word(s, j));
          if (c.name.empty()) ln.fail(i, "claim needs a name");
          const std::size_t u_at = skip_space(s, j);
          const std::string_view u = word(s, j);
          if (u == "using") {
            std::string list(s.substr(j, colon - j));
            std::replace(list.begin(), list.end(), ',', ' ');
            std::istringstream is(list);
            std::string name;
            while (is >> name) {
              if (name == "*") {
                c.rules.insert(c.rules.end(), out.rules.begin(), out.rules.end());
                continue;
              }
              const auto it = std::find_if(out.rules.begin(), out.rules.end(),
                                           [&](const RewriteRule& r) { return r.name == name; });
              if (it == out.rules.end()) ln.fail(u_at, "unknown rule '" + name + "'");
              c.rules.push_back(*it);
            }
          } else if (!u.empty()) {
            ln.fail(u_at, "expected 'using' or ':'");
          }
          body = colon + 1;
        } else {
          c.name = "line " + std::to_string(number);
        }
        const std::size_t eq = s.find("==", body);
        if (eq == std::string_view::npos) ln.fail(body, "expected '=='");
        c.text = std::string(trim(s.substr(body)));
        const std::string_view lhs = trim(s.substr(body, eq - body));
        const std::string_view rhs = trim(s.substr(eq + 2));
        c.lhs = lhs == "0" ? Expr::zero() : parse_side(ln, s, body, eq, table);
        c.rhs = rhs == "0" ? Expr::zero() : parse_side(ln, s, eq + 2, s.size(), table);
        out.claims.push_back(std::move(c));
      }
    }
    if (eol == text.size()) break;
    offset = next;
  }
  return out;
}

IdentityFile load_identity_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read identity file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_identity_file(ss.str());
}

ClaimResult run_claim(const ClaimDecl& claim) {
  ClaimResult r;
  r.claim = &claim;
  r.report = verify_identity(claim.lhs, claim.rhs, claim.rules, convention_named(claim.convention));
  r.passed = r.report.success != claim.refute;
  return r;
}

}  // namespace spinwave::symbolic
