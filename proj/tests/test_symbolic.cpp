#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "spinwave/symbolic/canonical.hpp"
#include "spinwave/symbolic/eval.hpp"
#include "spinwave/symbolic/identity_file.hpp"
#include "spinwave/symbolic/parser.hpp"
#include "spinwave/symbolic/rewrite.hpp"

using namespace spinwave;
using namespace spinwave::symbolic;

namespace {

const MetricSpinorConvention& standard = MetricSpinorConvention::standard();
const MetricSpinorConvention& penrose = MetricSpinorConvention::penrose();

std::string canon(const std::string& text, const MetricSpinorConvention& conv = standard) {
  return to_string(canonicalize(parse(text), conv));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Config;
}

/// max |a - b| over random bindings of every field kernel in a and b.
double eval_gap(const Expr& a, const Expr& b, Rng& rng, const MetricSpinorConvention& conv) {
  const Bindings bind = random_bindings(a + b, rng, conv);
  const ComponentSpinor va = component_eval(a, bind, conv);
  if (b.is_zero()) return max_abs(va);
  return max_abs_diff(va, component_eval(b, bind, conv));
}

/// Renames every dummy of every term and see-saws the ones at odd positions.
Expr disguise(const Expr& e) {
  Expr out = e;
  for (auto& t : out.terms) {
    int n = 0;
    for (const auto& [label, refs] : occurrences(t)) {
      if (refs.size() != 2) continue;
      const std::string fresh = std::string(1, static_cast<char>('Z' - n)) + "7" +
                                (label_kind(label) == IndexKind::Primed ? "'" : "");
      for (const auto& r : refs) {
        t.factors[r.factor].labels[r.slot] = fresh;
        if (n % 2) t.factors[r.factor].variances[r.slot] = flipped(t.factors[r.factor].variances[r.slot]);
      }
      if (n % 2 && label_kind(label) != IndexKind::World) t.coeff = -t.coeff;
      ++n;
    }
    std::reverse(t.factors.begin(), t.factors.end());
  }
  return out;
}

const char* const kDerivativeFree[] = {
    "eps^{AB} eps_{AB}",
    "phi_{A}^{B} eps_{BC} phi^{C}_{D}",
    "X^{CA} Y_{C}",
    "X^{AC} Y_{C} - X^{CA} Y_{C}",
    "Psi_{ABCD} phi^{CD}",
    "Psi_{AD}^{BC} phi_{C}^{D}",
    "omega^{(ABCD)} phi_{A}^{H} M_{HD}",
    "theta_{AB} - theta_{(AB)}",
    "X_{A}^{B} X_{B}^{C} X_{C}^{D}",
    "Y_{ABC} Y^{CBA}",
    "phi_{A'B'} phi^{B'}_{C'} eps^{C'A'}",
    "Psi_{ABCD} Psi^{CDEF} phi_{EF}",
};

}  // namespace

TEST_CASE("parse: documented examples") {
  const Expr e = parse("eps^{A B} eps_{A B}");
  REQUIRE(e.terms.size() == 1);
  CHECK(free_indices(e.terms[0]).empty());

  const Expr phi = parse("phi_{A}^{B}");
  REQUIRE(phi.terms.size() == 1);
  const auto frees = free_indices(phi.terms[0]);
  REQUIRE(frees.size() == 2);
  CHECK(frees[0] == FreeIndex{"A", IndexKind::Unprimed, Variance::Down});
  CHECK(frees[1] == FreeIndex{"B", IndexKind::Unprimed, Variance::Up});
  CHECK(weight_of(phi) == std::pair<Rational, Rational>{0, 0});

  CHECK(kind_of([] { parse("phi_{A}^{B} + psi_{A C}"); }) == ErrorKind::Index);
}

TEST_CASE("parse: errors carry positions and kinds") {
  try {
    parse("phi_{A}^{B} $");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 12);
  }
  CHECK(kind_of([] { parse("phi_{A"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse("phi_{A}^{A} X_{A}"); }) == ErrorKind::Index);
  CHECK(kind_of([] { parse("X_{A} Y^{A} Z^{A}"); }) == ErrorKind::Index);
  CHECK(kind_of([] { parse("eps^{A B'}"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse("X_{(A}^{B')}"); }) == ErrorKind::Parse);

  KernelTable table = KernelTable::builtin();
  table.declare(Kernel{"rho", {}, {}, Rational(1), Rational(0)});
  CHECK(kind_of([&] { parse("rho phi_{A}^{B} + phi_{A}^{B}", table); }) == ErrorKind::Weight);
}

TEST_CASE("parse: brackets") {
  CHECK(to_string(parse("theta_{(AB)}")) == "1/2 theta_{AB} + 1/2 theta_{BA}");
  CHECK(to_string(parse("theta_{[AB]}")) == "1/2 theta_{AB} - 1/2 theta_{BA}");
  // brackets may close in a later factor of the product
  CHECK(parse("X_{(A} Y_{B)}").terms.size() == 2);
  // 3+ antisymmetrized spinor indices vanish
  CHECK(parse("chi_{[ABC]}").is_zero());
  // a 3+ bracket on one factor stays an annotation
  const Expr w = parse("omega^{(ABCD)}");
  REQUIRE(w.terms.size() == 1);
  CHECK(w.terms[0].factors[0].extra.size() == 1);
  CHECK(to_string(w) == "omega^{(ABCD)}");
}

TEST_CASE("canonicalize: documented examples") {
  CHECK(canon("eps^{AB} eps_{AB}") == "2");
  CHECK(canon("eps^{AB} eps_{AB}", penrose) == "2");
  CHECK(canon("phi_{[AB]}") == "0");
  CHECK(canon("chi_{[ABC]}") == "0");

  // theta_AB = theta_(AB) + 1/2 eps_AB theta_C^C with the raising side of
  // the original derivation, theta^C_C with the adopted one
  CHECK(canon("theta_{AB} - theta_{(AB)} - 1/2 eps_{AB} theta_C^C", penrose) == "0");
  CHECK(canon("theta_{AB} - theta_{(AB)} - 1/2 eps_{AB} theta^C_C") == "0");
  CHECK(canon("theta_{AB} - theta_{(AB)} - 1/2 eps_{AB} theta_C^C") != "0");
}

TEST_CASE("canonicalize: metric spinor algebra") {
  CHECK(canon("eps^{AB} eps_{CB}") == canon("eps^{A}_{C}"));
  CHECK(canon("eps_{A}^{A}") == "-2");
  CHECK(canon("eps^{A}_{A}") == "2");
  CHECK(canon("eps^{AB} xi_{B}") == canon("-xi^{A}"));
  CHECK(canon("eps^{AB} xi_{B}", penrose) == canon("xi^{A}"));
  CHECK(canon("phi_{AB} eps^{AB}") == "0");
  CHECK(canon("xi_{A} xi^{A}") == "0");
  CHECK(canon("Psi_{AB}^{AB}") == "0");
  CHECK(canon("Psi_{ABCD} - Psi_{DCBA}") == "0");
  CHECK(canon("X_{A'B'} eps^{A'B'} + X_{C'}^{C'}") == "0");
}

TEST_CASE("canonicalize: idempotent and invariant under relabeling and see-saw") {
  for (const MetricSpinorConvention* conv : {&standard, &penrose}) {
    for (const std::string text : kDerivativeFree) {
      CAPTURE(text);
      const Expr c = canonicalize(parse(text), *conv);
      CHECK(to_string(canonicalize(c, *conv)) == to_string(c));
      CHECK(to_string(canonicalize(disguise(parse(text)), *conv)) == to_string(c));
      CHECK(canonicalize(parse(text) - disguise(parse(text)), *conv).is_zero());
    }
  }
}

TEST_CASE("canonicalize: random contraction patterns reach one normal form") {
  // random products of up to four factors with random contractions; an
  // equivalent copy with permuted factors, renamed and see-sawed dummies must
  // cancel against the original
  KernelTable table = KernelTable::builtin();
  const Slot d{IndexKind::Unprimed, Variance::Down};
  table.declare(Kernel{"Z", {d, d, d, d}, {{{0, 1}, true}, {{2, 3}, false}}, Rational(-2), Rational(0)});
  const std::vector<std::pair<std::string, int>> kernels = {{"X", 2}, {"Y", 3}, {"Psi", 4}, {"phi", 2}, {"Z", 4}};
  Rng rng(20240611);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int nf = 2 + static_cast<int>(rng() % 3);
    std::vector<int> ks;
    int nslots = 0;
    for (int i = 0; i < nf; ++i) {
      ks.push_back(static_cast<int>(rng() % kernels.size()));
      nslots += kernels[ks.back()].second;
    }
    std::vector<int> order(nslots);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int nfree = nslots % 2 == 1 ? 1 : (rng() % 2 ? 2 : 0);
    std::vector<std::string> lab(nslots);
    std::vector<bool> up(nslots);
    for (int i = 0; i < nfree; ++i) {
      lab[order[i]] = std::string(1, static_cast<char>('A' + i));
      up[order[i]] = rng() % 2;
    }
    int ndummy = 0;
    for (int i = nfree; i + 1 < nslots; i += 2, ++ndummy) {
      const std::string l(1, static_cast<char>('P' + ndummy));
      lab[order[i]] = lab[order[i + 1]] = l;
      up[order[i]] = rng() % 2;
      up[order[i + 1]] = !up[order[i]];
    }
    auto render = [&](const std::vector<int>& perm, const std::vector<std::string>& L, const std::vector<bool>& U) {
      std::vector<int> offs;
      int off = 0;
      for (int k : ks) {
        offs.push_back(off);
        off += kernels[k].second;
      }
      std::string s;
      for (int p : perm) {
        s += kernels[ks[p]].first;
        for (int j = 0; j < kernels[ks[p]].second; ++j) {
          s += U[offs[p] + j] ? "^{" : "_{";
          s += L[offs[p] + j] + "}";
        }
        s += " ";
      }
      return s;
    };
    std::vector<int> ident(nf);
    std::iota(ident.begin(), ident.end(), 0);
    std::vector<int> perm = ident;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> lab2 = lab;
    std::vector<bool> up2 = up;
    bool negate = false;
    for (int k = 0; k < ndummy; ++k) {
      const std::string old(1, static_cast<char>('P' + k));
      const std::string renamed = std::string(1, static_cast<char>('P' + (ndummy - 1 - k))) + "9";
      const bool flip = rng() % 2;
      negate ^= flip;
      for (int i = 0; i < nslots; ++i) {
        if (lab[i] != old) continue;
        lab2[i] = renamed;
        if (flip) up2[i] = !up2[i];
      }
    }
    const std::string a = render(ident, lab, up);
    const std::string text = a + (negate ? " + " : " - ") + render(perm, lab2, up2);
    CAPTURE(text);
    for (const MetricSpinorConvention* conv : {&standard, &penrose}) {
      CHECK(canonicalize(parse(text, table), *conv).is_zero());
      const Expr c = canonicalize(parse(a, table), *conv);
      CHECK(to_string(canonicalize(c, *conv)) == to_string(c));
    }
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("component_eval: canonical forms agree with the input over random bindings") {
  for (const MetricSpinorConvention* conv : {&standard, &penrose}) {
    for (const std::string text : kDerivativeFree) {
      CAPTURE(text);
      const Expr e = parse(text);
      const Expr c = canonicalize(e, *conv);
      Rng rng(7);
      double worst = 0.0;
      for (int draw = 0; draw < 100; ++draw) worst = std::max(worst, eval_gap(e, c, rng, *conv));
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("component_eval: derivative-free identities hold numerically") {
  const std::pair<const char*, const MetricSpinorConvention*> identities[] = {
      {"theta_{AB} - theta_{(AB)} - 1/2 eps_{AB} theta_C^C", &penrose},
      {"theta_{AB} - theta_{(AB)} - 1/2 eps_{AB} theta^C_C", &standard},
      {"X^{AC} Y_{C} - X^{CA} Y_{C} + X^{B}_{B} Y^{A}", &standard},
      {"phi_{A}^{B} phi_{B}^{C} + 1/2 phi_{D}^{E} phi_{E}^{D} eps_{A}^{C}", &standard},
  };
  for (const auto& [raw, conv] : identities) {
    const std::string text = raw;
    CAPTURE(text);
    CHECK(canonicalize(parse(text), *conv).is_zero());
    Rng rng(11);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) worst = std::max(worst, eval_gap(parse(text), Expr::zero(), rng, *conv));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("component_eval: documented examples") {
  const Bindings none;
  CHECK(component_eval(parse("eps^{AB} eps_{AB}"), none).at({}) == Complex(2.0));

  // -2 Psi_{AD}^{BC} phi_C^D against a nested-loop oracle
  Rng rng(3);
  const Slot d{IndexKind::Unprimed, Variance::Down};
  const Slot u{IndexKind::Unprimed, Variance::Up};
  ComponentSpinor psi = random_spinor(IndexSignature{d, d, d, d}, rng);
  psi = symmetrize(psi, std::vector<std::size_t>{0, 1, 2, 3}, SymmetryMode::Symmetric);
  const ComponentSpinor phi_low = random_symmetric_pair(rng);
  const ComponentSpinor phi = raise_lower(phi_low, 1, Variance::Up);
  Bindings b{{"Psi", psi}, {"phi", phi}};
  const ComponentSpinor got = component_eval(parse("-2 Psi_{AD}^{BC} phi_{C}^{D}"), b);
  // adopted side: xi^A = xi_B eps^{BA}
  const double e_up[2][2] = {{0, 1}, {-1, 0}};
  double worst = 0.0;
  for (int A = 0; A < 2; ++A) {
    for (int B = 0; B < 2; ++B) {
      Complex want{};
      for (int C = 0; C < 2; ++C) {
        for (int D = 0; D < 2; ++D) {
          Complex raised{};
          for (int E = 0; E < 2; ++E) {
            for (int F = 0; F < 2; ++F) raised += psi.at({A, D, E, F}) * e_up[E][B] * e_up[F][C];
          }
          want += -2.0 * raised * phi.at({C, D});
        }
      }
      worst = std::max(worst, std::abs(got.at({A, B}) - want));
    }
  }
  CHECK(worst < 1e-12);
  CHECK(got.signature() == IndexSignature{d, u});

  // curvature action with omega = 0 and R = 6 is M^{BD} phi_D^C
  Bindings b2{{"phi", phi},
              {"omega", ComponentSpinor(IndexSignature{d, d, d, d})},
              {"R", ComponentSpinor(IndexSignature{}, {Complex(6.0)})}};
  const auto lhs = component_eval(parse("R/6 M^{BD} phi_D^C - omega^{(ABCD)} phi_A^H M_{HD}"), b2);
  const auto rhs = component_eval(parse("M^{BD} phi_D^C"), b2);
  CHECK(max_abs_diff(lhs, rhs) < 1e-15);

  CHECK(kind_of([&] { component_eval(parse("nabla_{AA'} phi^{AB}"), b); }) == ErrorKind::UnsupportedExpression);
  CHECK(kind_of([&] { component_eval(parse("chi_{AB}"), b); }) == ErrorKind::UnboundKernel);
}

TEST_CASE("weight_of") {
  using W = std::pair<Rational, Rational>;
  CHECK(weight_of(parse("phi_{A}^{B}")) == W{0, 0});
  CHECK(weight_of(parse("phi_{AB}")) == W{-1, 0});
  CHECK(weight_of(parse("phi_{A}^{C} eps_{CB}")) == W{-1, 0});
  CHECK(weight_of(parse("phi_{A'B'}")) == W{0, -1});
  CHECK(weight_of(parse("Delta^{AB}")) == W{1, 0});
  CHECK(weight_of(parse("Box")) == W{0, 0});
  CHECK(weight_of(parse("nabla_{C'}^{(A} nabla^{B)C'}")) == W{1, 0});
  CHECK(weight_of(parse("vartheta_{a(BC)}")) == W{-1, 0});
  CHECK(weight_of(parse("vartheta_{a}^{(BC)}")) == W{1, 0});
  CHECK(weight_of(parse("eps_{AB}")) == W{-1, 0});
  CHECK(weight_of(parse("eps^{AB}")) == W{1, 0});
  CHECK(weight_of(Expr::zero()) == W{0, 0});
}

TEST_CASE("rewrite rules are checked") {
  auto rule = [](const char* name, const char* p, const char* r) {
    return RewriteRule{name, parse(p), std::string(r) == "0" ? Expr::zero() : parse(r)};
  };
  CHECK(kind_of([&] { prepare_rule(rule("f", "phi_{A}^{B}", "phi_{A}^{C} eps_{CB}"), standard); }) ==
        ErrorKind::InvalidRule);
  CHECK(kind_of([&] { prepare_rule(rule("s", "phi_{A}^{B} + X_{A}^{B}", "0"), standard); }) ==
        ErrorKind::InvalidRule);
  CHECK(kind_of([&] { prepare_rule(rule("o", "X_{AA'}", "nabla_{AA'} R"), standard); }) == ErrorKind::InvalidRule);

  KernelTable table = KernelTable::builtin();
  table.declare(Kernel{"rho", {}, {}, Rational(1), Rational(0)});
  const RewriteRule heavy{"w", parse("phi_{A}^{B}", table), parse("rho phi_{A}^{B}", table)};
  CHECK(kind_of([&] { prepare_rule(heavy, standard); }) == ErrorKind::InvalidRule);

  CHECK_NOTHROW(prepare_rule(rule("m", "nabla^{AB'} phi_A^B", "0"), standard));
}

namespace {

std::vector<RewriteRule> chain_rules(bool printed_side) {
  auto r = [](const char* name, const char* p, const char* q) {
    return RewriteRule{name, parse(p), std::string(q) == "0" ? Expr::zero() : parse(q)};
  };
  if (printed_side) {
    return {r("split", "M^{AC} Box phi_A^B", "2 Delta^{AC} phi_A^B - 2 nabla_{A'}^{C} nabla^{AA'} phi_A^B"),
            r("massless", "nabla^{AB'} phi_A^B", "0"),
            r("curvature", "Delta^{AB} phi_A^C", "R/6 M^{BD} phi_D^C - omega^{(ABCD)} phi_A^H M_{HD}"),
            r("psi", "omega^{(ABCD)}", "Psi^{ABCD}")};
  }
  return {r("split", "M^{AC} Box phi_A^B", "2 nabla_{A'}^{C} nabla^{AA'} phi_A^B - 2 Delta^{AC} phi_A^B"),
          r("massless", "nabla^{AB'} phi_A^B", "0"),
          r("curvature", "Delta^{AB} phi_A^C", "-R/6 M^{BD} phi_D^C + omega^{(ABCD)} phi_A^H M_{HD}"),
          r("psi", "omega^{(ABCD)}", "Psi^{ABCD}")};
}

std::vector<RewriteRule> definitions() {
  return {RewriteRule{"delta_def", parse("Delta^{AB}"), parse("nabla_{C'}^{(A} nabla^{B)C'}")},
          RewriteRule{"box_def", parse("Box"), parse("nabla_{CC'} nabla^{CC'}")}};
}

}  // namespace

TEST_CASE("verify_identity: splitting") {
  const Expr lhs = parse("nabla_{A'}^{C} nabla^{AA'} phi_A^B");
  const Expr minus = parse("Delta^{AC} phi_A^B - 1/2 M^{AC} Box phi_A^B");
  const Expr plus = parse("Delta^{AC} phi_A^B + 1/2 M^{AC} Box phi_A^B");
  CHECK(verify_identity(lhs, minus, definitions(), penrose).success);
  CHECK(verify_identity(lhs, plus, definitions(), standard).success);
  const auto wrong = verify_identity(lhs, minus, definitions(), standard);
  CHECK_FALSE(wrong.success);
  CHECK(wrong.residual != "0");
  CHECK_FALSE(verify_identity(lhs, plus, definitions(), penrose).success);
  // without the definitions nothing relates the two sides
  CHECK_FALSE(verify_identity(lhs, minus, {}, penrose).success);
}

TEST_CASE("verify_identity: wave equation chain") {
  const Expr lhs = parse("(Box + R/3) phi_A^B");
  const Expr rhs = parse("-2 Psi_{AD}^{BC} phi_C^D");
  for (bool printed_side : {true, false}) {
    const auto& conv = printed_side ? penrose : standard;
    const auto ok = verify_identity(lhs, rhs, chain_rules(printed_side), conv);
    CHECK(ok.success);
    CHECK(ok.residual == "0");
    std::vector<std::string> used;
    for (const auto& s : ok.trace) used.push_back(s.rule);
    CHECK(used == std::vector<std::string>{"split", "curvature", "massless", "psi"});

    const auto r2 = verify_identity(parse("(Box + R/2) phi_A^B"), rhs, chain_rules(printed_side), conv);
    CHECK_FALSE(r2.success);
    CHECK(r2.residual == "1/6 R phi_{A}^{B}");

    const auto plus2 = verify_identity(lhs, parse("2 Psi_{AD}^{BC} phi_C^D"), chain_rules(printed_side), conv);
    CHECK_FALSE(plus2.success);
    CHECK(plus2.residual == "4 Psi_{A}^{BCD} phi_{DC}");
  }
}

TEST_CASE("verify_identity: determinism and errors") {
  const Expr lhs = parse("(Box + R/3) phi_A^B");
  const Expr rhs = parse("-2 Psi_{AD}^{BC} phi_C^D");
  const auto a = verify_identity(lhs, rhs, chain_rules(true), penrose).trace_text();
  const auto b = verify_identity(parse("(Box + R/3) phi_A^B"), parse("-2 Psi_{AD}^{BC} phi_C^D"), chain_rules(true),
                                 penrose)
                     .trace_text();
  CHECK(a == b);
  CHECK(a.find("step 4: psi") != std::string::npos);

  CHECK(kind_of([] { verify_identity(parse("phi_{A}^{B}"), parse("phi_{A}^{C} eps_{CB}"), {}); }) ==
        ErrorKind::IllPosedIdentity);
  CHECK(kind_of([] { verify_identity(parse("phi_{A}^{B}"), parse("phi_{C}^{B}"), {}); }) ==
        ErrorKind::IllPosedIdentity);
}

TEST_CASE("apply_rule: matching modulo symmetry, see-saw and raised frees") {
  const ConventionSigns sg = ConventionSigns::from(standard);
  const PreparedRule massless = prepare_rule(RewriteRule{"m", parse("nabla^{AB'} phi_A^B"), Expr::zero()}, standard);
  for (const char* text : {"nabla^{AB'} phi_A^B", "nabla_{A}^{B'} phi^{A}_{B}", "nabla^{AB'} phi^{B}_{A}",
                           "nabla_{C'}^{D} nabla^{AC'} phi_{AD}", "nabla^{A}_{B'} phi_{AC}"}) {
    CAPTURE(text);
    const auto r = apply_rule(parse(text).terms[0], massless, sg);
    REQUIRE(r.has_value());
    CHECK(r->is_zero());
  }
  // the operand must be the whole remaining product
  CHECK_FALSE(apply_rule(parse("nabla^{AB'} phi_A^B X_{C}").terms[0], massless, sg).has_value());
  // nabla contracted on the wrong kernel
  CHECK_FALSE(apply_rule(parse("nabla^{AB'} X_A^B").terms[0], massless, sg).has_value());

  // an algebraic rule applied under a derivative, with the result checked
  const PreparedRule psi =
      prepare_rule(RewriteRule{"psi", parse("omega^{(ABCD)}"), parse("Psi^{ABCD}")}, standard);
  const auto r = apply_rule(parse("nabla_{EE'} omega^{(ABCD)}").terms[0], psi, sg);
  REQUIRE(r.has_value());
  CHECK(to_string(canonicalize(*r)) == canon("nabla_{EE'} Psi^{ABCD}"));

  // two pattern frees contracted with each other in the target
  const PreparedRule curv = prepare_rule(
      RewriteRule{"c", parse("Delta^{AB} phi_A^C"), parse("R/6 M^{BD} phi_D^C - omega^{(ABCD)} phi_A^H M_{HD}")},
      standard);
  const auto traced = apply_rule(parse("Delta^{AB} phi_{AB}").terms[0], curv, sg);
  REQUIRE(traced.has_value());
  CHECK(canonicalize(*traced).is_zero());
}

TEST_CASE("identity corpus") {
  const IdentityFile corpus = load_identity_file(std::string(SPINWAVE_DATA_DIR) + "/identities.txt");
  int refutes = 0;
  std::set<std::string> names;
  for (const auto& c : corpus.claims) {
    CAPTURE(c.name);
    const ClaimResult r = run_claim(c);
    CHECK(r.passed);
    refutes += c.refute ? 1 : 0;
    names.insert(c.name);
  }
  CHECK(refutes >= 4);
  for (const char* n : {"splitting", "wave_equation", "decomposition", "wave_equation_R2", "wave_equation_plus2"}) {
    CHECK(names.count(n) == 1);
  }
}

TEST_CASE("identity file syntax") {
  const IdentityFile f = parse_identity_file(
      "# comment\n"
      "kernel chi_{(AB)C}\n"
      "chi_{ABC} - chi_{BAC} == 0   # trailing comment\n"
      "rule r1: Box -> nabla_{CC'} nabla^{CC'}\n"
      "convention penrose\n"
      "claim named using r1: Box R == nabla_{CC'} nabla^{CC'} R\n"
      "refute bad: phi_{A}^{B} == 2 phi_{A}^{B}\n");
  REQUIRE(f.claims.size() == 3);
  CHECK(f.claims[0].name == "line 3");
  CHECK(f.claims[0].convention == "standard");
  CHECK(f.claims[1].convention == "penrose");
  CHECK(f.claims[1].rules.size() == 1);
  CHECK(f.claims[2].refute);
  for (const auto& c : f.claims) CHECK(run_claim(c).passed);

  try {
    parse_identity_file("phi_{A}^{B} == phi_{A}^{B}\nphi_{A == 0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CAPTURE(e.what());
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(e.position() >= 27);
  }
  CHECK(kind_of([] { parse_identity_file("claim x using nope: R == R\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_identity_file("rule bad: phi_{A}^{B} -> phi_{A}^{C} eps_{CB}\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_identity_file("convention sideways\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { load_identity_file("/nonexistent/identities.txt"); }) == ErrorKind::Config);
}
