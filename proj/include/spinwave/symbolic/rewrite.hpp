#pragma once

#include <string>
#include <vector>

#include "spinwave/symbolic/canonical.hpp"
#include "spinwave/symbolic/expr.hpp"

namespace spinwave::symbolic {

/// pattern -> replacement.  The pattern is a single product; its free
/// indices match any variance in the target (the engine raises and lowers
/// through the metric), its dummies match up to relabeling, see-saw and the
/// kernels' symmetries.
///
/// Where a pattern may match:
///   no operators            any sub-multiset of field factors under the same
///                           operators; the replacement must be operator-free
///   ends with an operator   a contiguous run of the operator word
///   operators then operand  the tail of the term, the operand matched as a
///                           commuting set
struct RewriteRule {
  std::string name;
  Expr pattern;
  Expr replacement;
};

/// A rule checked and brought to matching form.
struct PreparedRule {
  enum class Shape { Algebraic, OperatorRun, Suffix };

  std::string name;
  Term pattern;        // metrics eliminated, free indices down
  Expr replacement;    // free indices down
  Shape shape = Shape::Algebraic;
  std::size_t head = 0;  // Suffix: factors up to and including the last operator
};

/// Throws invalid-rule if the pattern is not a single product, if free
/// indices or (weight, antiweight) differ, or if the shape is unsupported.
PreparedRule prepare_rule(const RewriteRule& rule, const MetricSpinorConvention& conv);

/// One rule application on one term.  Returns the terms replacing `t`, or
/// nothing when the rule does not match.
std::optional<Expr> apply_rule(const Term& t, const PreparedRule& rule, const ConventionSigns& sg);

struct RewriteStep {
  std::string rule;
  std::string term;         // canonical term the rule rewrote
  std::string replacement;  // canonical image of that term
  std::string result;       // canonical whole expression afterwards
};

struct VerifyReport {
  bool success = false;
  std::string difference;  // canonical lhs - rhs before rewriting
  std::string residual;    // canonical result; "0" on success
  std::vector<RewriteStep> trace;
  bool step_limit_hit = false;

  /// Text form of the derivation, byte-stable for a given input.
  std::string trace_text() const;
};

/// Rewrites canonical(lhs - rhs): repeatedly takes the first term (canonical
/// order) and the first rule (given order) that match, applies it and
/// re-canonicalizes, until nothing matches or `max_steps` is reached.
/// Succeeds iff the result is zero.  Throws identity-ill-posed if the two
/// sides have different free indices and weight-error if their weights differ.
VerifyReport verify_identity(const Expr& lhs, const Expr& rhs, const std::vector<RewriteRule>& rules,
                             const MetricSpinorConvention& conv = MetricSpinorConvention::standard(),
                             std::size_t max_steps = 200);

}  // namespace spinwave::symbolic
