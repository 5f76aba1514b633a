#pragma once

#include <string>

#include "spinwave/symbolic/expr.hpp"

namespace spinwave::symbolic {

/// Signs of the metric-spinor manipulations, read off numerically from a
/// MetricSpinorConvention so the symbolic and component paths cannot drift.
struct ConventionSigns {
  /// contract[v0][v1][i]: eps with slot variances (v0, v1) contracted on
  /// slot i against a spinor xi gives contract * xi carrying variance v_{1-i}.
  int contract[2][2][2] = {};
  /// eps^X_X and eps_X^X.
  int trace_up_down = 0;
  int trace_down_up = 0;
  /// X_{..P..Q..} - X_{..Q..P..} = pair * eps_{PQ} X_{..D..}{}^{..}{}_{..D..}
  /// where slot p of the right-hand X is raised and slot q lowered.
  int pair = 0;

  static ConventionSigns from(const MetricSpinorConvention& conv);
};

/// Normal form: metric contractions eliminated, symmetric groups sorted,
/// free indices moved ahead of dummies through the pair identity, factors
/// ordered (metrics, commuting prefix, operator word with sorted operand),
/// dummies renamed by first occurrence with the up occurrence first, and like
/// terms collected.  Terms are ordered by their printed form.
Expr canonicalize(const Expr& e, const MetricSpinorConvention& conv = MetricSpinorConvention::standard());

/// Eliminates every metric spinor that has a contracted index, and metric
/// traces, in place.
void eliminate_metrics(Term& t, const ConventionSigns& sg);

/// A label not produced by the parser, for internal dummies.
std::string fresh_label();

/// Printed form of a term without its coefficient; equal keys mean like terms.
std::string factor_key(const Term& t);

}  // namespace spinwave::symbolic
