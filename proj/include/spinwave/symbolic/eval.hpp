#pragma once

#include <map>
#include <string>

#include "spinwave/random.hpp"
#include "spinwave/symbolic/expr.hpp"

namespace spinwave::symbolic {

/// Kernel components at the kernel's reference signature, keyed by kernel
/// name, or by Kernel::key() where a name has several variants.
using Bindings = std::map<std::string, ComponentSpinor>;

/// Brute-force evaluation by enumerating every index value.  The result's
/// slots are the free indices in label order.  Metric spinors come from
/// `conv`.  Throws unsupported-expression for operators and unbound-kernel
/// for kernels missing from `bindings`.
ComponentSpinor component_eval(const Expr& e, const Bindings& bindings,
                               const MetricSpinorConvention& conv = MetricSpinorConvention::standard());

/// Random unit-scale components for every field kernel in `e`, respecting the
/// declared symmetries.
Bindings random_bindings(const Expr& e, Rng& rng,
                         const MetricSpinorConvention& conv = MetricSpinorConvention::standard());

/// Symmetrizes slots of possibly mixed variance by lowering them first.
ComponentSpinor symmetrize_lowered(const ComponentSpinor& s, const std::vector<std::size_t>& slots,
                                   SymmetryMode mode, const MetricSpinorConvention& conv);

}  // namespace spinwave::symbolic
