#pragma once

#include <string_view>

#include "spinwave/symbolic/expr.hpp"

namespace spinwave::symbolic {

/// Parses the index DSL.
///
///   expr    := [+|-] product {(+|-) product}
///   product := item {[*] item}
///   item    := NUMBER [/ NUMBER] | ( expr ) [/ NUMBER] | factor [/ NUMBER]
///   factor  := NAME {(_|^) block}
///   block   := { label | ( | ) | [ | ] }*  |  label
///   label   := A..Z{digit}[']  (unprimed, primed)  |  a..z{digit}  (world)
///
/// Round and square brackets inside index blocks (anti)symmetrize the
/// enclosed labels and may close in a later block or factor of the same
/// product.  `M` and `epsilon` are accepted for `eps`.  Unknown names are
/// declared in `table` from their first written signature.  Errors report
/// the offset `base + local position`.
Expr parse(std::string_view text, KernelTable& table, std::size_t base = 0);

/// parse() with a private copy of the built-in table.
Expr parse(std::string_view text);

/// Parses without validating free indices and weights.
Expr parse_unchecked(std::string_view text, KernelTable& table, std::size_t base = 0);

/// Parses a single factor `NAME_{..}^{..}` into its written slots.
struct WrittenFactor {
  std::string name;
  std::vector<std::string> labels;
  std::vector<Slot> slots;
  std::vector<SymmetryGroup> brackets;
};
WrittenFactor parse_factor_template(std::string_view text, std::size_t base = 0);

}  // namespace spinwave::symbolic
