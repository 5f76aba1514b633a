#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spinwave/symbolic/kernel.hpp"

namespace spinwave::symbolic {

/// One indexed kernel instance.  `labels` and `variances` follow the kernel's
/// template slot order.  `extra` holds symmetrizations written on this factor
/// that the kernel itself does not carry.
struct Factor {
  KernelPtr kernel;
  std::vector<std::string> labels;
  std::vector<Variance> variances;
  std::vector<SymmetryGroup> extra;

  std::size_t rank() const { return labels.size(); }
  IndexKind kind(std::size_t slot) const { return kernel->slots[slot].kind; }
  bool is_operator() const { return kernel->is_operator(); }
  bool is_metric() const { return kernel->is_metric(); }
  /// Kernel symmetries followed by `extra`.
  std::vector<SymmetryGroup> groups() const;
};

/// coeff * f1 f2 ... fn.  Operators act on everything to their right.
struct Term {
  Rational coeff{1};
  std::vector<Factor> factors;
};

struct Expr {
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }
  static Expr zero() { return {}; }
};

struct FreeIndex {
  std::string label;
  IndexKind kind;
  Variance variance;
  friend bool operator==(const FreeIndex&, const FreeIndex&) = default;
};

std::string to_string(const Factor& f);
std::string to_string(const Term& t, bool leading_sign = true);
std::string to_string(const Expr& e);

/// Position of one occurrence of a label.
struct SlotRef {
  std::size_t factor;
  std::size_t slot;
  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

/// Label -> occurrences in slot order.
std::map<std::string, std::vector<SlotRef>> occurrences(const Term& t);

/// Checks that every label occurs once (free) or twice with opposite
/// variance and equal kind (dummy).  Throws index-error otherwise.
void validate_term(const Term& t);

/// Free indices sorted by label.
std::vector<FreeIndex> free_indices(const Term& t);

/// Validates each term, then checks that all terms share one free-index set
/// and one weight.  Throws index-error or weight-error.
void validate(const Expr& e);

/// (weight, antiweight) of a term.
std::pair<Rational, Rational> weight_of(const Term& t);
/// Homogeneous weight of an expression; throws weight-error if terms differ.
/// The zero expression has weight (0, 0).
std::pair<Rational, Rational> weight_of(const Expr& e);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Rational& c, const Expr& e);
/// Distributes the product, preserving factor order.
Expr operator*(const Expr& a, const Expr& b);

}  // namespace spinwave::symbolic
