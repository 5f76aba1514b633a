#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spinwave/rational.hpp"
#include "spinwave/spinor.hpp"

namespace spinwave::symbolic {

/// Kind of an index label: lowercase -> world, trailing prime -> primed,
/// otherwise unprimed.
IndexKind label_kind(const std::string& label);

struct SymmetryGroup {
  std::vector<std::size_t> slots;
  bool antisymmetric = false;
  friend bool operator==(const SymmetryGroup&, const SymmetryGroup&) = default;
};

enum class KernelRole {
  Field,     // ordinary commuting tensor
  Metric,    // eps / M / delta: covariantly constant, eliminated by contraction
  Operator,  // nabla, Delta, Box: acts on everything to its right
};

/// A named indexed object.  `slots` is the reference signature at which
/// (weight, antiweight) is declared; moving an unprimed (primed) index up
/// adds +1 to the weight (antiweight), moving it down adds -1.
struct Kernel {
  std::string name;
  std::vector<Slot> slots;
  std::vector<SymmetryGroup> symmetries;
  Rational weight;
  Rational antiweight;
  KernelRole role = KernelRole::Field;

  /// name plus slot kinds, e.g. "phi[UU]"; distinguishes primed variants.
  std::string key() const;
  bool is_operator() const { return role == KernelRole::Operator; }
  bool is_metric() const { return role == KernelRole::Metric; }
  /// Weight pair for an instance whose slots carry `variances`.
  std::pair<Rational, Rational> weight_at(const std::vector<Variance>& variances) const;
  /// Symmetry group containing `slot`, if any.
  const SymmetryGroup* group_of(std::size_t slot) const;
};

using KernelPtr = std::shared_ptr<const Kernel>;

/// Name -> kernel variants.  Unknown names are declared on first use with no
/// symmetry and weight (up - down)/2 per sector.
class KernelTable {
 public:
  /// The built-in table: eps/M/delta, phi, Psi, omega, R, nabla, Delta, Box,
  /// vartheta.
  static KernelTable builtin();

  void declare(Kernel kernel);
  bool knows(const std::string& name) const { return kernels_.count(name) != 0; }

  /// Finds the variant of `name` whose slot kinds accept `kinds` (written
  /// order); returns it and the slot assigned to each written label.
  std::optional<std::pair<KernelPtr, std::vector<std::size_t>>> resolve(
      const std::string& name, const std::vector<IndexKind>& kinds) const;

  /// Resolve or auto-declare from the written signature.
  std::pair<KernelPtr, std::vector<std::size_t>> resolve_or_declare(const std::string& name,
                                                                     const std::vector<Slot>& written);

  KernelPtr metric(IndexKind kind) const;

 private:
  std::map<std::string, std::vector<KernelPtr>> kernels_;
};

/// The natural density weight (up - down)/2 of unprimed and primed slots.
std::pair<Rational, Rational> natural_weight(const std::vector<Slot>& slots);

}  // namespace spinwave::symbolic
