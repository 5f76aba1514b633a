#pragma once

// Dense complex spinor/tensor components in the epsilon formalism.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "spinwave/error.hpp"

namespace spinwave {

using Complex = std::complex<double>;

enum class IndexKind { Unprimed, Primed, World };
enum class Variance { Up, Down };

inline Variance flipped(Variance v) { return v == Variance::Up ? Variance::Down : Variance::Up; }

/// 2 for spinor slots, 4 for world slots.
constexpr int dimension(IndexKind kind) { return kind == IndexKind::World ? 4 : 2; }

/// Unprimed <-> primed; world is unchanged.
constexpr IndexKind conjugate_kind(IndexKind kind) {
  switch (kind) {
    case IndexKind::Unprimed: return IndexKind::Primed;
    case IndexKind::Primed: return IndexKind::Unprimed;
    case IndexKind::World: return IndexKind::World;
  }
  return kind;
}

struct Slot {
  IndexKind kind = IndexKind::Unprimed;
  Variance variance = Variance::Down;
  friend bool operator==(const Slot&, const Slot&) = default;
};

class IndexSignature {
 public:
  IndexSignature() = default;
  IndexSignature(std::initializer_list<Slot> slots) : slots_(slots) {}
  explicit IndexSignature(std::vector<Slot> slots) : slots_(std::move(slots)) {}

  std::size_t rank() const { return slots_.size(); }
  const Slot& operator[](std::size_t i) const { return slots_.at(i); }
  const std::vector<Slot>& slots() const { return slots_; }

  /// Number of components: product of slot dimensions.
  std::size_t size() const;
  std::vector<std::size_t> strides() const;

  IndexSignature without(std::size_t i, std::size_t j) const;
  IndexSignature with_variance(std::size_t i, Variance v) const;
  IndexSignature conjugated() const;
  IndexSignature concat(const IndexSignature& other) const;

  std::string str() const;
  friend bool operator==(const IndexSignature&, const IndexSignature&) = default;

 private:
  std::vector<Slot> slots_;
};

/// Complex multi-index array; row-major over the slots of its signature.
class ComponentSpinor {
 public:
  ComponentSpinor() : data_(1, Complex{0.0, 0.0}) {}
  explicit ComponentSpinor(IndexSignature sig);
  ComponentSpinor(IndexSignature sig, std::vector<Complex> data);

  static ComponentSpinor scalar(Complex value);

  const IndexSignature& signature() const { return sig_; }
  std::size_t rank() const { return sig_.rank(); }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  std::size_t offset(std::span<const int> index) const;
  Complex& operator()(std::span<const int> index) { return data_[offset(index)]; }
  const Complex& operator()(std::span<const int> index) const { return data_[offset(index)]; }
  Complex& at(std::initializer_list<int> index) {
    return data_[offset(std::span<const int>(index.begin(), index.size()))];
  }
  const Complex& at(std::initializer_list<int> index) const {
    return data_[offset(std::span<const int>(index.begin(), index.size()))];
  }

  ComponentSpinor& operator+=(const ComponentSpinor& o);
  ComponentSpinor& operator-=(const ComponentSpinor& o);
  ComponentSpinor& operator*=(Complex s);
  friend ComponentSpinor operator+(ComponentSpinor a, const ComponentSpinor& b) { return a += b; }
  friend ComponentSpinor operator-(ComponentSpinor a, const ComponentSpinor& b) { return a -= b; }
  friend ComponentSpinor operator*(Complex s, ComponentSpinor a) { return a *= s; }

 private:
  IndexSignature sig_;
  std::vector<Complex> data_;
};

/// Calls fn(index) for every index assignment of sig in row-major order.
template <typename Fn>
void for_each_index(const IndexSignature& sig, Fn&& fn) {
  std::vector<int> idx(sig.rank(), 0);
  const std::size_t n = sig.size();
  for (std::size_t count = 0; count < n; ++count) {
    fn(std::span<const int>(idx));
    for (std::size_t k = sig.rank(); k-- > 0;) {
      if (++idx[k] < dimension(sig[k].kind)) break;
      idx[k] = 0;
    }
  }
}

/// Which epsilon slot is summed when displacing an index.
enum class Displacement {
  /// xi^A = xi_B eps^{BA}, xi_A = eps_{AB} xi^B (the default)
  RaiseFirstLowerSecond,
  /// xi^A = eps^{AB} xi_B, xi_B = xi^A eps_{AB}
  RaiseSecondLowerFirst,
};

/// Epsilon components used for index displacement, eps_{01} = eps^{01} = +1
/// by default.  Only RaiseFirstLowerSecond makes the full-affinity and
/// symmetric-affinity covariant derivative forms coincide.
struct MetricSpinorConvention {
  std::array<std::array<double, 2>, 2> eps_low{{{0.0, 1.0}, {-1.0, 0.0}}};
  std::array<std::array<double, 2>, 2> eps_up{{{0.0, 1.0}, {-1.0, 0.0}}};
  Displacement displacement = Displacement::RaiseFirstLowerSecond;

  static const MetricSpinorConvention& standard();
  /// Same eps values with the RaiseSecondLowerFirst side.
  static const MetricSpinorConvention& penrose();
  /// eps^{AB} eps_{CB} = delta^A_C and raise-then-lower is the identity.
  bool consistent() const;
};

/// eps with the given slot kind (spinor only) and variances.
ComponentSpinor epsilon(IndexKind kind, Variance first, Variance second,
                        const MetricSpinorConvention& conv = MetricSpinorConvention::standard());

ComponentSpinor outer(const ComponentSpinor& a, const ComponentSpinor& b);
ComponentSpinor contract(const ComponentSpinor& s, std::size_t i, std::size_t j);
ComponentSpinor raise_lower(const ComponentSpinor& s, std::size_t i, Variance target,
                            const MetricSpinorConvention& conv = MetricSpinorConvention::standard());

enum class SymmetryMode { Symmetric, Antisymmetric };
ComponentSpinor symmetrize(const ComponentSpinor& s, std::span<const std::size_t> slots,
                           SymmetryMode mode);
ComponentSpinor symmetrize(const ComponentSpinor& s, std::initializer_list<std::size_t> slots,
                           SymmetryMode mode);

/// Complex conjugate with unprimed and primed slots exchanged.
ComponentSpinor conjugate(const ComponentSpinor& s);

/// result slot k is input slot perm[k].
ComponentSpinor permute(const ComponentSpinor& s, std::span<const std::size_t> perm);

double max_abs(const ComponentSpinor& s);
double max_abs_diff(const ComponentSpinor& a, const ComponentSpinor& b);

}  // namespace spinwave
