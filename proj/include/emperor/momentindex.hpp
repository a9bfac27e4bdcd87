#pragma once

#include <cstdint>
#include <vector>

namespace emperor {

/// Exponent vector of a monomial x^alpha = prod_i x_i^{alpha_i}.
struct MultiIndex {
  std::vector<int> exponents;

  int degree() const;
  int dimension() const { return static_cast<int>(exponents.size()); }

  bool operator==(const MultiIndex&) const = default;
};

/// All monomials of fixed total degree k in d variables, in the canonical
/// order used throughout the library: descending lexicographic on the
/// exponent vectors (the first variable's exponent decreases outermost).
/// For d=2, k=2 this reads (2,0), (1,1), (0,2). The order is fixed once here;
/// moment vectors and design-matrix columns are aligned to it.
struct MonomialBasis {
  int dimension = 0;
  int degree = 0;
  std::vector<MultiIndex> indices;

  std::size_t size() const { return indices.size(); }
};

/// Enumerates all multi-indices with |alpha| = k in the canonical order.
/// Rejects d < 1 or k < 0. Two calls with equal (d, k) return element-wise
/// identical sequences.
MonomialBasis enumerate_multi_indices(int d, int k);

/// Exact multinomial coefficient k! / (alpha_1! ... alpha_d!).
/// Requires |alpha| = k. Computed by incremental binomial products so every
/// intermediate is an exact integer; values up to k = 20 always fit, larger
/// k raises Overflow instead of returning a rounded result.
std::uint64_t multinomial_coefficient(int k, const MultiIndex& alpha);

/// Number of monomials of total degree exactly k in d variables,
/// C(d+k-1, k). Raises Overflow if the count exceeds the 64-bit range.
std::uint64_t monomial_count(int d, int k);

}  // namespace emperor
