#include "emperor/momentindex.hpp"

#include <limits>
#include <numeric>
#include <string>

#include "emperor/errors.hpp"

namespace emperor {

namespace {

void check_dimension_degree(int d, int k) {
  if (d < 1) fail(ErrorCode::InvalidArgument, "dimension must be >= 1, got " + std::to_string(d));
  if (k < 0) fail(ErrorCode::InvalidArgument, "degree must be >= 0, got " + std::to_string(k));
}

void emit_indices(int remaining_vars, int remaining_degree,
                  std::vector<int>& current, std::vector<MultiIndex>& out) {
  if (remaining_vars == 1) {
    current.push_back(remaining_degree);
    out.push_back(MultiIndex{current});
    current.pop_back();
    return;
  }
  for (int e = remaining_degree; e >= 0; --e) {
    current.push_back(e);
    emit_indices(remaining_vars - 1, remaining_degree - e, current, out);
    current.pop_back();
  }
}

}  // namespace

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MonomialBasis enumerate_multi_indices(int d, int k) {
  check_dimension_degree(d, k);
  const std::uint64_t count = monomial_count(d, k);

  MonomialBasis basis;
  basis.dimension = d;
  basis.degree = k;
  basis.indices.reserve(count);
  std::vector<int> current;
  current.reserve(d);
  emit_indices(d, k, current, basis.indices);
  return basis;
}

std::uint64_t multinomial_coefficient(int k, const MultiIndex& alpha) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "degree must be >= 0");
  for (int a : alpha.exponents) {
    if (a < 0) fail(ErrorCode::InvalidArgument, "multi-index entries must be >= 0");
  }
  if (alpha.degree() != k) {
    fail(ErrorCode::InvalidArgument,
         "|alpha| = " + std::to_string(alpha.degree()) + " does not equal k = " + std::to_string(k));
  }

  // Product of binomials C(a_1, a_1) C(a_1+a_2, a_2) ... built up one unit at
  // a time; r * n is always divisible by j, so every step stays exact.
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  std::uint64_t n = 0;
  for (int a : alpha.exponents) {
    for (int j = 1; j <= a; ++j) {
      ++n;
      if (r > kMax / n) {
        fail(ErrorCode::Overflow, "multinomial coefficient exceeds 64-bit range at k = " + std::to_string(k));
      }
      r = r * n / static_cast<std::uint64_t>(j);
    }
  }
  return r;
}

std::uint64_t monomial_count(int d, int k) {
  check_dimension_degree(d, k);
  // C(d+k-1, k) by incremental multiply/divide; after step i the value is
  // C(d-1+i, i), so the division is exact.
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(d - 1 + i);
    if (r > kMax / num) {
      fail(ErrorCode::Overflow, "monomial count exceeds 64-bit range for d = " +
                                    std::to_string(d) + ", k = " + std::to_string(k));
    }
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

}  // namespace emperor
