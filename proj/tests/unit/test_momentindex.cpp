#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "emperor/errors.hpp"
#include "emperor/momentindex.hpp"

using namespace emperor;

TEST_SUITE("momentindex") {

TEST_CASE("canonical order for d=2, k=2") {
  MonomialBasis basis = enumerate_multi_indices(2, 2);
  REQUIRE(basis.size() == 3);
  CHECK(basis.indices[0].exponents == std::vector<int>{2, 0});
  CHECK(basis.indices[1].exponents == std::vector<int>{1, 1});
  CHECK(basis.indices[2].exponents == std::vector<int>{0, 2});
}

TEST_CASE("canonical order for d=3, k=2") {
  MonomialBasis basis = enumerate_multi_indices(3, 2);
  REQUIRE(basis.size() == 6);
  const std::vector<std::vector<int>> expected{
      {2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(basis.indices[i].exponents == expected[i]);
  }
}

TEST_CASE("enumeration size matches the closed-form count") {
  for (int d = 1; d <= 5; ++d) {
    for (int k = 0; k <= 6; ++k) {
      MonomialBasis basis = enumerate_multi_indices(d, k);
      CHECK(basis.size() == monomial_count(d, k));
      CHECK(basis.dimension == d);
      CHECK(basis.degree == k);
    }
  }
}

TEST_CASE("every index has total degree k, no duplicates, stable order") {
  MonomialBasis a = enumerate_multi_indices(4, 5);
  MonomialBasis b = enumerate_multi_indices(4, 5);
  std::set<std::vector<int>> seen;
  for (const MultiIndex& alpha : a.indices) {
    CHECK(alpha.degree() == 5);
    CHECK(alpha.dimension() == 4);
    seen.insert(alpha.exponents);
  }
  CHECK(seen.size() == a.size());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.indices[i] == b.indices[i]);
  }
}

TEST_CASE("enumeration rejects bad arguments") {
  CHECK_THROWS_AS(enumerate_multi_indices(0, 2), Error);
  CHECK_THROWS_AS(enumerate_multi_indices(2, -1), Error);
}

TEST_CASE("multinomial coefficients: known values") {
  CHECK(multinomial_coefficient(4, MultiIndex{{2, 1, 1}}) == 12);
  CHECK(multinomial_coefficient(0, MultiIndex{{0, 0}}) == 1);
  CHECK(multinomial_coefficient(3, MultiIndex{{3, 0}}) == 1);
  CHECK(multinomial_coefficient(5, MultiIndex{{1, 1, 1, 1, 1}}) == 120);
  CHECK(multinomial_coefficient(4, MultiIndex{{2, 2}}) == 6);
  CHECK(multinomial_coefficient(6, MultiIndex{{2, 2, 2}}) == 90);
}

TEST_CASE("multinomial coefficients sum to d^k over a degree shell") {
  const int d = 3;
  const int k = 4;
  MonomialBasis basis = enumerate_multi_indices(d, k);
  std::uint64_t total = 0;
  for (const MultiIndex& alpha : basis.indices) {
    total += multinomial_coefficient(k, alpha);
  }
  CHECK(total == 81);  // 3^4
}

TEST_CASE("multinomial coefficient contract violations") {
  CHECK_THROWS_AS(multinomial_coefficient(3, MultiIndex{{2, 2}}), Error);
  CHECK_THROWS_AS(multinomial_coefficient(2, MultiIndex{{3, -1}}), Error);
  try {
    multinomial_coefficient(3, MultiIndex{{1, 1}});
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("values too large for 64 bits raise Overflow, not garbage") {
  // C(70, 35) = 70!/(35!35!) is about 1.1e20 > 2^64 - 1.
  try {
    multinomial_coefficient(70, MultiIndex{{35, 35}});
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
  CHECK_THROWS_AS(monomial_count(1000, 1000), Error);
}

TEST_CASE("monomial counts: known values") {
  CHECK(monomial_count(3, 4) == 15);
  CHECK(monomial_count(1, 9) == 1);
  CHECK(monomial_count(7, 0) == 1);
  CHECK(monomial_count(2, 5) == 6);
  CHECK(monomial_count(4, 3) == 20);
}

}  // TEST_SUITE
