#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rtp/combinatorics.hpp"

using namespace rtp;

namespace {

// Pascal-triangle oracle, additive recurrence only; rows up to 34 stay well
// inside 64 bits.
std::vector<std::vector<std::uint64_t>> pascal_table(int rows) {
  std::vector<std::vector<std::uint64_t>> table(rows + 1);
  for (int n = 0; n <= rows; ++n) {
    table[n].resize(n + 1);
    table[n][0] = table[n][n] = 1;
    for (int k = 1; k < n; ++k) table[n][k] = table[n - 1][k - 1] + table[n - 1][k];
  }
  return table;
}

// All d-subsets of {1..n} in colexicographic order (largest differing member
// decides), generated by plain enumeration plus an explicit comparator.
std::vector<std::vector<int>> colex_enumeration(int n, int d) {
  std::vector<std::vector<int>> all;
  std::vector<int> current;
  auto recurse = [&](auto&& self, int next) -> void {
    if (static_cast<int>(current.size()) == d) {
      all.push_back(current);
      return;
    }
    for (int v = next; v <= n; ++v) {
      current.push_back(v);
      self(self, v + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 1);
  std::sort(all.begin(), all.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  return all;
}

}  // namespace

TEST_CASE("binomial matches the Pascal-triangle oracle") {
  const auto table = pascal_table(34);
  for (int n = 0; n <= 34; ++n) {
    for (int k = 0; k <= n; ++k) {
      CAPTURE(n);
      CAPTURE(k);
      CHECK(binomial(n, k) == table[n][k]);
    }
  }
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(17, 0) == 1);
  CHECK(binomial(30, 15) == 155117520ull);  // frozen from the oracle
}

TEST_CASE("binomial rejects bad input and overflow") {
  CHECK_THROWS_AS(binomial(3, 5), std::invalid_argument);
  CHECK_THROWS_AS(binomial(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(binomial(130, 65), std::overflow_error);
  CHECK_THROWS_AS(binomial(128, 16), std::overflow_error);
  CHECK(binomial(62, 28) > 0);  // near the top of the representable range
}

TEST_CASE("binomial_as_double falls back past 64 bits") {
  CHECK(binomial_as_double(10, 3) == 120.0);
  const double big = binomial_as_double(128, 16);
  CHECK(big > 1e19);
  CHECK(big == doctest::Approx(std::exp(log_binomial(128, 16))).epsilon(1e-12));
}

TEST_CASE("rank_subset frozen examples") {
  CHECK(rank_subset({{3}}, 4, 1) == 2);
  CHECK(rank_subset({{1, 3}}, 4, 2) == 1);  // colex enumeration oracle below
  CHECK(rank_subset({{3, 4}}, 4, 2) == 5);
  CHECK(unrank_subset(0, 4, 2).members == std::vector<int>{1, 2});
  CHECK(unrank_subset(3, 4, 2).members == std::vector<int>{1, 4});
  CHECK(unrank_subset(4, 5, 1).members == std::vector<int>{5});
}

TEST_CASE("rank/unrank agree with colex enumeration and round-trip, n <= 12") {
  for (int n = 1; n <= 12; ++n) {
    for (int d = 1; d <= n; ++d) {
      const auto order = colex_enumeration(n, d);
      REQUIRE(order.size() == binomial(n, d));
      for (std::uint64_t r = 0; r < order.size(); ++r) {
        CHECK(unrank_subset(r, n, d).members == order[r]);
        CHECK(rank_subset({order[r]}, n, d) == r);
      }
    }
  }
}

TEST_CASE("subset validation") {
  CHECK_THROWS_AS(rank_subset({{3, 2}}, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(rank_subset({{1, 5}}, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(rank_subset({{1, 1}}, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(rank_subset({{1}}, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(unrank_subset(6, 4, 2), std::invalid_argument);
}
