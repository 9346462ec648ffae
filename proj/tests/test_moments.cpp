#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "rtp/errors.hpp"
#include "rtp/moments.hpp"

using namespace rtp;



TEST_CASE("exact_norm_variance frozen and degenerate values") {
  CHECK(exact_norm_variance(4, 2, 3.0) == 96.0);
  for (int n : {3, 6, 10, 20}) {
    for (int d = 1; d <= std::min(4, n); ++d) {
      CHECK(exact_norm_variance(n, d, 1.0) == 0.0);  // Rademacher norms are deterministic
    }
  }
  // d = 1 closed form: n (B - 1).
  CHECK(exact_norm_variance(12, 1, 3.0) == 24.0);
  CHECK_THROWS_AS(exact_norm_variance(4, 5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(exact_norm_variance(4, 2, 0.5), std::invalid_argument);
}

TEST_CASE("exact_norm_variance equals the symbolic expansion exactly, n <= 10") {
  for (int n = 1; n <= 10; ++n) {
    for (int d = 1; d <= std::min(3, n); ++d) {
      for (double b : {1.0, 3.0}) {
        CHECK(exact_norm_variance(n, d, b) == oracles::variance_by_expansion(n, d, b));
      }
    }
  }
}

TEST_CASE("variance ratio is stable against the large-size path") {
  // n = 128, d = 16 forces the log-space branch; the ratio must still match
  // a directly computed log-sum.
  const double ratio = exact_norm_variance_ratio(128, 16, 9.0);
  double reference = 0.0;
  for (int k = 1; k <= 16; ++k) {
    const double log_term = std::log(std::pow(9.0, k) - 1.0) + log_binomial(16, k) +
                            log_binomial(112, 16 - k) - log_binomial(128, 16);
    reference += std::exp(log_term);
  }
  CHECK(ratio == doctest::Approx(reference).epsilon(1e-10));
}

TEST_CASE("column-norm concentration ratio stays in a fixed band at d = 2") {
  // Var(||Z0||^2) / N^2 * (n / d^2) for fixed B: the normalized variance per
  // squared feature count, which should neither vanish nor blow up.
  for (int n : {16, 32, 64, 128}) {
    const double scaled = exact_norm_variance_ratio(n, 2, 3.0) * n / 4.0;
    CHECK(scaled >= 1.5);
    CHECK(scaled <= 2.5);
  }
}

TEST_CASE("variance_upper_bound values and applicability") {
  const BoundValue tight = variance_upper_bound(4, 2, 3.0);
  CHECK(tight.value == doctest::Approx(216.0 * std::exp(-1.0 / 3.0)).epsilon(1e-12));
  CHECK(tight.value >= 96.0);
  CHECK_FALSE(tight.applicable);  // B = 3 > (n - 2d + 2)/(d-1)^2 = 2

  const BoundValue ok = variance_upper_bound(20, 2, 3.0);
  CHECK(ok.applicable);
  CHECK(exact_norm_variance(20, 2, 3.0) <= ok.value);

  CHECK_FALSE(variance_upper_bound(10, 4, 3.0).applicable);  // B > 4/9

  for (int n : {4, 8, 16, 32, 64}) {
    for (double b : {1.0, 2.0, 3.0, 9.0}) {
      const BoundValue d1 = variance_upper_bound(n, 1, b);
      CHECK(d1.applicable);  // d = 1 always applicable
      CHECK(d1.value == doctest::Approx(2.0 * n * b).epsilon(1e-12));
      CHECK(exact_norm_variance(n, 1, b) <= d1.value + 1e-12);
    }
  }
}

TEST_CASE("variance_lower_bound values and applicability") {
  const BoundValue ok = variance_lower_bound(20, 2, 3.0);
  CHECK(ok.applicable);
  CHECK(ok.value <= exact_norm_variance(20, 2, 3.0));
  CHECK(variance_lower_bound(20, 2, 1.0).value == 0.0);
  CHECK_FALSE(variance_lower_bound(20, 2, 1.0).applicable);
  CHECK_FALSE(variance_lower_bound(25, 6, 3.0).applicable);  // d > n/5
}

TEST_CASE("variance_lower_bound_large_d") {
  const RatioBound bound = variance_lower_bound_large_d(128, 16, 9.0);
  CHECK(bound.applicable);  // sqrt(256) = 16 <= 16 <= 128/8
  CHECK(bound.ratio_to_n_sq <= exact_norm_variance_ratio(128, 16, 9.0));
  CHECK(bound.log_n_sq == doctest::Approx(2.0 * log_binomial(128, 16)));
  CHECK_FALSE(variance_lower_bound_large_d(32, 8, 9.0).applicable);  // d > n/8
  CHECK(variance_lower_bound_large_d(128, 16, 1.0).ratio_to_n_sq == 0.0);
}

TEST_CASE("bound sandwich sweep never throws") {
  for (int n : {8, 16, 32, 64, 128}) {
    for (int d = 1; d <= std::min(16, n / 2); ++d) {
      for (double b : {1.0, 2.0, 3.0, 9.0}) {
        CHECK_NOTHROW(variance_report(n, d, b));
      }
    }
  }
}

TEST_CASE("mc_norm_variance matches the exact formula") {
  SUBCASE("rademacher is deterministic") {
    const MonteCarloEstimate mc = mc_norm_variance(
        ModelParams::create(8, 2, 1), MomentModel::rademacher(), 2000, SeededRng(4));
    CHECK(mc.estimate == 0.0);
    CHECK(mc.std_error == 0.0);
  }
  SUBCASE("gaussian n=4 d=2 within three standard errors of 96") {
    const MonteCarloEstimate mc = mc_norm_variance(
        ModelParams::create(4, 2, 1), MomentModel::gaussian(), 100000, SeededRng(21));
    CHECK(std::abs(mc.estimate - 96.0) <= 3.0 * mc.std_error);
  }
  SUBCASE("three-point n=10 d=2 within three standard errors") {
    const double exact = exact_norm_variance(10, 2, 4.0);
    const MonteCarloEstimate mc = mc_norm_variance(
        ModelParams::create(10, 2, 1), MomentModel::three_point(4.0), 100000, SeededRng(22));
    CHECK(std::abs(mc.estimate - exact) <= 3.0 * mc.std_error);
  }
  CHECK_THROWS_AS(mc_norm_variance(ModelParams::create(4, 2, 1), MomentModel::gaussian(), 999,
                                   SeededRng(1)),
                  std::invalid_argument);
}

TEST_CASE("shared_degrees") {
  SUBCASE("disjoint subsets share nothing") {
    const std::vector<SubsetIndex> tuple = {{{1, 2}}, {{3, 4}}, {{5, 6}}, {{7, 8}}};
    CHECK(shared_degrees(tuple) == std::vector<int>{0, 0, 0, 0});
  }
  SUBCASE("hand-checked overlap across counterpart pairs") {
    const std::vector<SubsetIndex> tuple = {{{1, 2}}, {{1, 2}}, {{2, 3}}, {{2, 3}}};
    CHECK(shared_degrees(tuple) == std::vector<int>{1, 1, 1, 1});
  }
  SUBCASE("a single counterpart pair is always excluded") {
    const std::vector<SubsetIndex> tuple = {{{1, 2}}, {{1, 2}}};
    CHECK(shared_degrees(tuple) == std::vector<int>{0, 0});
  }
  CHECK_THROWS_AS(shared_degrees({{{1, 2}}}), std::invalid_argument);
  CHECK_THROWS_AS(shared_degrees({{{1, 2}}, {{1, 2, 3}}}), std::invalid_argument);
}

TEST_CASE("tensor_moment") {
  const MomentModel gauss = MomentModel::gaussian();
  CHECK(tensor_moment(gauss, {{{1, 2}}, {{1, 2}}}) == 1.0);
  CHECK(tensor_moment(gauss, {{{1, 2}}, {{2, 3}}}) == 0.0);  // odd exponents at 1 and 3
  CHECK(tensor_moment(gauss, {{{1, 2}}, {{1, 2}}, {{1, 3}}, {{1, 3}}}) == 3.0);
  CHECK(tensor_moment(MomentModel::rademacher(), {{{1, 2}}, {{1, 2}}, {{1, 3}}, {{1, 3}}}) ==
        1.0);
  CHECK_THROWS_AS(tensor_moment(gauss, {}), std::invalid_argument);
}

TEST_CASE("tensor moments obey the shared-degree bound") {
  SeededRng rng(73);
  const MomentModel gauss = MomentModel::gaussian();
  int nonzero = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_u64() % 5);
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m = 1 + static_cast<int>(rng.next_u64() % 3);
    std::vector<SubsetIndex> tuple;
    for (int i = 0; i < 2 * m; ++i) {
      tuple.push_back(unrank_subset(rng.next_u64() % binomial(n, d), n, d));
    }
    const double moment = tensor_moment(gauss, tuple);
    CHECK(moment >= 0.0);
    int degree_sum = 0;
    for (int deg : shared_degrees(tuple)) degree_sum += deg;
    const double cap = std::pow(gauss.even_moment(m), 0.5 * degree_sum);
    CHECK(moment <= cap * (1.0 + 1e-12));
    if (moment > 0.0) ++nonzero;
  }
  CHECK(nonzero > 50);  // the sample actually exercises nontrivial tuples
}

TEST_CASE("c_moment brute force vs independent counting oracle") {
  CHECK(c_moment(1, 5, {2}, MomentModel::gaussian()) == 1.0);
  CHECK(c_moment(2, 3, {1, 1}, MomentModel::gaussian()) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(c_moment(2, 3, {1, 1}, MomentModel::rademacher()) == 1.0);

  for (const auto& model : {MomentModel::rademacher(), MomentModel::gaussian()}) {
    for (int n = 2; n <= 8; ++n) {
      for (int d1 = 1; d1 <= std::min(3, n); ++d1) {
        CHECK(c_moment(1, n, {d1}, model) == oracles::c_moment_by_counting(n, {d1}, model));
        for (int d2 = d1; d2 <= std::min(3, n); ++d2) {
          const std::vector<int> d_list = {d1, d2};
          CHECK(c_moment(2, n, d_list, model) == oracles::c_moment_by_counting(n, d_list, model));
        }
      }
    }
  }
  CHECK_THROWS_AS(c_moment(2, 30, {5, 5}, MomentModel::gaussian()), ResourceError);
  CHECK_THROWS_AS(c_moment(2, 5, {1}, MomentModel::gaussian()), std::invalid_argument);
}

TEST_CASE("c_moment_bound applicability arithmetic") {
  const BoundValue wide = c_moment_bound(2, 400, {1, 1}, 1.0);
  CHECK(wide.applicable);  // s = 2 <= 20/(3e)
  CHECK(wide.value > 1.0);

  const BoundValue narrow = c_moment_bound(3, 4, {1, 1, 1}, 2.0);
  CHECK_FALSE(narrow.applicable);  // s = 3 > 2/(6e)

  const BoundValue tiny = c_moment_bound(1, 10000, {1}, 1.0);
  CHECK(tiny.applicable);
  CHECK(tiny.value > 1.0);
  CHECK(tiny.value < 1.01);
  CHECK(c_moment(1, 8, {1}, MomentModel::gaussian()) <= tiny.value);
}
