#include "rtp/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rtp {

std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("binomial: require 0 <= k <= n, got n=" + std::to_string(n) +
                                " k=" + std::to_string(k));
  }
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    std::uint64_t factor = static_cast<std::uint64_t>(n - k + i);
    std::uint64_t divisor = static_cast<std::uint64_t>(i);
    // C(n-k+i, i) is an integer, so after cancelling gcd(result, i) the rest
    // of i divides the factor.
    const std::uint64_t g = std::gcd(result, divisor);
    result /= g;
    divisor /= g;
    factor /= divisor;
    std::uint64_t next;
    if (__builtin_mul_overflow(result, factor, &next)) {
      throw std::overflow_error("binomial: C(" + std::to_string(n) + "," + std::to_string(k) +
                                ") exceeds 64-bit unsigned range");
    }
    result = next;
  }
  return result;
}

double log_binomial(double n, double k) {
  if (k < 0.0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial_as_double(int n, int k) {
  try {
    return static_cast<double>(binomial(n, k));
  } catch (const std::overflow_error&) {
    return std::exp(log_binomial(n, k));
  }
}

namespace {

// C(c, j) under the combinatorial-number-system convention C(c, j) = 0 for c < j.
std::uint64_t choose0(int c, int j) { return c < j ? 0 : binomial(c, j); }

void validate_subset(const SubsetIndex& s, int n, int d) {
  if (static_cast<int>(s.members.size()) != d) {
    throw std::invalid_argument("subset: expected " + std::to_string(d) + " members, got " +
                                std::to_string(s.members.size()));
  }
  int prev = 0;
  for (int m : s.members) {
    if (m <= prev || m > n) {
      throw std::invalid_argument("subset: members must be strictly increasing in [1, n]");
    }
    prev = m;
  }
}

}  // namespace

std::uint64_t rank_subset(const SubsetIndex& s, int n, int d) {
  validate_subset(s, n, d);
  std::uint64_t rank = 0;
  for (int j = 1; j <= d; ++j) {
    rank += choose0(s.members[j - 1] - 1, j);
  }
  return rank;
}

SubsetIndex unrank_subset(std::uint64_t rank, int n, int d) {
  if (d < 0 || d > n) {
    throw std::invalid_argument("unrank_subset: require 0 <= d <= n");
  }
  if (rank >= binomial(n, d)) {
    throw std::invalid_argument("unrank_subset: rank " + std::to_string(rank) +
                                " out of range for C(" + std::to_string(n) + "," +
                                std::to_string(d) + ")");
  }
  SubsetIndex s;
  s.members.resize(d);
  int hi = n - 1;  // candidate for s_j - 1, decreasing across positions
  for (int j = d; j >= 1; --j) {
    int c = hi;
    while (choose0(c, j) > rank) --c;
    s.members[j - 1] = c + 1;
    rank -= choose0(c, j);
    hi = c - 1;
  }
  return s;
}

}  // namespace rtp
