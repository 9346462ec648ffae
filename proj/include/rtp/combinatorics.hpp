#pragma once

#include <cstdint>
#include <vector>

namespace rtp {

// Exact C(n, k) in 64-bit unsigned arithmetic. Each step multiplies by
// (n-k+i) and divides by i exactly (gcd cancellation first), so no
// intermediate exceeds the final value times n. Throws std::overflow_error
// when the result does not fit, std::invalid_argument when k > n.
std::uint64_t binomial(int n, int k);

// log C(n, k) via lgamma; companion for bound formulas at sizes where the
// exact value overflows.
double log_binomial(double n, double k);

// C(n, k) as a double: exact when it fits in 64 bits, exp(log C) otherwise.
double binomial_as_double(int n, int k);

// A d-subset of {1, ..., n}, members strictly increasing.
struct SubsetIndex {
  std::vector<int> members;
};

// Colexicographic rank of s among the d-subsets of {1..n}:
// rank = sum_j C(s_j - 1, j), j = 1..d. Inverse of unrank_subset.
std::uint64_t rank_subset(const SubsetIndex& s, int n, int d);

// Greedy largest-binomial decoding of a colex rank in [0, C(n,d)).
SubsetIndex unrank_subset(std::uint64_t rank, int n, int d);

}  // namespace rtp
