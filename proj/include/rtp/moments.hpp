#pragma once

#include <vector>

#include "rtp/combinatorics.hpp"
#include "rtp/model.hpp"

namespace rtp {

// Var(||Z0||^2) = C(n,d) sum_{k=1..d} (B^k - 1) C(d,k) C(n-d,d-k) with
// B = E[x^4]. Exact 64-bit arithmetic when every factor fits, log-space
// per-term evaluation otherwise; both paths sum with compensation.
double exact_norm_variance(int n, int d, double fourth_moment);

// Var(||Z0||^2) / N^2; safe at sizes where N^2 dwarfs the 64-bit range.
double exact_norm_variance_ratio(int n, int d, double fourth_moment);

// A bound value paired with the precondition of the lemma that proves it.
// The value is always evaluated so callers can inspect it; it is only a
// theorem when applicable is true.
struct BoundValue {
  double value = 0.0;
  bool applicable = false;
};

// Upper bound 2 N^2 B (d^2/n) e^{-(d-1)^2/(n-1)}; applicable when d <= n/2
// and B <= (n-2d+2)/(d-1)^2 (d = 1 is always applicable).
BoundValue variance_upper_bound(int n, int d, double fourth_moment);

// Lower bound N^2 (B-1) (d^2/n) e^{-2(d-1)^2/(n-d+1)}; applicable when
// d <= n/5 and B > 1.
BoundValue variance_lower_bound(int n, int d, double fourth_moment);

// Large-d lower bound N^2 (1 - B^{-d^2/n})/8 (B/(8 e^4))^{d^2/n}, reported
// as a ratio to N^2 plus log N^2 so the caller never forms an overflowing
// product; applicable when sqrt(2n) <= d <= n/8.
struct RatioBound {
  double ratio_to_n_sq = 0.0;
  double log_n_sq = 0.0;
  bool applicable = false;
};
RatioBound variance_lower_bound_large_d(int n, int d, double fourth_moment);

// All of the above for one (n, d, B); construction verifies the sandwich
// lower <= exact <= upper wherever the applicability flags hold and throws
// logic_error on a violation.
struct VarianceReport {
  double exact = 0.0;
  double exact_ratio = 0.0;
  BoundValue upper;
  BoundValue lower;
  RatioBound lower_large_d;
};
VarianceReport variance_report(int n, int d, double fourth_moment);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Unbiased sample variance of ||Z0||^2 over independent column draws;
// standard error by the fourth-central-moment plug-in. trials >= 1000.
MonteCarloEstimate mc_norm_variance(const ModelParams& params, const MomentModel& model,
                                    int trials, const SeededRng& rng);

// Shared degrees of a tuple of 2m equal-size subsets paired into
// counterparts (1,2), (3,4), ...: entry v counts the members of subset v
// appearing in some subset outside {v, counterpart(v)}.
std::vector<int> shared_degrees(const std::vector<SubsetIndex>& subsets);

// E[prod over subsets of prod_{i in subset} x_i]: counts the exponent of
// each variable, returns 0 if any is odd (symmetric law), otherwise the
// product of even moments. Total member count capped at 64.
double tensor_moment(const MomentModel& model, const std::vector<SubsetIndex>& subsets);

// c(m, n, (d_j)) = average over all index tuples of E[Z^2_{d_1,i_1} ...
// Z^2_{d_m,i_m}] by full enumeration; prod_j C(n, d_j) capped at 1e7.
double c_moment(int m, int n, const std::vector<int>& d_list, const MomentModel& model);

// Bound 1 + e^t t with t = 2 C^2 e^2 s^2 / n, s = sum d_j; applicable when
// s <= sqrt(n) / (3 C e).
BoundValue c_moment_bound(int m, int n, const std::vector<int>& d_list, double moment_constant);

}  // namespace rtp
