#include "rtp/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rtp/errors.hpp"

namespace rtp {

namespace {

void validate_nd(int n, int d, double b) {
  if (d < 1 || d > n) throw std::invalid_argument("variance formulas: require 1 <= d <= n");
  if (!(b >= 1.0)) throw std::invalid_argument("variance formulas: require E[x^4] >= 1");
}

// Terms (B^k - 1) C(d,k) C(n-d,d-k), k = 1..d. Exact integer-in-double
// arithmetic while every factor fits 64 bits and the products stay below
// 2^53; log-space otherwise. Vanishing terms (n - d < d - k) are skipped.
double variance_term_sum(int n, int d, double b) {
  double sum = 0.0, comp = 0.0;
  const double log_b = std::log(b);
  for (int k = 1; k <= d; ++k) {
    if (d - k > n - d) continue;
    if (b == 1.0) continue;
    double term;
    bool exact = false;
    try {
      const std::uint64_t c1 = binomial(d, k);
      const std::uint64_t c2 = binomial(n - d, d - k);
      const double bk = std::pow(b, k);
      term = (bk - 1.0) * static_cast<double>(c1) * static_cast<double>(c2);
      exact = bk <= 9.007e15 && term <= 9.007e15;
    } catch (const std::overflow_error&) {
      term = 0.0;
    }
    if (!exact) {
      const double log_term =
          std::log(std::expm1(k * log_b)) + log_binomial(d, k) + log_binomial(n - d, d - k);
      term = std::exp(log_term);
    }
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

double exact_norm_variance(int n, int d, double fourth_moment) {
  validate_nd(n, d, fourth_moment);
  return binomial_as_double(n, d) * variance_term_sum(n, d, fourth_moment);
}

double exact_norm_variance_ratio(int n, int d, double fourth_moment) {
  validate_nd(n, d, fourth_moment);
  return variance_term_sum(n, d, fourth_moment) / binomial_as_double(n, d);
}

BoundValue variance_upper_bound(int n, int d, double fourth_moment) {
  validate_nd(n, d, fourth_moment);
  const double n_sq = std::exp(2.0 * log_binomial(n, d));
  const double dm1 = static_cast<double>(d - 1);
  const double value = 2.0 * n_sq * fourth_moment * (static_cast<double>(d) * d / n) *
                       std::exp(-dm1 * dm1 / (n - 1));
  const bool applicable =
      d == 1 || (2 * d <= n && fourth_moment <= static_cast<double>(n - 2 * d + 2) / (dm1 * dm1));
  return BoundValue{value, applicable};
}

BoundValue variance_lower_bound(int n, int d, double fourth_moment) {
  validate_nd(n, d, fourth_moment);
  const double n_sq = std::exp(2.0 * log_binomial(n, d));
  const double dm1 = static_cast<double>(d - 1);
  const double value = n_sq * (fourth_moment - 1.0) * (static_cast<double>(d) * d / n) *
                       std::exp(-2.0 * dm1 * dm1 / (n - d + 1));
  const bool applicable = 5 * d <= n && fourth_moment > 1.0;
  return BoundValue{value, applicable};
}

RatioBound variance_lower_bound_large_d(int n, int d, double fourth_moment) {
  validate_nd(n, d, fourth_moment);
  const double exponent = static_cast<double>(d) * d / n;
  const double log_b = std::log(fourth_moment);
  // (1 - B^{-e})/8 * (B / (8 e^4))^e, all in logs until the final exp.
  const double deficit = -std::expm1(-exponent * log_b);  // 1 - B^{-e}
  const double ratio = deficit / 8.0 * std::exp(exponent * (log_b - std::log(8.0) - 4.0));
  const bool applicable =
      static_cast<double>(d) >= std::sqrt(2.0 * n) && 8 * d <= n;
  return RatioBound{ratio, 2.0 * log_binomial(n, d), applicable};
}

VarianceReport variance_report(int n, int d, double fourth_moment) {
  VarianceReport report;
  report.exact = exact_norm_variance(n, d, fourth_moment);
  report.exact_ratio = exact_norm_variance_ratio(n, d, fourth_moment);
  report.upper = variance_upper_bound(n, d, fourth_moment);
  report.lower = variance_lower_bound(n, d, fourth_moment);
  report.lower_large_d = variance_lower_bound_large_d(n, d, fourth_moment);

  const double slack = 1e-12;
  if (report.upper.applicable &&
      report.exact > report.upper.value * (1.0 + slack) + slack) {
    throw std::logic_error("variance_report: exact variance exceeds the upper bound at n=" +
                           std::to_string(n) + " d=" + std::to_string(d));
  }
  if (report.lower.applicable &&
      report.exact < report.lower.value * (1.0 - slack) - slack) {
    throw std::logic_error("variance_report: exact variance below the lower bound at n=" +
                           std::to_string(n) + " d=" + std::to_string(d));
  }
  if (report.lower_large_d.applicable &&
      report.exact_ratio < report.lower_large_d.ratio_to_n_sq * (1.0 - slack) - slack) {
    throw std::logic_error("variance_report: ratio below the large-d bound at n=" +
                           std::to_string(n) + " d=" + std::to_string(d));
  }
  return report;
}

MonteCarloEstimate mc_norm_variance(const ModelParams& params, const MomentModel& model,
                                    int trials, const SeededRng& rng) {
  if (trials < 1000) throw std::invalid_argument("mc_norm_variance: trials must be >= 1000");
  std::vector<double> norms(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    SeededRng stream = rng.substream(static_cast<std::uint64_t>(t));
    const Eigen::VectorXd x = sample_x_vector(model, params.n, stream);
    norms[static_cast<std::size_t>(t)] = build_column(x, params.d).squaredNorm();
  }
  double mean = 0.0;
  for (double v : norms) mean += v;
  mean /= trials;
  double m2 = 0.0, m4 = 0.0;
  for (double v : norms) {
    const double dev = v - mean;
    m2 += dev * dev;
    m4 += dev * dev * dev * dev;
  }
  const double sample_var = m2 / (trials - 1);
  m2 /= trials;
  m4 /= trials;
  // Var(s^2) plug-in: (m4 - s^4 (T-3)/(T-1)) / T.
  const double var_of_var =
      std::max(0.0, (m4 - sample_var * sample_var * (trials - 3.0) / (trials - 1.0)) / trials);
  return MonteCarloEstimate{sample_var, std::sqrt(var_of_var)};
}

std::vector<int> shared_degrees(const std::vector<SubsetIndex>& subsets) {
  const std::size_t count = subsets.size();
  if (count == 0 || count % 2 != 0) {
    throw std::invalid_argument("shared_degrees: subset count must be even and positive");
  }
  const std::size_t size = subsets[0].members.size();
  for (const auto& s : subsets) {
    if (s.members.size() != size) {
      throw std::invalid_argument("shared_degrees: subsets must share one size");
    }
  }
  std::vector<int> degrees(count, 0);
  for (std::size_t v = 0; v < count; ++v) {
    const std::size_t counterpart = v ^ 1ull;  // pairs (0,1), (2,3), ...
    for (int member : subsets[v].members) {
      bool shared = false;
      for (std::size_t w = 0; w < count && !shared; ++w) {
        if (w == v || w == counterpart) continue;
        for (int other : subsets[w].members) {
          if (other == member) {
            shared = true;
            break;
          }
        }
      }
      if (shared) ++degrees[v];
    }
  }
  return degrees;
}

double tensor_moment(const MomentModel& model, const std::vector<SubsetIndex>& subsets) {
  if (subsets.empty()) throw std::invalid_argument("tensor_moment: empty subset list");
  std::size_t total = 0;
  int max_member = 0;
  for (const auto& s : subsets) {
    total += s.members.size();
    for (int m : s.members) max_member = std::max(max_member, m);
  }
  if (total > 64) throw std::invalid_argument("tensor_moment: total member count exceeds 64");

  std::vector<int> exponent(static_cast<std::size_t>(max_member) + 1, 0);
  for (const auto& s : subsets) {
    for (int m : s.members) ++exponent[static_cast<std::size_t>(m)];
  }
  double value = 1.0;
  for (int g : exponent) {
    if (g == 0) continue;
    if (g % 2 != 0) return 0.0;
    value *= model.even_moment(g / 2);
  }
  return value;
}

double c_moment(int m, int n, const std::vector<int>& d_list, const MomentModel& model) {
  if (m < 1 || static_cast<std::size_t>(m) != d_list.size()) {
    throw std::invalid_argument("c_moment: m must match the degree list length");
  }
  double budget = 1.0;
  std::vector<std::uint64_t> sizes(d_list.size());
  for (std::size_t j = 0; j < d_list.size(); ++j) {
    if (d_list[j] < 1 || d_list[j] > n) {
      throw std::invalid_argument("c_moment: degrees must lie in [1, n]");
    }
    sizes[j] = binomial(n, d_list[j]);
    budget *= static_cast<double>(sizes[j]);
  }
  if (budget > 1e7) {
    throw ResourceError("c_moment: enumeration size " + std::to_string(budget) +
                        " exceeds the 1e7 budget");
  }

  std::vector<std::uint64_t> tuple(d_list.size(), 0);
  std::vector<int> exponent(static_cast<std::size_t>(n) + 1, 0);
  double sum = 0.0, comp = 0.0;
  while (true) {
    std::fill(exponent.begin(), exponent.end(), 0);
    for (std::size_t j = 0; j < tuple.size(); ++j) {
      const SubsetIndex s = unrank_subset(tuple[j], n, d_list[j]);
      for (int member : s.members) exponent[static_cast<std::size_t>(member)] += 2;
    }
    double value = 1.0;
    for (int g : exponent) {
      if (g > 0) value *= model.even_moment(g / 2);
    }
    const double y = value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;

    std::size_t j = 0;
    for (; j < tuple.size(); ++j) {
      if (++tuple[j] < sizes[j]) break;
      tuple[j] = 0;
    }
    if (j == tuple.size()) break;
  }
  return sum / budget;
}

BoundValue c_moment_bound(int m, int n, const std::vector<int>& d_list, double moment_constant) {
  if (m < 1 || static_cast<std::size_t>(m) != d_list.size()) {
    throw std::invalid_argument("c_moment_bound: m must match the degree list length");
  }
  double s = 0.0;
  for (int d : d_list) s += d;
  const double e = std::exp(1.0);
  const double t = 2.0 * moment_constant * moment_constant * e * e * s * s / n;
  const double value = 1.0 + std::exp(t) * t;
  const bool applicable = s <= std::sqrt(static_cast<double>(n)) / (3.0 * moment_constant * e);
  return BoundValue{value, applicable};
}

}  // namespace rtp
