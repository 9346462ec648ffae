#include "rtp/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rtp/errors.hpp"

namespace rtp {

ModelParams ModelParams::create(int n, int d, std::int64_t p) {
  if (n < 1) throw std::invalid_argument("ModelParams: n must be positive");
  if (d < 1 || d > n) throw std::invalid_argument("ModelParams: require 1 <= d <= n");
  if (p < 1) throw std::invalid_argument("ModelParams: p must be positive");
  ModelParams params;
  params.n = n;
  params.d = d;
  params.p = p;
  params.feature_dim = binomial(n, d);  // throws on 64-bit overflow
  params.aspect = static_cast<double>(params.feature_dim) / static_cast<double>(p);
  return params;
}

MomentModel MomentModel::rademacher() { return MomentModel(DistKind::Rademacher, 1.0); }
MomentModel MomentModel::gaussian() { return MomentModel(DistKind::Gaussian, 3.0); }

MomentModel MomentModel::three_point(double fourth_moment) {
  if (!(fourth_moment >= 1.0)) {
    throw std::invalid_argument("MomentModel: ThreePoint needs fourth moment B >= 1");
  }
  return MomentModel(DistKind::ThreePoint, fourth_moment);
}

MomentModel MomentModel::parse(const std::string& spec) {
  if (spec == "rademacher") return rademacher();
  if (spec == "gaussian") return gaussian();
  const std::string prefix = "threepoint:";
  if (spec.rfind(prefix, 0) == 0) {
    return three_point(std::stod(spec.substr(prefix.size())));
  }
  throw std::invalid_argument("MomentModel: unknown distribution '" + spec + "'");
}

std::string MomentModel::name() const {
  switch (kind_) {
    case DistKind::Rademacher: return "rademacher";
    case DistKind::Gaussian: return "gaussian";
    case DistKind::ThreePoint: return "threepoint:" + std::to_string(b_);
  }
  return "?";
}

double MomentModel::even_moment(int k) const {
  if (k < 0) throw std::invalid_argument("even_moment: k must be nonnegative");
  if (k == 0) return 1.0;
  switch (kind_) {
    case DistKind::Rademacher:
      return 1.0;
    case DistKind::Gaussian: {
      double m = 1.0;  // (2k-1)!!
      for (int i = 1; i <= k; ++i) m *= 2.0 * i - 1.0;
      return m;
    }
    case DistKind::ThreePoint:
      return std::pow(b_, k - 1);
  }
  return 0.0;
}

double MomentModel::sample(SeededRng& rng) const {
  switch (kind_) {
    case DistKind::Rademacher:
      return (rng.next_u64() & 1ull) ? 1.0 : -1.0;
    case DistKind::Gaussian:
      return rng.next_gaussian();
    case DistKind::ThreePoint: {
      const double u = rng.next_uniform();
      const double half = 0.5 / b_;
      if (u < half) return std::sqrt(b_);
      if (u < 2.0 * half) return -std::sqrt(b_);
      return 0.0;
    }
  }
  return 0.0;
}

double MomentModel::moment_constant() const {
  double c = 1.0;
  for (int k = 1; k <= 8; ++k) {
    c = std::max(c, std::pow(even_moment(k), 1.0 / k) / k);
  }
  return c;
}

Eigen::VectorXd sample_x_vector(const MomentModel& model, int n, SeededRng& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = model.sample(rng);
  return x;
}

Eigen::VectorXd build_column(const Eigen::VectorXd& x, int d) {
  const int n = static_cast<int>(x.size());
  if (d < 1 || d > n) throw std::invalid_argument("build_column: require 1 <= d <= n");

  if (d == n) {
    Eigen::VectorXd out(1);
    out[0] = x.prod();
    return out;
  }
  if (d == n - 1) {
    // Colex rank r omits element n - r; prefix/suffix products avoid division.
    Eigen::VectorXd prefix(n + 1), suffix(n + 2);
    prefix[0] = 1.0;
    for (int i = 1; i <= n; ++i) prefix[i] = prefix[i - 1] * x[i - 1];
    suffix[n + 1] = 1.0;
    for (int i = n; i >= 1; --i) suffix[i] = suffix[i + 1] * x[i - 1];
    Eigen::VectorXd out(n);
    for (int r = 0; r < n; ++r) {
      const int omitted = n - r;
      out[r] = prefix[omitted - 1] * suffix[omitted + 1];
    }
    return out;
  }

  // Level k holds the products of all k-subsets in colex order. A k-subset
  // with largest member j sits at offset C(j-1, k) plus the colex rank of its
  // (k-1)-subset of {1..j-1}, and those form a prefix of the previous level.
  Eigen::VectorXd level(n);
  for (int j = 0; j < n; ++j) level[j] = x[j];
  for (int k = 2; k <= d; ++k) {
    Eigen::VectorXd next(static_cast<Eigen::Index>(binomial(n, k)));
    for (int j = k; j <= n; ++j) {
      const std::uint64_t offset = j - 1 < k ? 0 : binomial(j - 1, k);  // C(k-1, k) = 0
      const std::uint64_t prefix_len = binomial(j - 1, k - 1);
      const double xj = x[j - 1];
      for (std::uint64_t r = 0; r < prefix_len; ++r) {
        next[static_cast<Eigen::Index>(offset + r)] = level[static_cast<Eigen::Index>(r)] * xj;
      }
    }
    level.swap(next);
  }
  return level;
}

Eigen::MatrixXd sample_matrix(const ModelParams& params, const MomentModel& model,
                              const SeededRng& rng, std::uint64_t max_entries) {
  const std::uint64_t entries = params.feature_dim * static_cast<std::uint64_t>(params.p);
  if (params.feature_dim != 0 && entries / params.feature_dim != static_cast<std::uint64_t>(params.p)) {
    throw ResourceError("sample_matrix: N*p overflows the entry counter");
  }
  if (entries > max_entries) {
    throw ResourceError("sample_matrix: N*p = " + std::to_string(entries) +
                        " exceeds the entry cap " + std::to_string(max_entries));
  }
  Eigen::MatrixXd z(static_cast<Eigen::Index>(params.feature_dim), params.p);
  for (std::int64_t j = 0; j < params.p; ++j) {
    SeededRng column_rng = rng.substream(static_cast<std::uint64_t>(j));
    const Eigen::VectorXd x = sample_x_vector(model, params.n, column_rng);
    z.col(j) = build_column(x, params.d);
  }
  return z;
}

Eigen::MatrixXd apply_population_sqrt(const Eigen::MatrixXd& z, const Eigen::VectorXd& sqrt_eigs,
                                      const std::optional<Eigen::MatrixXd>& basis) {
  if (sqrt_eigs.size() != z.rows()) {
    throw std::invalid_argument("apply_population_sqrt: eigenvalue count must match row count");
  }
  if ((sqrt_eigs.array() < 0.0).any()) {
    throw std::invalid_argument("apply_population_sqrt: square-root eigenvalues must be >= 0");
  }
  if (!basis) {
    return sqrt_eigs.asDiagonal() * z;
  }
  const Eigen::MatrixXd& q = *basis;
  if (q.rows() != z.rows() || q.cols() != z.rows()) {
    throw std::invalid_argument("apply_population_sqrt: basis must be N x N");
  }
  const double orth_defect =
      (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
  if (orth_defect > 1e-10) {
    throw std::invalid_argument("apply_population_sqrt: basis is not orthogonal");
  }
  return q.transpose() * (sqrt_eigs.asDiagonal() * (q * z));
}

}  // namespace rtp
