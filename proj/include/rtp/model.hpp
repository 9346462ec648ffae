#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "rtp/combinatorics.hpp"
#include "rtp/rng.hpp"

namespace rtp {

// Default cap on N*p matrix entries; keeps eigensolves at desk scale.
inline constexpr std::uint64_t kDefaultMaxEntries = 1ull << 26;

// One experiment instance: n scalar features, order-d products, p samples.
// feature_dim = C(n, d) and aspect = feature_dim / p.
struct ModelParams {
  int n = 0;
  int d = 0;
  std::int64_t p = 0;
  std::uint64_t feature_dim = 0;
  double aspect = 0.0;

  static ModelParams create(int n, int d, std::int64_t p);
};

enum class DistKind { Rademacher, Gaussian, ThreePoint };

// Symmetric unit-variance scalar law with closed-form even moments.
//
//   Rademacher     +-1 equiprobable,             E[x^{2k}] = 1
//   Gaussian       standard normal,              E[x^{2k}] = (2k-1)!!
//   ThreePoint(B)  +-sqrt(B) w.p. 1/(2B) each,   E[x^{2k}] = B^{k-1}
//                  0 otherwise; realizes any fourth moment B >= 1.
class MomentModel {
 public:
  static MomentModel rademacher();
  static MomentModel gaussian();
  static MomentModel three_point(double fourth_moment);
  static MomentModel parse(const std::string& spec);  // "rademacher" | "gaussian" | "threepoint:B"

  DistKind kind() const { return kind_; }
  double even_moment(int k) const;  // E[x^{2k}], k >= 0
  double fourth_moment() const { return even_moment(2); }
  double sample(SeededRng& rng) const;
  std::string name() const;

  // Smallest C with E[x^{2k}] <= (Ck)^k over k <= 8; concrete stand-in for
  // the moment-growth constant the bound formulas take as given.
  double moment_constant() const;

 private:
  MomentModel(DistKind kind, double b) : kind_(kind), b_(b) {}
  DistKind kind_;
  double b_;  // fourth moment, used by ThreePoint
};

// n i.i.d. draws from the scalar law.
Eigen::VectorXd sample_x_vector(const MomentModel& model, int n, SeededRng& rng);

// Feature column of length C(n, d): entry at colex rank r is the product of
// x over unrank_subset(r). Built level-by-level so the total work is
// sum_{k<=d} C(n,k) multiplications; d = n and d = n-1 use direct products.
Eigen::VectorXd build_column(const Eigen::VectorXd& x, int d);

// N x p matrix with i.i.d. columns; column j draws its x-vector from
// rng-substream j, so the result is reproducible and independent of
// generation order. Rejects feature_dim * p > max_entries.
Eigen::MatrixXd sample_matrix(const ModelParams& params, const MomentModel& model,
                              const SeededRng& rng,
                              std::uint64_t max_entries = kDefaultMaxEntries);

// T^{1/2} Z for T^{1/2} = basis^T diag(sqrt_eigs) basis; identity basis when
// basis is not supplied (diagonal population covariance).
Eigen::MatrixXd apply_population_sqrt(const Eigen::MatrixXd& z,
                                      const Eigen::VectorXd& sqrt_eigs,
                                      const std::optional<Eigen::MatrixXd>& basis = std::nullopt);

}  // namespace rtp
