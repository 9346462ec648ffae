#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rtp/eigensolve.hpp"

namespace rtp {

// Finite discrete population spectral distribution H: nonnegative atoms with
// positive weights summing to 1.
struct DiscreteMeasure {
  Eigen::VectorXd atoms;
  Eigen::VectorXd weights;

  static DiscreteMeasure create(Eigen::VectorXd atoms, Eigen::VectorXd weights);
  static DiscreteMeasure point_mass(double atom);
};

// Exact empirical spectral distribution of a population covariance given its
// eigenvalues: uniform weights with duplicate atoms merged.
DiscreteMeasure esd_of_population(const Eigen::VectorXd& t_eigs);

// One application of the self-consistent map
//   m  |->  sum_i w_i / (z - t_i (1 - gamma + gamma z m)).
// Throws NumericError if any denominator modulus drops below 1e-14.
Complex ie_map(const DiscreteMeasure& h, double gamma, Complex z, Complex m);

struct FixpointOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  double damping = 0.5;
  // Iteration is only attempted for Im z >= im_floor; callers lowering the
  // floor (density inversion) should warm-start from a neighbouring solution.
  double im_floor = 0.5;
};

struct FixpointResult {
  Complex m;
  int iterations = 0;
  double residual = 0.0;  // |m - ie_map(h, gamma, z, m)| at the returned m
};

// Damped fixed-point iteration m <- (1-damping) m + damping ie_map(m),
// started at warm_start or 1/z, stopped when the step falls below tol.
// Throws NonConvergenceError past max_iter and logic_error if the converged
// m has Im m >= 0.
FixpointResult solve_ie(const DiscreteMeasure& h, double gamma, Complex z,
                        const FixpointOptions& opts = {},
                        std::optional<Complex> warm_start = std::nullopt);

// Stieltjes inversion: density(x) ~ -Im m(x + i eta) / pi on the grid, with
// each point warm-started from its neighbour. Negative values are clamped to
// zero. Requires eta >= 1e-4.
Eigen::VectorXd density_from_stieltjes(const DiscreteMeasure& h, double gamma,
                                       const Eigen::VectorXd& x_grid, double eta,
                                       const FixpointOptions& opts = {});

}  // namespace rtp
