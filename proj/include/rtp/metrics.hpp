#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

#include "rtp/eigensolve.hpp"

namespace rtp {

// Kolmogorov-Smirnov distance between an empirical spectrum and a reference
// CDF, evaluated at the eigenvalue jump points (exact for a step function
// against a monotone reference, atoms included).
double ks_distance(const EmpiricalSpectrum& spectrum,
                   const std::function<double(double)>& reference_cdf);

// (1/N) sum lambda^k with compensated summation, 0 <= k <= 12.
double spectral_moment(const EmpiricalSpectrum& spectrum, int k);

struct Histogram {
  Eigen::VectorXd edges;     // bins + 1 ascending edges
  Eigen::VectorXi counts;    // eigenvalues per bin
  Eigen::VectorXd densities; // counts / (N * width)
};

// Uniform-width bins, left-closed right-open with the last bin closed.
// Default range is [min, max] padded by 1% of the span on each side.
Histogram histogram(const EmpiricalSpectrum& spectrum, int bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace rtp
