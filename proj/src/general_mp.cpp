#include "rtp/general_mp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "rtp/errors.hpp"

namespace rtp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kEtaFloor = 1e-4;
}  // namespace

DiscreteMeasure DiscreteMeasure::create(Eigen::VectorXd atoms, Eigen::VectorXd weights) {
  if (atoms.size() != weights.size() || atoms.size() == 0) {
    throw std::invalid_argument("DiscreteMeasure: atoms and weights must match and be nonempty");
  }
  if ((atoms.array() < 0.0).any()) {
    throw std::invalid_argument("DiscreteMeasure: atoms must be nonnegative");
  }
  if ((weights.array() <= 0.0).any()) {
    throw std::invalid_argument("DiscreteMeasure: weights must be positive");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
  }
  return DiscreteMeasure{std::move(atoms), std::move(weights)};
}

DiscreteMeasure DiscreteMeasure::point_mass(double atom) {
  Eigen::VectorXd a(1), w(1);
  a[0] = atom;
  w[0] = 1.0;
  return create(std::move(a), std::move(w));
}

DiscreteMeasure esd_of_population(const Eigen::VectorXd& t_eigs) {
  if (t_eigs.size() == 0) throw std::invalid_argument("esd_of_population: empty eigenvalue list");
  if ((t_eigs.array() < 0.0).any()) {
    throw std::invalid_argument("esd_of_population: eigenvalues must be nonnegative");
  }
  std::map<double, std::int64_t> counts;
  for (Eigen::Index i = 0; i < t_eigs.size(); ++i) ++counts[t_eigs[i]];
  Eigen::VectorXd atoms(static_cast<Eigen::Index>(counts.size()));
  Eigen::VectorXd weights(atoms.size());
  Eigen::Index k = 0;
  for (const auto& [value, count] : counts) {
    atoms[k] = value;
    weights[k] = static_cast<double>(count) / static_cast<double>(t_eigs.size());
    ++k;
  }
  return DiscreteMeasure{std::move(atoms), std::move(weights)};
}

Complex ie_map(const DiscreteMeasure& h, double gamma, Complex z, Complex m) {
  if (!(z.imag() > 0.0)) throw std::domain_error("ie_map: requires Im z > 0");
  const Complex shift = 1.0 - gamma + gamma * z * m;
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < h.atoms.size(); ++i) {
    const Complex denom = z - h.atoms[i] * shift;
    if (std::abs(denom) < 1e-14) {
      throw NumericError("ie_map: near-singular denominator at atom " + std::to_string(i));
    }
    sum += h.weights[i] / denom;
  }
  return sum;
}

namespace {

struct Attempt {
  Complex m;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

Attempt iterate_damped(const DiscreteMeasure& h, double gamma, Complex z, Complex m0,
                       double damping, double tol, int max_iter) {
  Complex m = m0;
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    const Complex mapped = ie_map(h, gamma, z, m);
    residual = std::abs(mapped - m);
    m = (1.0 - damping) * m + damping * mapped;
    if (residual < tol) {
      return Attempt{m, iter + 1, std::abs(ie_map(h, gamma, z, m) - m), true};
    }
  }
  return Attempt{m, max_iter, residual, false};
}

}  // namespace

FixpointResult solve_ie(const DiscreteMeasure& h, double gamma, Complex z,
                        const FixpointOptions& opts, std::optional<Complex> warm_start) {
  if (!(z.imag() >= opts.im_floor)) {
    throw std::invalid_argument("solve_ie: Im z below the iteration floor " +
                                std::to_string(opts.im_floor));
  }
  const Complex start = warm_start.value_or(1.0 / z);
  Attempt direct = iterate_damped(h, gamma, z, start, opts.damping, opts.tol, opts.max_iter);
  if (direct.converged && direct.m.imag() < 0.0) {
    return FixpointResult{direct.m, direct.iterations, direct.residual};
  }

  // Near the support edge the physical root can repel the damping-0.5 map
  // (the spurious root attracts instead). Reduced damping restores local
  // stability whenever Re F' < 1, and walking Im z down from high above the
  // axis keeps the iterate on the physical branch.
  int total = direct.iterations;
  bool wrong_root = direct.converged;
  for (double damping : {0.5 * opts.damping, 0.25 * opts.damping}) {
    const double im_hi = std::max(4.0 * gamma + 2.0, 2.0 * z.imag());
    Complex m = 1.0 / Complex(z.real(), im_hi);
    bool ok = true;
    Attempt last;
    for (double level = im_hi; ok; level *= 0.7) {
      const bool final_level = level <= 1.2 * z.imag();
      const Complex z_level(z.real(), final_level ? z.imag() : level);
      last = iterate_damped(h, gamma, z_level, m, damping, opts.tol, opts.max_iter);
      total += last.iterations;
      ok = last.converged && last.m.imag() < 0.0;
      m = last.m;
      if (final_level) break;
    }
    if (ok) return FixpointResult{last.m, total, last.residual};
    wrong_root = last.converged;
  }
  if (wrong_root) {
    throw std::logic_error("solve_ie: converged to Im m >= 0, invariant violated");
  }
  throw NonConvergenceError("solve_ie: no convergence after " + std::to_string(total) +
                                " total iterations, residual " + std::to_string(direct.residual),
                            direct.residual);
}

Eigen::VectorXd density_from_stieltjes(const DiscreteMeasure& h, double gamma,
                                       const Eigen::VectorXd& x_grid, double eta,
                                       const FixpointOptions& opts) {
  if (!(eta >= kEtaFloor)) {
    throw std::invalid_argument("density_from_stieltjes: eta below the floor 1e-4");
  }
  FixpointOptions local = opts;
  local.im_floor = std::min(local.im_floor, eta);
  Eigen::VectorXd density(x_grid.size());
  std::optional<Complex> warm;
  for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
    const Complex z(x_grid[i], eta);
    try {
      const FixpointResult result = solve_ie(h, gamma, z, local, warm);
      warm = result.m;
      density[i] = std::max(0.0, -result.m.imag() / kPi);
    } catch (const NumericError& err) {
      throw NumericError("density_from_stieltjes: grid point x = " +
                         std::to_string(x_grid[i]) + ": " + err.what());
    }
  }
  return density;
}

}  // namespace rtp
