#include "rtp/mp_law.hpp"

#include <cmath>
#include <stdexcept>

#include "rtp/quadrature.hpp"

namespace rtp {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kQuadTol = 1e-11;

// Integral of y^k * density over [lo_cut, hi_cut] within the support.
// Substituting y = lo + u^2 (lower half) and y = hi - u^2 (upper half)
// removes both the sqrt endpoint zeros and the 1/sqrt(y) singularity the
// gamma = 1 case has at y = 0.
double bulk_integral(const MpLaw& law, int k, double lo_cut, double hi_cut) {
  const double lo = law.support_lo;
  const double hi = law.support_hi;
  lo_cut = std::max(lo_cut, lo);
  hi_cut = std::min(hi_cut, hi);
  if (hi_cut <= lo_cut) return 0.0;

  const auto weighted = [&](double y) { return std::pow(y, k) * mp_density(law.gamma, y); };
  const double mid = 0.5 * (lo + hi);
  double total = 0.0;
  if (lo_cut < mid) {
    const double a = std::sqrt(lo_cut - lo);
    const double b = std::sqrt(std::min(hi_cut, mid) - lo);
    total += adaptive_gauss_legendre(
        [&](double u) { return 2.0 * u * weighted(lo + u * u); }, a, b, kQuadTol);
  }
  if (hi_cut > mid) {
    const double a = std::sqrt(hi - hi_cut);
    const double b = std::sqrt(hi - std::max(lo_cut, mid));
    total += adaptive_gauss_legendre(
        [&](double u) { return 2.0 * u * weighted(hi - u * u); }, a, b, kQuadTol);
  }
  return total;
}

}  // namespace

MpLaw::MpLaw(double g) : gamma(g) {
  if (!(g > 0.0)) throw std::invalid_argument("MpLaw: gamma must be positive");
  const double root = std::sqrt(g);
  support_lo = (1.0 - root) * (1.0 - root);
  support_hi = (1.0 + root) * (1.0 + root);
  atom_at_zero = g > 1.0 ? 1.0 - 1.0 / g : 0.0;
}

double mp_density(double gamma, double y) {
  const MpLaw law(gamma);
  if (y <= law.support_lo || y >= law.support_hi) return 0.0;
  if (y == 0.0) return 0.0;
  return std::sqrt((law.support_hi - y) * (y - law.support_lo)) / (2.0 * kPi * gamma * y);
}

double mp_cdf(double gamma, double x) {
  const MpLaw law(gamma);
  double mass = x >= 0.0 ? law.atom_at_zero : 0.0;
  if (x >= law.support_hi) return 1.0;
  if (x > law.support_lo) {
    mass += bulk_integral(law, 0, law.support_lo, x);
  }
  return std::min(mass, 1.0);
}

Complex mp_stieltjes(double gamma, Complex z) {
  if (!(gamma > 0.0)) throw std::invalid_argument("mp_stieltjes: gamma must be positive");
  if (!(z.imag() > 0.0)) throw std::domain_error("mp_stieltjes: requires Im z > 0");
  // gamma z m^2 - (z + gamma - 1) m + 1 = 0, solved with the cancellation-free
  // quadratic split m1 = q / a, m2 = c / q.
  const Complex a = gamma * z;
  const Complex b = -(z + gamma - 1.0);
  const Complex c = 1.0;
  const Complex disc = std::sqrt(b * b - 4.0 * a * c);
  const Complex q =
      (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  const Complex m1 = q / a;
  const Complex m2 = c / q;
  if (m1.imag() < 0.0) return m1;
  if (m2.imag() < 0.0) return m2;
  throw std::logic_error("mp_stieltjes: no root with Im m < 0, invariant violated");
}

double mp_moment(double gamma, int k) {
  if (k < 0 || k > 12) throw std::invalid_argument("mp_moment: require 0 <= k <= 12");
  const MpLaw law(gamma);
  if (k == 0) return 1.0;
  return bulk_integral(law, k, law.support_lo, law.support_hi);
}

}  // namespace rtp
