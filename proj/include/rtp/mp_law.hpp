#pragma once

#include "rtp/eigensolve.hpp"

namespace rtp {

// Marchenko-Pastur law with aspect ratio gamma > 0: continuous part on
// [(1-sqrt(gamma))^2, (1+sqrt(gamma))^2] plus an atom of mass 1 - 1/gamma
// at zero when gamma > 1.
struct MpLaw {
  double gamma;
  double support_lo;
  double support_hi;
  double atom_at_zero;

  explicit MpLaw(double gamma);
};

// Density sqrt((hi - y)(y - lo)) / (2 pi gamma y) on the open support,
// 0 outside and at the endpoints. For gamma = 1 the support touches 0 and
// the density diverges there; evaluation at exactly y = 0 returns 0 by
// convention, with the integrable singularity handled inside mp_cdf.
double mp_density(double gamma, double y);

// CDF: atom (for x >= 0) plus the density integrated from support_lo to
// min(x, support_hi). Quadrature uses a sqrt substitution at both support
// endpoints, absolute tolerance 1e-10.
double mp_cdf(double gamma, double x);

// Stieltjes transform for Im z > 0: the root of
//   gamma z m^2 - (z + gamma - 1) m + 1 = 0
// with strictly negative imaginary part.
Complex mp_stieltjes(double gamma, Complex z);

// k-th moment of the law, k <= 12; the atom contributes only at k = 0.
double mp_moment(double gamma, int k);

}  // namespace rtp
