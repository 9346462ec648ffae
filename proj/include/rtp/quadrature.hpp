#pragma once

#include <functional>

namespace rtp {

// Adaptive Gauss-Legendre integration of f over [a, b] to absolute
// tolerance abs_tol. 15-point rule with interval bisection; the local
// error estimate compares the parent panel against its two halves.
double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_depth = 48);

}  // namespace rtp
