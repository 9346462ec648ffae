#include "rtp/quadrature.hpp"

#include <array>
#include <cmath>

namespace rtp {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1], positive half.
constexpr std::array<double, 8> kNodes = {
    0.0000000000000000, 0.2011940939974345, 0.3941513470775634, 0.5709721726085388,
    0.7244177313601701, 0.8482065834104272, 0.9372733924007060, 0.9879925180204854};
constexpr std::array<double, 8> kWeights = {
    0.2025782419255613, 0.1984314853271116, 0.1861610000155622, 0.1662692058169939,
    0.1395706779261543, 0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

double gl15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = kWeights[0] * f(mid);
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kNodes[i];
    sum += kWeights[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             double whole, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl15(f, a, mid);
  const double right = gl15(f, mid, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= tol || depth >= max_depth) {
    return refined;
  }
  return adapt(f, a, mid, 0.5 * tol, left, depth + 1, max_depth) +
         adapt(f, mid, b, 0.5 * tol, right, depth + 1, max_depth);
}

}  // namespace

double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, abs_tol, gl15(f, a, b), 0, max_depth);
}

}  // namespace rtp
