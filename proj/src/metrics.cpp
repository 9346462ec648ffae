#include "rtp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtp {

double ks_distance(const EmpiricalSpectrum& spectrum,
                   const std::function<double(double)>& reference_cdf) {
  const auto& ev = spectrum.eigenvalues;
  const auto n = static_cast<double>(ev.size());
  double sup = 0.0;
  Eigen::Index i = 0;
  while (i < ev.size()) {
    Eigen::Index j = i;
    while (j + 1 < ev.size() && ev[j + 1] == ev[i]) ++j;
    const double ref = reference_cdf(ev[i]);
    // Left limit of the reference: one ulp below the jump point. Identical
    // for continuous laws, and it keeps step references (other empirical
    // CDFs, atoms) from reporting their own jump as distance.
    const double ref_left =
        reference_cdf(std::nextafter(ev[i], -std::numeric_limits<double>::infinity()));
    const double above = static_cast<double>(j + 1) / n;  // F_emp at the jump
    const double below = static_cast<double>(i) / n;      // F_emp just before it
    sup = std::max({sup, std::abs(above - ref), std::abs(below - ref_left)});
    i = j + 1;
  }
  return sup;
}

double spectral_moment(const EmpiricalSpectrum& spectrum, int k) {
  if (k < 0 || k > 12) throw std::invalid_argument("spectral_moment: require 0 <= k <= 12");
  const auto& ev = spectrum.eigenvalues;
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    const double term = std::pow(ev[j], k);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(ev.size());
}

Histogram histogram(const EmpiricalSpectrum& spectrum, int bins,
                    std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  const auto& ev = spectrum.eigenvalues;
  if (ev.size() == 0) throw std::invalid_argument("histogram: empty spectrum");

  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(hi > lo)) throw std::invalid_argument("histogram: range must be nonempty");
  } else {
    lo = ev[0];
    hi = ev[ev.size() - 1];
    double pad = 0.01 * (hi - lo);
    if (pad == 0.0) pad = std::max(1e-12, 0.01 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }

  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
  h.counts = Eigen::VectorXi::Zero(bins);
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    const double v = ev[j];
    if (v < lo || v > hi) continue;
    int b = static_cast<int>((v - lo) / width);
    if (b >= bins) b = bins - 1;  // last bin closed on the right
    ++h.counts[b];
  }
  h.densities.resize(bins);
  const double scale = 1.0 / (static_cast<double>(ev.size()) * width);
  for (int b = 0; b < bins; ++b) h.densities[b] = h.counts[b] * scale;
  return h;
}

}  // namespace rtp
