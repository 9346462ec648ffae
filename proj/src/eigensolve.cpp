#include "rtp/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rtp/errors.hpp"

namespace rtp {

Eigen::MatrixXd covariance(const Eigen::MatrixXd& z, std::int64_t p) {
  if (p < 1) throw std::invalid_argument("covariance: p must be >= 1");
  Eigen::MatrixXd s = (z * z.transpose()) / static_cast<double>(p);
  return 0.5 * (s + s.transpose());
}

namespace {

// Householder reduction to tridiagonal form, eigenvalues-only variant.
// On return d holds the diagonal and e[i] the subdiagonal coupling d[i-1]~d[i].
void tridiagonalize(Eigen::MatrixXd a, Eigen::VectorXd& d, Eigen::VectorXd& e) {
  const int n = static_cast<int>(a.rows());
  d.resize(n);
  e.resize(n);
  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
  }
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) d[i] = a(i, i);
}

// Implicit-shift QL sweeps on the tridiagonal (d, e); e uses the convention
// e[i] couples d[i] and d[i+1]. At most 30 sweeps per eigenvalue. Deflation
// uses the relative test plus an absolute floor at eps * ||T||_inf so large
// near-zero clusters (dd ~ 0, e tiny) still split.
void ql_implicit_shift(Eigen::VectorXd& d, Eigen::VectorXd& e) {
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i < n - 1) row += std::abs(e[i]);
    anorm = std::max(anorm, row);
  }
  const double floor = eps * anorm;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd + floor) break;
      }
      if (m != l) {
        if (iter++ == 30) {
          throw NumericError("sym_eigenvalues: QL failed to converge at index " +
                             std::to_string(l) + " after 30 sweeps, |e| = " +
                             std::to_string(std::abs(e[l])));
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (i == l) {
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
          }
        }
      }
    } while (m != l);
  }
}

}  // namespace

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eigenvalues: matrix must be square");
  const int n = static_cast<int>(a.rows());
  const double fro = a.norm();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, fro)) {
    throw std::invalid_argument("sym_eigenvalues: input is not symmetric (defect " +
                                std::to_string(asym) + ")");
  }

  Eigen::VectorXd d, e;
  if (n == 1) {
    d.resize(1);
    d[0] = a(0, 0);
  } else {
    tridiagonalize(a, d, e);
    ql_implicit_shift(d, e);
  }
  std::sort(d.data(), d.data() + n);

  const double scale = std::max(1.0, fro);
  const double trace_gap = std::abs(d.sum() - a.trace());
  const double sq_gap = std::abs(d.squaredNorm() - fro * fro);
  if (trace_gap > tol * n * scale || sq_gap > tol * n * scale * scale) {
    throw NumericError("sym_eigenvalues: moment identity breach, trace gap " +
                       std::to_string(trace_gap) + ", Frobenius gap " + std::to_string(sq_gap));
  }
  return d;
}

EmpiricalSpectrum EmpiricalSpectrum::from_eigenvalues(Eigen::VectorXd values) {
  std::sort(values.data(), values.data() + values.size());
  return EmpiricalSpectrum{std::move(values)};
}

EmpiricalSpectrum EmpiricalSpectrum::of_covariance(const Eigen::MatrixXd& s, double tol) {
  EmpiricalSpectrum spectrum{sym_eigenvalues(s, tol)};
  const double top = spectrum.eigenvalues[spectrum.eigenvalues.size() - 1];
  const double floor = -1e-8 * std::max(1.0, top);
  if (spectrum.eigenvalues[0] < floor) {
    throw NumericError("covariance spectrum: min eigenvalue " +
                       std::to_string(spectrum.eigenvalues[0]) + " below PSD floor " +
                       std::to_string(floor));
  }
  return spectrum;
}

double esd_cdf(const EmpiricalSpectrum& spectrum, double x) {
  const auto& ev = spectrum.eigenvalues;
  const auto count = std::upper_bound(ev.data(), ev.data() + ev.size(), x) - ev.data();
  return static_cast<double>(count) / static_cast<double>(ev.size());
}

Complex stieltjes_of_spectrum(const EmpiricalSpectrum& spectrum, Complex z) {
  if (!(z.imag() > 0.0)) {
    throw std::domain_error("stieltjes_of_spectrum: requires Im z > 0");
  }
  const auto& ev = spectrum.eigenvalues;
  // Kahan compensation per component.
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    const Complex term = 1.0 / (z - ev[j]);
    double y = term.real() - cr;
    double t = sr + y;
    cr = (t - sr) - y;
    sr = t;
    y = term.imag() - ci;
    t = si + y;
    ci = (t - si) - y;
    si = t;
  }
  const double inv_n = 1.0 / static_cast<double>(ev.size());
  return Complex(sr * inv_n, si * inv_n);
}

Eigen::VectorXcd shifted_solve(const Eigen::MatrixXd& a, Complex z, const Eigen::VectorXcd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw std::invalid_argument("shifted_solve: dimension mismatch");
  }
  if (!(z.imag() > 0.0)) {
    throw std::domain_error("shifted_solve: requires Im z > 0");
  }
  Eigen::MatrixXcd shifted = (-a).cast<Complex>();
  shifted.diagonal().array() += z;
  const Eigen::VectorXcd x = shifted.partialPivLu().solve(b);
  const double residual = (shifted * x - b).norm();
  const double b_norm = b.norm();
  const double cond_scale = 1.0 + a.norm() * x.norm() / std::max(b_norm, 1e-300);
  if (residual > 1e-10 * b_norm * cond_scale) {
    throw NumericError("shifted_solve: residual " + std::to_string(residual) +
                       " exceeds tolerance");
  }
  return x;
}

Complex resolvent_trace(const Eigen::MatrixXd& a, Complex z) {
  const EmpiricalSpectrum spectrum{sym_eigenvalues(a)};
  return stieltjes_of_spectrum(spectrum, z);
}

Complex resolvent_trace_via_solves(const Eigen::MatrixXd& a, Complex z) {
  const Eigen::Index n = a.rows();
  Complex sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(n);
    basis[j] = 1.0;
    sum += shifted_solve(a, z, basis)[j];
  }
  return sum / static_cast<double>(n);
}

}  // namespace rtp
