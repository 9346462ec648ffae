#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rtp {

using Complex = std::complex<double>;

// S = Z Z^T / p, symmetrized as (M + M^T)/2 after accumulation.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& z, std::int64_t p);

// All eigenvalues of a symmetric matrix, ascending, via Householder
// tridiagonalization followed by implicit-shift QL iteration.
//
// Contract (checked, NumericError on breach): sum(lambda) matches trace(A)
// within tol * N * ||A||_F and sum(lambda^2) matches ||A||_F^2 within
// tol * N * ||A||_F^2. Input must be symmetric within 1e-12 * ||A||_F
// entrywise. Throws NumericError if any eigenvalue needs more than 30 QL
// sweeps.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a, double tol = 1e-10);

// Ascending eigenvalue list of one covariance matrix.
struct EmpiricalSpectrum {
  Eigen::VectorXd eigenvalues;

  static EmpiricalSpectrum from_eigenvalues(Eigen::VectorXd values);
  // Eigensolve plus a PSD sanity check: min eigenvalue must be at least
  // -1e-8 * max(1, max eigenvalue).
  static EmpiricalSpectrum of_covariance(const Eigen::MatrixXd& s, double tol = 1e-10);
};

// Right-continuous empirical CDF: fraction of eigenvalues <= x.
double esd_cdf(const EmpiricalSpectrum& spectrum, double x);

// (1/N) sum_j 1/(z - lambda_j) for Im z > 0, compensated summation.
// The imaginary part is strictly negative for real spectra.
Complex stieltjes_of_spectrum(const EmpiricalSpectrum& spectrum, Complex z);

// Solves (zI - A) x = b for symmetric real A and Im z > 0 by complex
// LU with partial pivoting; verifies the reconstruction residual.
Eigen::VectorXcd shifted_solve(const Eigen::MatrixXd& a, Complex z, const Eigen::VectorXcd& b);

// (1/N) tr((zI - A)^{-1}) through the eigenvalue path.
Complex resolvent_trace(const Eigen::MatrixXd& a, Complex z);

// Same trace through N shifted solves on basis vectors; cross-check path,
// kept out of production call sites.
Complex resolvent_trace_via_solves(const Eigen::MatrixXd& a, Complex z);

}  // namespace rtp
