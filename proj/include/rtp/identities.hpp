#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "rtp/eigensolve.hpp"

namespace rtp {

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Outcome of one numerical identity check on one sampled instance.
struct IdentityReport {
  std::string name;
  double residual = 0.0;
  std::optional<BoundCheck> bound;
  std::string instance_digest;  // seed + dimensions, enough to reproduce
  bool skipped = false;
};

// Trace identity: with S = Z Z^T / p and R_j = (zI - S + Z_j Z_j^T / p)^{-1},
//   -1 + z (1/N) tr((zI - S)^{-1})
//     = -p/N + (1/N) sum_j 1 / (1 - Z_j^T R_j Z_j / p).
// Residual is the modulus of the two-sided difference.
IdentityReport check_trace_identity(const Eigen::MatrixXd& z_matrix, Complex z,
                                    const std::string& digest = "");

// (A + u v^T)^{-1} = A^{-1} - A^{-1} u v^T A^{-1} / (1 + v^T A^{-1} u);
// residual is the max-entry difference of the two inverses. Instances with
// condition estimates past 1e10 are marked skipped rather than failed.
IdentityReport check_sherman_morrison(const Eigen::MatrixXd& a, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v, const std::string& digest = "");

// Rank-one rearrangements for column j (1-based):
//   (a) 1 / (1 - Z_j^T R_j Z_j / p) = 1 + Z_j^T (zI - S)^{-1} Z_j / p
//   (b) Z_j^T (zI - S)^{-1} = Z_j^T R_j / (1 - Z_j^T R_j Z_j / p)
// Residual is the max of the scalar modulus and the vector max-norm gaps.
IdentityReport check_rank_one_rearrangement(const Eigen::MatrixXd& z_matrix, int j, Complex z,
                                            const std::string& digest = "");

// |tr((zI - S)^{-1}) - tr(R_j)| <= 1 / Im z, both traces through full
// eigendecompositions of the two real symmetric matrices.
IdentityReport check_resolvent_diff_bound(const Eigen::MatrixXd& z_matrix, int j, Complex z,
                                          const std::string& digest = "");

// Truncated geometric expansion 1/(1-x) = 1 + x + ... + x^M + x^{M+1}/(1-x)
// for |x| <= 1/2; also checks the remainder against the tail bound 2^{1-M}.
IdentityReport check_truncated_expansion(Complex x, int truncation_order,
                                         const std::string& digest = "");

struct IdentitySuiteOptions {
  std::uint64_t seed = 1;
  int instances = 200;
  double z_im_lo = 1.0;
  double z_im_hi = 5.0;
  double z_re_lo = -2.0;
  double z_re_hi = 4.0;
};

// Randomized instances (n in [4,8], d in [1,3], p in [4,16], mixed scalar
// laws); every check above runs on each instance.
std::vector<IdentityReport> run_identity_checks(const IdentitySuiteOptions& opts);

}  // namespace rtp
