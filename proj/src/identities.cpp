#include "rtp/identities.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rtp/model.hpp"
#include "rtp/rng.hpp"

namespace rtp {

namespace {

void require_upper_half(Complex z, const char* who) {
  if (!(z.imag() > 0.0)) {
    throw std::domain_error(std::string(who) + ": requires Im z > 0");
  }
}

// R_j b through a shifted solve on S - Z_j Z_j^T / p.
Eigen::VectorXcd leave_one_out_apply(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z_matrix,
                                     Eigen::Index j, Complex z, const Eigen::VectorXcd& b) {
  const double p = static_cast<double>(z_matrix.cols());
  const Eigen::VectorXd zj = z_matrix.col(j);
  const Eigen::MatrixXd s_minus = s - (zj * zj.transpose()) / p;
  return shifted_solve(0.5 * (s_minus + s_minus.transpose()), z, b);
}

std::string default_digest(const Eigen::MatrixXd& z_matrix, Complex z) {
  std::ostringstream out;
  out << "N=" << z_matrix.rows() << ";p=" << z_matrix.cols() << ";z=(" << z.real() << ","
      << z.imag() << ")";
  return out.str();
}

}  // namespace

IdentityReport check_trace_identity(const Eigen::MatrixXd& z_matrix, Complex z,
                                    const std::string& digest) {
  require_upper_half(z, "check_trace_identity");
  const Eigen::Index n = z_matrix.rows();
  const Eigen::Index p = z_matrix.cols();
  const Eigen::MatrixXd s = covariance(z_matrix, p);

  const Complex lhs = -1.0 + z * resolvent_trace(s, z);
  Complex rhs = -static_cast<double>(p) / static_cast<double>(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXcd zj = z_matrix.col(j).cast<Complex>();
    const Eigen::VectorXcd rz = leave_one_out_apply(s, z_matrix, j, z, zj);
    const Complex quad = (zj.transpose() * rz)(0);
    rhs += 1.0 / (1.0 - quad / static_cast<double>(p)) / static_cast<double>(n);
  }

  IdentityReport report;
  report.name = "trace_identity";
  report.residual = std::abs(lhs - rhs);
  report.instance_digest = digest.empty() ? default_digest(z_matrix, z) : digest;
  return report;
}

IdentityReport check_sherman_morrison(const Eigen::MatrixXd& a, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v, const std::string& digest) {
  if (a.rows() != a.cols() || u.size() != a.rows() || v.size() != a.rows()) {
    throw std::invalid_argument("check_sherman_morrison: dimension mismatch");
  }
  IdentityReport report;
  report.name = "sherman_morrison";
  report.instance_digest = digest;

  const Eigen::MatrixXd updated = a + u * v.transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu_a(a);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu_updated(updated);
  const Eigen::MatrixXd a_inv = lu_a.inverse();
  const Eigen::MatrixXd updated_inv = lu_updated.inverse();
  const double cond_a = a.norm() * a_inv.norm();
  const double cond_updated = updated.norm() * updated_inv.norm();
  if (!(cond_a < 1e10) || !(cond_updated < 1e10)) {
    report.skipped = true;
    return report;
  }

  const double denom = 1.0 + v.dot(a_inv * u);
  const Eigen::MatrixXd via_formula = a_inv - (a_inv * u) * (v.transpose() * a_inv) / denom;
  report.residual = (updated_inv - via_formula).cwiseAbs().maxCoeff();
  return report;
}

IdentityReport check_rank_one_rearrangement(const Eigen::MatrixXd& z_matrix, int j, Complex z,
                                            const std::string& digest) {
  require_upper_half(z, "check_rank_one_rearrangement");
  const Eigen::Index p = z_matrix.cols();
  if (j < 1 || j > p) throw std::invalid_argument("check_rank_one_rearrangement: bad column");
  const Eigen::Index col = j - 1;
  const double pd = static_cast<double>(p);
  const Eigen::MatrixXd s = covariance(z_matrix, p);
  const Eigen::VectorXcd zj = z_matrix.col(col).cast<Complex>();

  const Eigen::VectorXcd rz = leave_one_out_apply(s, z_matrix, col, z, zj);
  const Eigen::VectorXcd full_rz = shifted_solve(s, z, zj);
  const Complex quad_r = (zj.transpose() * rz)(0);
  const Complex quad_full = (zj.transpose() * full_rz)(0);
  const Complex pivot = 1.0 - quad_r / pd;

  const double scalar_gap = std::abs(1.0 / pivot - (1.0 + quad_full / pd));
  // Vector identity compared through the resolvent applied to Z_j (the
  // matrices are symmetric, so row and column forms coincide).
  const double vector_gap = (full_rz - rz / pivot).cwiseAbs().maxCoeff();

  IdentityReport report;
  report.name = "rank_one_rearrangement";
  report.residual = std::max(scalar_gap, vector_gap);
  report.instance_digest = digest.empty() ? default_digest(z_matrix, z) : digest;
  return report;
}

IdentityReport check_resolvent_diff_bound(const Eigen::MatrixXd& z_matrix, int j, Complex z,
                                          const std::string& digest) {
  require_upper_half(z, "check_resolvent_diff_bound");
  const Eigen::Index p = z_matrix.cols();
  if (j < 1 || j > p) throw std::invalid_argument("check_resolvent_diff_bound: bad column");
  const Eigen::Index col = j - 1;
  const double pd = static_cast<double>(p);
  const Eigen::Index n = z_matrix.rows();
  const Eigen::MatrixXd s = covariance(z_matrix, p);
  const Eigen::VectorXd zj = z_matrix.col(col);
  Eigen::MatrixXd s_minus = s - (zj * zj.transpose()) / pd;
  s_minus = 0.5 * (s_minus + s_minus.transpose());

  const Complex trace_full = static_cast<double>(n) * resolvent_trace(s, z);
  const Complex trace_loo = static_cast<double>(n) * resolvent_trace(s_minus, z);

  IdentityReport report;
  report.name = "resolvent_diff_bound";
  report.residual = 0.0;
  BoundCheck bound;
  bound.lhs = std::abs(trace_full - trace_loo);
  bound.rhs = 1.0 / z.imag();
  bound.holds = bound.lhs <= bound.rhs * (1.0 + 1e-12);
  report.bound = bound;
  report.instance_digest = digest.empty() ? default_digest(z_matrix, z) : digest;
  return report;
}

IdentityReport check_truncated_expansion(Complex x, int truncation_order,
                                         const std::string& digest) {
  if (truncation_order < 0) {
    throw std::invalid_argument("check_truncated_expansion: order must be >= 0");
  }
  if (std::abs(x) > 0.5) {
    throw std::domain_error("check_truncated_expansion: requires |x| <= 1/2");
  }
  const Complex direct = 1.0 / (1.0 - x);
  Complex partial = 0.0;
  Complex power = 1.0;
  for (int k = 0; k <= truncation_order; ++k) {
    partial += power;
    power *= x;
  }
  const Complex remainder = power / (1.0 - x);  // power = x^{M+1} here

  IdentityReport report;
  report.name = "truncated_expansion";
  report.residual = std::abs(direct - (partial + remainder));
  BoundCheck bound;
  bound.lhs = std::abs(remainder);
  bound.rhs = 2.0 * std::pow(2.0, -truncation_order);
  bound.holds = bound.lhs <= bound.rhs * (1.0 + 1e-12);
  report.bound = bound;
  report.instance_digest = digest;
  return report;
}

std::vector<IdentityReport> run_identity_checks(const IdentitySuiteOptions& opts) {
  if (opts.instances < 1) {
    throw std::invalid_argument("run_identity_checks: instances must be >= 1");
  }
  if (!(opts.z_im_lo > 0.0) || opts.z_im_hi < opts.z_im_lo) {
    throw std::domain_error("run_identity_checks: z imaginary range must sit above the real axis");
  }
  std::vector<IdentityReport> reports;
  reports.reserve(static_cast<std::size_t>(opts.instances) * 5);
  const SeededRng master(opts.seed);
  const MomentModel models[] = {MomentModel::rademacher(), MomentModel::gaussian(),
                                MomentModel::three_point(4.0)};

  for (int i = 0; i < opts.instances; ++i) {
    SeededRng rng = master.substream(static_cast<std::uint64_t>(i));
    const int n = 4 + static_cast<int>(rng.next_u64() % 5);       // 4..8
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);       // 1..3
    const auto p = static_cast<std::int64_t>(4 + rng.next_u64() % 13);  // 4..16
    const MomentModel& model = models[rng.next_u64() % 3];
    const Complex z(opts.z_re_lo + (opts.z_re_hi - opts.z_re_lo) * rng.next_uniform(),
                    opts.z_im_lo + (opts.z_im_hi - opts.z_im_lo) * rng.next_uniform());

    const ModelParams params = ModelParams::create(n, d, p);
    SeededRng sample_rng = rng.substream(1000);
    const Eigen::MatrixXd z_matrix = sample_matrix(params, model, sample_rng);
    const int column = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(p));

    std::ostringstream digest;
    digest << "seed=" << opts.seed << ";instance=" << i << ";n=" << n << ";d=" << d
           << ";p=" << p << ";dist=" << model.name() << ";j=" << column << ";z=(" << z.real()
           << "," << z.imag() << ")";
    const std::string tag = digest.str();

    reports.push_back(check_trace_identity(z_matrix, z, tag));
    reports.push_back(check_rank_one_rearrangement(z_matrix, column, z, tag));
    reports.push_back(check_resolvent_diff_bound(z_matrix, column, z, tag));

    const Eigen::Index dim = z_matrix.rows();
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = 2.0 * rng.next_uniform() - 1.0;
    }
    a += 5.0 * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd u(dim), v(dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      u[r] = 2.0 * rng.next_uniform() - 1.0;
      v[r] = 2.0 * rng.next_uniform() - 1.0;
    }
    reports.push_back(check_sherman_morrison(a, u, v, tag));

    // Power-series instance: lift Im z above 4 gamma_n so the quadratic form
    // x = Z_1^T R_1 Z_1 / p lands inside |x| <= 1/2 for bounded columns.
    const double gamma_n = params.aspect;
    const Complex z_high(z.real(), std::max(z.imag(), 4.0 * gamma_n + 0.5));
    const Eigen::MatrixXd s = covariance(z_matrix, p);
    const Eigen::VectorXcd zj = z_matrix.col(column - 1).cast<Complex>();
    const Eigen::MatrixXd s_minus =
        s - (z_matrix.col(column - 1) * z_matrix.col(column - 1).transpose()) /
                static_cast<double>(p);
    const Eigen::VectorXcd rz =
        shifted_solve(0.5 * (s_minus + s_minus.transpose()), z_high, zj);
    const Complex x = (zj.transpose() * rz)(0) / static_cast<double>(p);
    if (std::abs(x) <= 0.5) {
      reports.push_back(check_truncated_expansion(x, 10, tag));
    }
  }
  return reports;
}

}  // namespace rtp
