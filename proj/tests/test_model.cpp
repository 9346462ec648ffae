#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rtp/errors.hpp"
#include "rtp/model.hpp"

using namespace rtp;

namespace {

// Direct O(N d) product oracle for build_column.
Eigen::VectorXd naive_column(const Eigen::VectorXd& x, int d) {
  const int n = static_cast<int>(x.size());
  const auto count = binomial(n, d);
  Eigen::VectorXd out(static_cast<Eigen::Index>(count));
  for (std::uint64_t r = 0; r < count; ++r) {
    double product = 1.0;
    for (int member : unrank_subset(r, n, d).members) product *= x[member - 1];
    out[static_cast<Eigen::Index>(r)] = product;
  }
  return out;
}

}  // namespace

TEST_CASE("ModelParams computes exact feature dimension and aspect") {
  const ModelParams params = ModelParams::create(6, 2, 10);
  CHECK(params.feature_dim == 15);
  CHECK(params.aspect == 1.5);
  const ModelParams big = ModelParams::create(30, 15, 7);
  CHECK(big.feature_dim == 155117520ull);
  CHECK(big.aspect == 155117520.0 / 7.0);  // 1-ulp contract: exact quotient
  CHECK_THROWS_AS(ModelParams::create(130, 65, 10), std::overflow_error);
  CHECK_THROWS_AS(ModelParams::create(4, 5, 10), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::create(4, 2, 0), std::invalid_argument);
}

TEST_CASE("MomentModel closed-form even moments") {
  const MomentModel rad = MomentModel::rademacher();
  const MomentModel gauss = MomentModel::gaussian();
  const MomentModel three = MomentModel::three_point(4.0);

  for (const auto& model : {rad, gauss, three}) {
    CHECK(model.even_moment(0) == 1.0);
    CHECK(model.even_moment(1) == 1.0);  // unit variance
  }
  CHECK(rad.even_moment(5) == 1.0);
  CHECK(gauss.even_moment(2) == 3.0);
  CHECK(gauss.even_moment(3) == 15.0);
  CHECK(gauss.even_moment(4) == 105.0);
  CHECK(three.even_moment(2) == 4.0);
  CHECK(three.even_moment(3) == 16.0);
  CHECK(three.fourth_moment() == 4.0);
  CHECK_THROWS_AS(MomentModel::three_point(0.5), std::invalid_argument);
  CHECK(MomentModel::parse("threepoint:9").even_moment(2) == 9.0);
  CHECK_THROWS_AS(MomentModel::parse("cauchy"), std::invalid_argument);
}

TEST_CASE("moment constant dominates the moment growth") {
  for (const auto& model : {MomentModel::rademacher(), MomentModel::gaussian(),
                            MomentModel::three_point(9.0)}) {
    const double c = model.moment_constant();
    CHECK(c >= 1.0);
    for (int k = 1; k <= 8; ++k) {
      CHECK(model.even_moment(k) <= std::pow(c * k, k) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("sampling laws look right") {
  SeededRng rng(42);
  const int draws = 1000000;

  SUBCASE("rademacher support") {
    const MomentModel model = MomentModel::rademacher();
    for (int i = 0; i < 1000; ++i) {
      const double v = model.sample(rng);
      CHECK((v == 1.0 || v == -1.0));
    }
  }
  SUBCASE("three-point zero fraction within 3 sigma of 1 - 1/B") {
    const MomentModel model = MomentModel::three_point(4.0);
    int zeros = 0;
    for (int i = 0; i < draws; ++i) {
      if (model.sample(rng) == 0.0) ++zeros;
    }
    const double frac = static_cast<double>(zeros) / draws;
    const double sigma = std::sqrt(0.75 * 0.25 / draws);
    CHECK(std::abs(frac - 0.75) <= 3.0 * sigma);
  }
  SUBCASE("gaussian fourth moment within 3 sigma of 3") {
    const MomentModel model = MomentModel::gaussian();
    double sum4 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double v = model.sample(rng);
      sum4 += v * v * v * v;
    }
    const double mean4 = sum4 / draws;
    const double sigma = std::sqrt((105.0 - 9.0) / draws);  // Var(x^4) = E[x^8] - 9
    CHECK(std::abs(mean4 - 3.0) <= 3.0 * sigma);
  }
  SUBCASE("sign symmetry of three-point draws") {
    const MomentModel model = MomentModel::three_point(4.0);
    int plus = 0, minus = 0;
    for (int i = 0; i < draws; ++i) {
      const double v = model.sample(rng);
      if (v > 0) ++plus;
      if (v < 0) ++minus;
    }
    // P(+) = P(-) = 1/8; the count difference has variance ~ 2 N p(1-p).
    const double sigma = std::sqrt(2.0 * draws * 0.125 * 0.875);
    CHECK(std::abs(plus - minus) <= 4.0 * sigma);
  }
}

TEST_CASE("substreams are deterministic and order-independent") {
  const SeededRng a(123), b(123);
  SeededRng a5 = a.substream(5);
  SeededRng b7 = b.substream(7);
  SeededRng b5 = b.substream(5);
  SeededRng a7 = a.substream(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(a5.next_u64() == b5.next_u64());
    CHECK(a7.next_u64() == b7.next_u64());
  }
}

TEST_CASE("build_column frozen and trivial cases") {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(7);
  for (int d = 1; d <= 7; ++d) {
    CHECK(build_column(ones, d).isApprox(
        Eigen::VectorXd::Ones(static_cast<Eigen::Index>(binomial(7, d)))));
  }

  Eigen::VectorXd x(3);
  x << 2.0, 3.0, 5.0;
  const Eigen::VectorXd column = build_column(x, 2);
  REQUIRE(column.size() == 3);
  CHECK(column[0] == 6.0);   // {1,2}
  CHECK(column[1] == 10.0);  // {1,3}
  CHECK(column[2] == 15.0);  // {2,3}

  SeededRng rng(9);
  const MomentModel rad = MomentModel::rademacher();
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd draw = sample_x_vector(rad, 9, rng);
    const Eigen::VectorXd col = build_column(draw, 3);
    CHECK(col.squaredNorm() == static_cast<double>(binomial(9, 3)));  // exact for +-1
  }
}

TEST_CASE("build_column equals the naive product oracle, n <= 8, all d") {
  SeededRng rng(31);
  const MomentModel gauss = MomentModel::gaussian();
  for (int n = 1; n <= 8; ++n) {
    for (int d = 1; d <= n; ++d) {
      const Eigen::VectorXd x = sample_x_vector(gauss, n, rng);
      const Eigen::VectorXd fast = build_column(x, d);
      const Eigen::VectorXd slow = naive_column(x, d);
      CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-14 * slow.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("sample_matrix contracts") {
  const ModelParams params = ModelParams::create(6, 2, 8);
  const MomentModel rad = MomentModel::rademacher();
  const SeededRng rng(1234);

  SUBCASE("p = 1 reproduces one column") {
    const ModelParams single = ModelParams::create(6, 2, 1);
    const Eigen::MatrixXd z = sample_matrix(single, rad, rng);
    SeededRng stream = rng.substream(0);
    const Eigen::VectorXd x = sample_x_vector(rad, 6, stream);
    CHECK(z.col(0) == build_column(x, 2));
  }
  SUBCASE("rademacher entries and column norms") {
    const Eigen::MatrixXd z = sample_matrix(params, rad, rng);
    CHECK((z.cwiseAbs().array() == 1.0).all());
    for (int j = 0; j < z.cols(); ++j) {
      CHECK(z.col(j).squaredNorm() == 15.0);
    }
  }
  SUBCASE("fixed seed is bitwise reproducible") {
    const Eigen::MatrixXd z1 = sample_matrix(params, rad, rng);
    const Eigen::MatrixXd z2 = sample_matrix(params, rad, SeededRng(1234));
    CHECK(z1 == z2);
  }
  SUBCASE("entry cap is enforced") {
    const ModelParams big = ModelParams::create(30, 5, 1000);  // 142506 * 1000 entries
    CHECK_THROWS_AS(sample_matrix(big, rad, rng), ResourceError);
    CHECK_NOTHROW(sample_matrix(big, rad, rng, 200000000ull));
  }
}

TEST_CASE("column coordinates are centered with unit variance") {
  const ModelParams params = ModelParams::create(8, 2, 1);
  const MomentModel gauss = MomentModel::gaussian();
  const SeededRng rng(77);
  const int draws = 100000;
  const Eigen::Index dim = static_cast<Eigen::Index>(params.feature_dim);

  std::vector<Eigen::Index> coords;
  SeededRng pick(5);
  for (int i = 0; i < 20; ++i) {
    coords.push_back(static_cast<Eigen::Index>(pick.next_u64() % dim));
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dim);
  for (int t = 0; t < draws; ++t) {
    SeededRng stream = rng.substream(t);
    const Eigen::VectorXd col = build_column(sample_x_vector(gauss, 8, stream), 2);
    sum += col;
    sum_sq += col.cwiseProduct(col);
  }
  // Var(Z_r) = 1 and Var(Z_r^2) = E[x^4]^2 - 1 = 8 for Gaussian, d = 2.
  const double sigma_mean = 1.0 / std::sqrt(draws);
  const double sigma_sq = std::sqrt(8.0 / draws);
  for (Eigen::Index r : coords) {
    CHECK(std::abs(sum[r] / draws) <= 4.0 * sigma_mean);
    CHECK(std::abs(sum_sq[r] / draws - 1.0) <= 4.0 * sigma_sq);
  }
}

TEST_CASE("apply_population_sqrt") {
  const ModelParams params = ModelParams::create(4, 2, 5);
  const MomentModel rad = MomentModel::rademacher();
  const Eigen::MatrixXd z = sample_matrix(params, rad, SeededRng(3));
  const Eigen::Index dim = z.rows();

  SUBCASE("identity population leaves Z unchanged") {
    CHECK(apply_population_sqrt(z, Eigen::VectorXd::Ones(dim)) == z);
  }
  SUBCASE("scalar population scales everything") {
    const Eigen::MatrixXd scaled =
        apply_population_sqrt(z, Eigen::VectorXd::Constant(dim, 2.5));
    CHECK(scaled.isApprox(2.5 * z));
  }
  SUBCASE("diagonal population scales rows") {
    Eigen::VectorXd sqrt_eigs = Eigen::VectorXd::Ones(dim);
    sqrt_eigs[0] = 2.0;  // population eigenvalue 4 on the first coordinate
    const Eigen::MatrixXd out = apply_population_sqrt(z, sqrt_eigs);
    CHECK(out.row(0).isApprox(2.0 * z.row(0)));
    CHECK(out.bottomRows(dim - 1).isApprox(z.bottomRows(dim - 1)));
  }
  SUBCASE("orthogonal basis round trip") {
    SeededRng rng(11);
    Eigen::MatrixXd raw(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) raw(i, j) = rng.next_gaussian();
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
    const Eigen::MatrixXd out = apply_population_sqrt(z, Eigen::VectorXd::Ones(dim), q);
    CHECK(out.isApprox(z, 1e-10));  // T = Q^T I Q = I
    CHECK_THROWS_AS(apply_population_sqrt(z, Eigen::VectorXd::Ones(dim), raw),
                    std::invalid_argument);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(apply_population_sqrt(z, Eigen::VectorXd::Ones(dim - 1)),
                    std::invalid_argument);
    Eigen::VectorXd negative = Eigen::VectorXd::Ones(dim);
    negative[1] = -0.5;
    CHECK_THROWS_AS(apply_population_sqrt(z, negative), std::invalid_argument);
  }
}
