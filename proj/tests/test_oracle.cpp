#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pepglm/error.hpp"
#include "pepglm/oracle.hpp"

using namespace pepglm;
using testing_support::RandomDesign;

namespace {

// y ~ N(1 b0 + X~ b, I) with b0 flat and b ~ N(0, c (X~'X~)^{-1}): integrate
// b out as a covariance term, then b0 against the flat prior.
double DenseGaussianEvidence(const VectorXd& y, const MatrixXd& Xt, double c) {
  const int n = y.size();
  MatrixXd sigma = MatrixXd::Identity(n, n);
  if (Xt.cols() > 0) sigma += c * Xt * (Xt.transpose() * Xt).inverse() * Xt.transpose();
  const Eigen::LDLT<MatrixXd> ldlt(sigma);
  const VectorXd ones = VectorXd::Ones(n);
  const VectorXd si_one = ldlt.solve(ones);
  const VectorXd si_y = ldlt.solve(y);
  const double a = ones.dot(si_one);
  const double b = ones.dot(si_y);
  const double log_det = ldlt.vectorD().array().log().sum();
  return -0.5 * (n - 1) * std::log(2 * M_PI) - 0.5 * log_det - 0.5 * std::log(a) -
         0.5 * (y.dot(si_y) - b * b / a);
}

Dataset SymmetricPair() {
  MatrixXd raw(8, 2);
  const double x[8] = {-1.3, 0.4, -0.2, 1.1, 0.7, -0.9, 0.1, 0.5};
  for (int i = 0; i < 8; ++i) {
    raw(i, 0) = x[i];
    raw(i, 1) = x[7 - i];
  }
  VectorXd y(8);
  y << 0.3, -1.0, 0.8, 2.0, 2.0, 0.8, -1.0, 0.3;
  return Dataset::FromCovariates(Family::Gaussian(), y, raw);
}

OracleSetup PepSetup(const Dataset& data) {
  OracleSetup s;
  s.delta = DeltaPrior{DeltaMode::kFixed, 0.0, 3.0, data.n()};
  s.model_prior = ModelPrior{ModelPriorKind::kUniform, data.p()};
  s.gprior = GPriorConfig{GPriorKind::kUnitInfo, 0.0, 3.0, data.n()};
  return s;
}

}  // namespace

TEST_CASE("gaussian evidence against the dense marginal") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd X = RandomDesign(rng, 15, 2);
    VectorXd y(15);
    for (int i = 0; i < 15; ++i) y[i] = 0.5 + 0.8 * X(i, 1) + z(rng);
    for (double c : {1.0, 5.0, 50.0}) {
      const double base = GaussianLogEvidence(y, X.leftCols(1), c);
      const double dense_base = DenseGaussianEvidence(y, MatrixXd(15, 0), c);
      for (int k : {1, 2}) {
        const double diff = GaussianLogEvidence(y, X.leftCols(k + 1), c) - base;
        const double dense = DenseGaussianEvidence(y, X.middleCols(1, k), c) - dense_base;
        CHECK(diff == doctest::Approx(dense).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("oracle with no predictors") {
  MatrixXd raw(6, 0);
  VectorXd y(6);
  y << 0, 1, 1, 0, 1, 0;
  for (Family fam : {Family::Gaussian(), Family::Binomial()}) {
    const Dataset data = Dataset::FromCovariates(fam, y, raw);
    OracleSetup s = PepSetup(data);
    const OracleResult r = BruteForceModelPosterior(data, s);
    REQUIRE(r.probability.size() == 1);
    CHECK(r.probability[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("exchangeable predictors get equal probability") {
  const Dataset data = SymmetricPair();
  CHECK(data.X.col(1).dot(data.y) == doctest::Approx(data.X.col(2).dot(data.y)));
  OracleSetup s = PepSetup(data);
  for (bool pep : {true, false}) {
    s.pep = pep;
    const OracleResult r = BruteForceModelPosterior(data, s);
    REQUIRE(r.models.size() == 4);
    double p10 = 0, p01 = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (r.models[k] == ModelIndicator::FromString("10")) p10 = r.probability[k];
      if (r.models[k] == ModelIndicator::FromString("01")) p01 = r.probability[k];
    }
    CHECK(p10 == doctest::Approx(p01).epsilon(1e-10));
    CHECK(std::accumulate(r.probability.begin(), r.probability.end(), 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("binomial oracle probabilities") {
  MatrixXd raw(6, 1);
  raw << -1.2, -0.5, -0.1, 0.3, 0.8, 1.4;
  VectorXd y(6);
  y << 0, 1, 0, 0, 1, 1;
  const Dataset data = Dataset::FromCovariates(Family::Binomial(), y, raw);
  OracleSetup s = PepSetup(data);
  s.delta = DeltaPrior{DeltaMode::kFixed, 0.0, 3.0, 6};
  const OracleResult r = BruteForceModelPosterior(data, s);
  REQUIRE(r.probability.size() == 2);
  CHECK(r.probability[0] + r.probability[1] == doctest::Approx(1.0));
  CHECK(r.probability[0] > 0.0);
  CHECK(r.probability[1] > 0.0);

  // The beta-binomial prior with p = 1 is uniform.
  s.model_prior.kind = ModelPriorKind::kBetaBinomial;
  const OracleResult bb = BruteForceModelPosterior(data, s);
  CHECK(bb.probability[1] == doctest::Approx(r.probability[1]).epsilon(1e-12));
}

TEST_CASE("separation detection") {
  MatrixXd X(4, 2);
  X << 1, -1, 1, -0.5, 1, 0.5, 1, 1;
  VectorXd y(4);
  y << 0, 0, 1, 1;
  CHECK(IsSeparable(y, X));
  y << 0, 1, 0, 1;
  CHECK_FALSE(IsSeparable(y, X));
  y << 1, 0, 0, 1;
  CHECK_FALSE(IsSeparable(y, X));
  y << 1, 1, 0, 0;
  CHECK(IsSeparable(y, X));
  // Quasi-complete: a tie at the boundary.
  X << 1, -1, 1, 0, 1, 0, 1, 1;
  y << 0, 0, 1, 1;
  CHECK(IsSeparable(y, X));
  // Intercept only: separable exactly when y is constant.
  CHECK(IsSeparable(VectorXd::Zero(4), X.leftCols(1)));
  CHECK_FALSE(IsSeparable(y, X.leftCols(1)));
}

TEST_CASE("oracle configuration errors") {
  std::mt19937_64 rng(9);
  MatrixXd raw = RandomDesign(rng, 20, 3).rightCols(3);
  VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = i % 2;
  const Dataset big = Dataset::FromCovariates(Family::Binomial(), y, raw);
  CHECK_THROWS_AS(BruteForceModelPosterior(big, PepSetup(big)), ConfigError);
  const Dataset wide = Dataset::FromCovariates(Family::Binomial(), y.head(10), raw.topRows(10).leftCols(2));
  CHECK_THROWS_AS(BruteForceModelPosterior(wide, PepSetup(wide)), ConfigError);
  const Dataset tall = Dataset::FromCovariates(Family::Binomial(), y, raw.leftCols(1));
  CHECK_THROWS_AS(BruteForceModelPosterior(tall, PepSetup(tall)), ConfigError);
  OracleSetup bad = PepSetup(tall);
  bad.model_prior.p = 2;
  CHECK_THROWS_AS(BruteForceModelPosterior(tall, bad), ConfigError);
}
