#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "doctest.h"
#include "fixtures.hpp"
#include "pepglm/error.hpp"
#include "pepglm/priors.hpp"

using namespace pepglm;
using testing_support::RandomDesign;

namespace {

// Plain multivariate normal log density, used as an independent evaluator.
double MvnLogPdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  REQUIRE(llt.info() == Eigen::Success);
  const VectorXd z = llt.matrixL().solve(x - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * x.size() * std::log(2.0 * M_PI) - 0.5 * log_det - 0.5 * z.squaredNorm();
}

double IntegrateHalfLine(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate(f, 1e-10);
}

}  // namespace

TEST_CASE("model prior examples") {
  ModelPrior uni{ModelPriorKind::kUniform, 5};
  CHECK(LogModelPrior(uni, ModelIndicator::FromString("10100")) == doctest::Approx(std::log(1.0 / 32)));
  ModelPrior bb{ModelPriorKind::kBetaBinomial, 7};
  CHECK(LogModelPrior(bb, ModelIndicator::FromString("1100000")) ==
        doctest::Approx(std::log(1.0 / 168)).epsilon(1e-14));
  CHECK(LogModelPrior(bb, ModelIndicator::FromString("0000000")) ==
        doctest::Approx(std::log(1.0 / 8)).epsilon(1e-14));
}

TEST_CASE("model priors sum to one over the model space") {
  for (int p = 0; p <= 12; ++p) {
    for (ModelPriorKind kind : {ModelPriorKind::kUniform, ModelPriorKind::kBetaBinomial}) {
      ModelPrior prior{kind, p};
      double total = 0.0;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << p); ++bits) {
        total += std::exp(LogModelPrior(prior, ModelIndicator(p, bits)));
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("delta hyper-priors are proper") {
  for (double a : {2.5, 3.0, 4.0}) {
    for (DeltaMode mode : {DeltaMode::kHyper, DeltaMode::kHyperN}) {
      DeltaPrior prior{mode, 0.0, a, 50};
      const double mass = IntegrateHalfLine([&](double d) { return std::exp(LogDeltaPrior(prior, d)); });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  DeltaPrior hyper{DeltaMode::kHyper, 0.0, 3.0, 10};
  CHECK(LogDeltaPrior(hyper, 1.0) == doctest::Approx(std::log(0.5) - 1.5 * std::log(2.0)));
  DeltaPrior hyper_n{DeltaMode::kHyperN, 0.0, 3.0, 10};
  CHECK(LogDeltaPrior(hyper_n, 10.0) == doctest::Approx(std::log(0.05) - 1.5 * std::log(2.0)));
}

TEST_CASE("delta prior errors") {
  DeltaPrior bad{DeltaMode::kHyper, 0.0, 2.0, 10};
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  CHECK_THROWS_AS(LogDeltaPrior(bad, 1.0), ConfigError);
  DeltaPrior fixed{DeltaMode::kFixed, 0.0, 3.0, 10};
  CHECK_THROWS_AS(LogDeltaPrior(fixed, 1.0), ConfigError);
  CHECK(fixed.FixedValue() == 10.0);
  DeltaPrior ok{DeltaMode::kHyper, 0.0, 3.0, 10};
  CHECK_THROWS_AS(LogDeltaPrior(ok, 0.0), DomainError);
  CHECK_THROWS_AS(LogDeltaPrior(ok, -1.0), DomainError);
  CHECK_THROWS_AS(DeltaModeFromName("sometimes"), ConfigError);
}

TEST_CASE("g densities are proper") {
  for (GPriorKind kind : {GPriorKind::kHyperG, GPriorKind::kHyperGN, GPriorKind::kMgHyperG}) {
    GPriorConfig cfg{kind, 0.0, 3.0, 60};
    for (int pg : {0, 2, 5}) {
      const double mass = IntegrateHalfLine([&](double g) { return std::exp(LogGDensity(cfg, g, pg)); });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  GPriorConfig unit{GPriorKind::kUnitInfo, 0.0, 3.0, 60};
  CHECK_THROWS_AS(LogGDensity(unit, 1.0, 1), ConfigError);
  CHECK(unit.FixedG() == 60.0);
}

TEST_CASE("jeffreys baseline") {
  std::mt19937_64 rng(11);
  const MatrixXd X = RandomDesign(rng, 30, 3);
  VectorXd beta(4);
  beta << 0.3, -0.5, 0.8, 0.1;
  CHECK(LogBaselinePrior(BaselineKind::kFlat, Family::Binomial(), X, beta) == 0.0);

  // Independent evaluation: 1/2 log det(X' diag(p(1-p)) X).
  const VectorXd eta = X * beta;
  VectorXd w(30);
  for (int i = 0; i < 30; ++i) {
    const double pr = 1.0 / (1.0 + std::exp(-eta[i]));
    w[i] = pr * (1.0 - pr);
  }
  const MatrixXd info = X.transpose() * w.asDiagonal() * X;
  const double expected = 0.5 * std::log(info.determinant());
  const double value = LogBaselinePrior(BaselineKind::kJeffreys, Family::Binomial(), X, beta);
  CHECK(value == doctest::Approx(expected).epsilon(1e-12));

  // Permuting columns (and coefficients) leaves it unchanged.
  std::vector<int> perm{2, 0, 3, 1};
  MatrixXd Xp(30, 4);
  VectorXd bp(4);
  for (int k = 0; k < 4; ++k) {
    Xp.col(k) = X.col(perm[k]);
    bp[k] = beta[perm[k]];
  }
  CHECK(LogBaselinePrior(BaselineKind::kJeffreys, Family::Binomial(), Xp, bp) ==
        doctest::Approx(value).epsilon(1e-12));
  for (auto fam : {Family::Poisson(), Family::Gaussian()}) {
    CHECK(LogBaselinePrior(BaselineKind::kJeffreys, fam, Xp, bp) ==
          doctest::Approx(LogBaselinePrior(BaselineKind::kJeffreys, fam, X, beta)).epsilon(1e-12));
  }
}

TEST_CASE("g-prior density examples") {
  // One centred covariate with sum of squares 10, g = 10, at zero.
  MatrixXd x(10, 1);
  x << -2, -1, -1, 0, 0, 0, 0, 1, 1, 2;
  x *= std::sqrt(10.0 / x.squaredNorm());
  const VectorXd w1 = NullModelWeights(Family::Gaussian(), VectorXd::Zero(10));
  CHECK(LogGPriorDensity(x, w1, VectorXd::Zero(1), 10.0) == doctest::Approx(-0.9189385332).epsilon(1e-10));

  // At zero only the normalizing constant remains.
  std::mt19937_64 rng(5);
  const MatrixXd Xt = RandomDesign(rng, 25, 3).rightCols(3);
  const VectorXd w = VectorXd::Ones(25);
  const double at_zero = LogGPriorDensity(Xt, w, VectorXd::Zero(3), 4.0);
  const MatrixXd P = Xt.transpose() * Xt;
  CHECK(at_zero == doctest::Approx(-1.5 * std::log(2 * M_PI) - 0.5 * std::log((P / 4.0).inverse().determinant()))
                        .epsilon(1e-12));

  // Logistic, balanced binary response: W0 = 0.25 I.
  MatrixXd X20 = RandomDesign(rng, 20, 1).rightCols(1);
  VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = i % 2;
  const VectorXd w0 = NullModelWeights(Family::Binomial(), y);
  CHECK(w0.isApprox(VectorXd::Constant(20, 0.25)));
  const MatrixXd cov = 20.0 * (X20.transpose() * (0.25 * X20)).inverse();
  CHECK(LogGPriorDensity(X20, w0, VectorXd::Constant(1, 0.5), 20.0) ==
        doctest::Approx(MvnLogPdf(VectorXd::Constant(1, 0.5), VectorXd::Zero(1), cov)).epsilon(1e-12));

  VectorXd counts(4);
  counts << 0, 2, 3, 3;
  CHECK(NullModelWeights(Family::Poisson(), counts).isApprox(VectorXd::Constant(4, 2.0)));
}

TEST_CASE("g-prior density integrates to one") {
  using boost::math::quadrature::sinh_sinh;
  std::mt19937_64 rng(17);
  const MatrixXd Xt = RandomDesign(rng, 12, 2).rightCols(2);
  const VectorXd w = VectorXd::Constant(12, 0.2);
  const double g = 3.0;
  sinh_sinh<double> q(10);
  const double one_d = q.integrate(
      [&](double b) {
        if (!(std::abs(b) < 1e100)) return 0.0;
        return std::exp(LogGPriorDensity(Xt.leftCols(1), w, VectorXd::Constant(1, b), g));
      },
      1e-9);
  CHECK(one_d == doctest::Approx(1.0).epsilon(1e-3));

  const double two_d = q.integrate(
      [&](double b1) {
        return q.integrate(
            [&](double b2) {
              if (!(std::abs(b1) < 1e100 && std::abs(b2) < 1e100)) return 0.0;
              VectorXd b(2);
              b << b1, b2;
              return std::exp(LogGPriorDensity(Xt, w, b, g));
            },
            1e-9);
      },
      1e-9);
  CHECK(two_d == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("prior name round trips") {
  for (auto k : {BaselineKind::kFlat, BaselineKind::kJeffreys}) CHECK(BaselineFromName(BaselineName(k)) == k);
  for (auto k : {ModelPriorKind::kUniform, ModelPriorKind::kBetaBinomial}) {
    CHECK(ModelPriorFromName(ModelPriorName(k)) == k);
  }
  for (auto k : {GPriorKind::kUnitInfo, GPriorKind::kHyperG, GPriorKind::kHyperGN, GPriorKind::kMgHyperG}) {
    CHECK(GPriorFromName(GPriorName(k)) == k);
  }
  CHECK_THROWS_AS(BaselineFromName("improper"), ConfigError);
}
