#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "joint_density.hpp"
#include "pepglm/dataset.hpp"
#include "pepglm/error.hpp"
#include "pepglm/methods.hpp"
#include "pepglm/sampler.hpp"

using namespace pepglm;
using testing_support::RandomDesign;
using testing_support::SimulateResponse;

namespace {

Dataset MakeData(std::uint64_t seed, Family family, int n, const std::vector<double>& slopes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const int p = static_cast<int>(slopes.size());
  MatrixXd raw(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) raw(i, j) = z(rng);
  }
  VectorXd eta = VectorXd::Constant(n, 0.2);
  for (int j = 0; j < p; ++j) eta += slopes[j] * raw.col(j);
  VectorXd y = SimulateResponse(rng, family, eta);
  return Dataset::FromCovariates(family, std::move(y), raw);
}

SamplerConfig Config(const Dataset& data, int iterations, std::uint64_t seed) {
  SamplerConfig c;
  c.iterations = iterations;
  c.burnin = iterations / 10;
  c.seed = seed;
  c.delta.n = data.n();
  c.model_prior.p = data.p();
  return c;
}

}  // namespace

TEST_CASE("initial state") {
  const Dataset data = MakeData(1, Family::Binomial(), 100, {0.5, 0, -0.4});
  PepSampler s(data, Config(data, 10, 1));
  CHECK(s.state().gamma == ModelIndicator::FromString("111"));
  CHECK(s.state().y_star == data.y);
  CHECK(s.state().delta == 100.0);
  CHECK(s.psi() == 1.0);
  CHECK(s.state().beta == s.pseudo_prior().mean);

  SamplerConfig dr = Config(data, 10, 1);
  dr.reference = ReferenceMode::kDR;
  PepSampler sd(data, dr);
  CHECK(sd.psi() == 100.0);
}

TEST_CASE("configuration errors") {
  const Dataset data = MakeData(2, Family::Binomial(), 40, {0.5, 0});
  SamplerConfig c = Config(data, 100, 1);
  c.burnin = 100;
  CHECK_THROWS_AS(PepSampler(data, c), ConfigError);
  c = Config(data, 100, 1);
  c.model_prior.p = 3;
  CHECK_THROWS_AS(PepSampler(data, c), ConfigError);
  c = Config(data, 100, 1);
  c.delta.mode = DeltaMode::kHyper;
  c.delta.a = 1.5;
  CHECK_THROWS_AS(PepSampler(data, c), ConfigError);
  c = Config(data, 100, 1);
  c.fixed_model = ModelIndicator::FromString("1");
  CHECK_THROWS_AS(PepSampler(data, c), ConfigError);
}

TEST_CASE("chains are deterministic given the seed") {
  for (auto fam : {Family::Binomial(), Family::Poisson(), Family::Gaussian()}) {
    const Dataset data = MakeData(3, fam, 50, {0.4, 0, 0.3});
    SamplerConfig c = Config(data, 300, 77);
    c.delta.mode = DeltaMode::kHyper;
    const ChainOutput a = RunPepChain(data, c);
    const ChainOutput b = RunPepChain(data, c);
    CHECK(a.gamma_draws == b.gamma_draws);
    CHECK(a.scale_draws == b.scale_draws);
    CHECK(a.visits == b.visits);
    CHECK(a.ystar_moves.accepted == b.ystar_moves.accepted);
    c.seed = 78;
    const ChainOutput other = RunPepChain(data, c);
    CHECK(other.scale_draws != a.scale_draws);
  }
  const Dataset data = MakeData(4, Family::Binomial(), 60, {0.4, 0});
  for (const std::string& m : {"g-prior", "hyper-g", "mg-hyper-g"}) {
    RunSettings s;
    s.iterations = 200;
    s.burnin = 20;
    s.seed = 5;
    const ChainOutput a = RunMethod(MethodFromName(m), data, s);
    const ChainOutput b = RunMethod(MethodFromName(m), data, s);
    CHECK(a.gamma_draws == b.gamma_draws);
    CHECK(a.scale_draws == b.scale_draws);
  }
}

TEST_CASE("retained draws and visit counts") {
  const Dataset data = MakeData(5, Family::Binomial(), 80, {0.6, 0});
  SamplerConfig c = Config(data, 500, 3);
  c.burnin = 100;
  const ChainOutput out = RunPepChain(data, c);
  CHECK(out.gamma_draws.size() == 400);
  long total = 0;
  for (const auto& [m, v] : out.visits) total += v;
  CHECK(total == 400);
  for (const MoveStats* m : {&out.beta_moves, &out.beta0_moves, &out.ystar_moves}) {
    CHECK(m->rate() >= 0.0);
    CHECK(m->rate() <= 1.0);
    CHECK(m->attempted == 500);
  }
}

TEST_CASE("gaussian flat baseline accepts every coefficient move") {
  const Dataset data = MakeData(6, Family::Gaussian(), 40, {0.7, 0, -0.2});
  for (auto ref : {ReferenceMode::kCR, ReferenceMode::kDR}) {
    SamplerConfig c = Config(data, 2000, 9);
    c.baseline = BaselineKind::kFlat;
    c.reference = ref;
    const ChainOutput out = RunPepChain(data, c);
    CHECK(out.beta_moves.accepted == out.beta_moves.attempted);
    CHECK(out.beta0_moves.accepted == out.beta0_moves.attempted);
  }
}

TEST_CASE("CR and DR coincide at delta one") {
  for (auto fam : {Family::Binomial(), Family::Gaussian()}) {
    const Dataset data = MakeData(7, fam, 50, {0.5, 0, 0.2});
    SamplerConfig cr = Config(data, 400, 21);
    cr.delta.fixed_value = 1.0;
    SamplerConfig dr = cr;
    dr.reference = ReferenceMode::kDR;
    const ChainOutput a = RunPepChain(data, cr);
    const ChainOutput b = RunPepChain(data, dr);
    CHECK(a.gamma_draws == b.gamma_draws);
    CHECK(a.beta_moves.accepted == b.beta_moves.accepted);
    CHECK(a.ystar_moves.accepted == b.ystar_moves.accepted);
  }
}

TEST_CASE("gamma odds equal ratios of the joint density") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> ud(0.5, 20.0);
  const Dataset data = MakeData(9, Family::Gaussian(), 10, {0.8, -0.3});
  for (auto baseline : {BaselineKind::kFlat, BaselineKind::kJeffreys}) {
    for (auto prior : {ModelPriorKind::kUniform, ModelPriorKind::kBetaBinomial}) {
      for (bool dr : {false, true}) {
        SamplerConfig c = Config(data, 10, 1);
        c.baseline = baseline;
        c.model_prior.kind = prior;
        c.reference = dr ? ReferenceMode::kDR : ReferenceMode::kCR;
        PepSampler sampler(data, c);
        testing_support::GaussianJointSpec spec{baseline, prior, dr};
        for (int trial = 0; trial < 10; ++trial) {
          SamplerState s;
          s.gamma = ModelIndicator(2, rng() & 3u);
          s.beta = VectorXd(3);
          for (int k = 0; k < 3; ++k) s.beta[k] = z(rng);
          s.beta0 = z(rng);
          s.y_star = VectorXd(10);
          for (int i = 0; i < 10; ++i) s.y_star[i] = 1.5 * z(rng);
          s.delta = ud(rng);
          sampler.SetState(s);
          for (int j = 0; j < 2; ++j) {
            SamplerState on = s, off = s;
            on.gamma.Set(j, true);
            off.gamma.Set(j, false);
            const double expected = testing_support::GaussianLogJoint(data, on, spec) -
                                    testing_support::GaussianLogJoint(data, off, spec);
            CHECK(sampler.GammaLogOdds(j) == doctest::Approx(expected).epsilon(1e-10));
          }
        }
      }
    }
  }
}

TEST_CASE("model prior enters the odds as a ratio") {
  const Dataset data = MakeData(10, Family::Binomial(), 60, {0.5, 0, 0, 0.1});
  SamplerConfig u = Config(data, 10, 1);
  SamplerConfig b = u;
  b.model_prior.kind = ModelPriorKind::kBetaBinomial;
  PepSampler su(data, u), sb(data, b);
  // Full model: p_gamma = 4 against 3, ratio C(4,3)/C(4,4) under beta-binomial.
  CHECK(sb.GammaLogOdds(1) - su.GammaLogOdds(1) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("imaginary-data proposal examples") {
  CHECK(BinomialProposalProbability(0.0, 0.0, 1.0, 1.0) == doctest::Approx(0.5));
  // CR, delta large: the proposal approaches the null-model probability.
  const double p0 = 1.0 / (1.0 + std::exp(-0.7));
  CHECK(BinomialProposalProbability(0.7, 2.0, 1.0, 1e9) == doctest::Approx(p0).epsilon(1e-8));
  // Against a direct evaluation of the normalized product.
  const double b0 = -0.4, eta = 1.3, psi = 3.0, delta = 5.0;
  const double pb = 1.0 / (1.0 + std::exp(-b0)), pg = 1.0 / (1.0 + std::exp(-eta));
  const double num = std::pow(pb, 1 / psi) * std::pow(pg, 1 / delta);
  const double den = num + std::pow(1 - pb, 1 / psi) * std::pow(1 - pg, 1 / delta);
  CHECK(BinomialProposalProbability(b0, eta, psi, delta) == doctest::Approx(num / den).epsilon(1e-13));
  CHECK(PoissonProposalMean(std::log(2.0), 0.0, 1.0, 7.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(PoissonProposalMean(1e6, 0.0, 1.0, 1.0) == 1e12);
}

TEST_CASE("delta move") {
  const Dataset data = MakeData(11, Family::Binomial(), 60, {0.5, 0});
  SamplerConfig c = Config(data, 3000, 4);
  c.delta.mode = DeltaMode::kHyper;
  const ChainOutput out = RunPepChain(data, c);
  CHECK(out.scale_moves.attempted == 3000);
  CHECK(out.scale_moves.rate() > 0.05);
  double lo = 1e300, hi = 0;
  for (double d : out.scale_draws) {
    CHECK(d > 0.0);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(hi > lo);

  // Fixed mode never moves delta.
  const ChainOutput fixed = RunPepChain(data, Config(data, 100, 4));
  for (double d : fixed.scale_draws) CHECK(d == 60.0);
  CHECK(fixed.scale_moves.attempted == 0);
}

TEST_CASE("unit-information g-prior keeps g at n") {
  const Dataset data = MakeData(12, Family::Binomial(), 70, {0.5, 0});
  RunSettings s;
  s.iterations = 200;
  s.burnin = 0;
  const ChainOutput out = RunMethod(MethodFromName("g-prior"), data, s);
  for (double g : out.scale_draws) CHECK(g == 70.0);
  CHECK(out.scale_name == "g");
}

TEST_CASE("fixed model chains record coefficients") {
  const Dataset data = MakeData(13, Family::Binomial(), 80, {0.9, 0, 0});
  SamplerConfig c = Config(data, 300, 2);
  c.fixed_model = ModelIndicator::FromString("100");
  c.record_beta = true;
  const ChainOutput out = RunPepChain(data, c);
  CHECK(out.visits.size() == 1);
  CHECK(out.beta_draws.size() == out.gamma_draws.size());
  double mean = 0;
  for (const VectorXd& b : out.beta_draws) mean += b[1];
  mean /= out.beta_draws.size();
  CHECK(mean > 0.3);
}

TEST_CASE("beta acceptance rate matches an independent evaluation") {
  const Dataset data = MakeData(14, Family::Binomial(), 20, {0.8});
  SamplerConfig c = Config(data, 10, 3);
  c.delta.fixed_value = 20.0;
  c.fixed_model = ModelIndicator::FromString("1");
  PepSampler sampler(data, c);
  SamplerState s0 = sampler.state();
  s0.beta << 0.1, 0.5;
  sampler.SetState(s0);
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    sampler.SetState(s0);
    sampler.UpdateBeta();
  }
  const double rate = sampler.output().beta_moves.rate();

  // Stacked fit of (y, y*) with weights (1, 1/delta) by plain Newton.
  const MatrixXd& X = data.X;
  const double delta = s0.delta;
  auto log_target = [&](const VectorXd& b) {
    const VectorXd eta = X * b;
    double out = 0.0;
    VectorXd w(20);
    for (int i = 0; i < 20; ++i) {
      const double lp = -std::log1p(std::exp(-eta[i]));
      const double lq = -std::log1p(std::exp(eta[i]));
      out += data.y[i] * lp + (1 - data.y[i]) * lq;
      out += (s0.y_star[i] * lp + (1 - s0.y_star[i]) * lq) / delta;
      const double pr = std::exp(lp);
      w[i] = pr * (1 - pr);
    }
    const MatrixXd J = X.transpose() * w.asDiagonal() * X;
    return out + 0.5 * std::log(J.determinant());
  };
  VectorXd b = VectorXd::Zero(2);
  MatrixXd Q;
  for (int it = 0; it < 50; ++it) {
    VectorXd grad = VectorXd::Zero(2);
    Q = MatrixXd::Zero(2, 2);
    for (int i = 0; i < 20; ++i) {
      const double pr = 1.0 / (1.0 + std::exp(-X.row(i).dot(b)));
      grad += X.row(i).transpose() * ((data.y[i] - pr) + (s0.y_star[i] - pr) / delta);
      Q += (1.0 + 1.0 / delta) * pr * (1 - pr) * X.row(i).transpose() * X.row(i);
    }
    b += Q.ldlt().solve(grad);
  }
  Q = MatrixXd::Zero(2, 2);
  for (int i = 0; i < 20; ++i) {
    const double pr = 1.0 / (1.0 + std::exp(-X.row(i).dot(b)));
    Q += (1.0 + 1.0 / delta) * pr * (1 - pr) * X.row(i).transpose() * X.row(i);
  }
  const MatrixXd L = Q.llt().matrixU().solve(MatrixXd::Identity(2, 2));
  auto log_q = [&](const VectorXd& v) { return -0.5 * (v - b).dot(Q * (v - b)); };
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z;
  const VectorXd current = s0.beta;
  const double w_cur = log_target(current) - log_q(current);
  double total = 0.0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    VectorXd e(2);
    e << z(rng), z(rng);
    const VectorXd prop = b + L * e;
    total += std::min(1.0, std::exp(log_target(prop) - log_q(prop) - w_cur));
  }
  INFO("sampler ", rate, " independent ", total / draws);
  CHECK(std::abs(rate - total / draws) < 0.01);
}
