#include <cmath>
#include <random>

#include "doctest.h"
#include "pepglm/error.hpp"
#include "pepglm/summary.hpp"

using namespace pepglm;

namespace {

ChainOutput RandomChain(std::mt19937_64& rng, int p, int draws) {
  ChainOutput c;
  c.p = p;
  std::uniform_real_distribution<double> u;
  std::vector<double> rates(p);
  for (double& r : rates) r = u(rng);
  for (int t = 0; t < draws; ++t) {
    ModelIndicator g(p);
    for (int j = 0; j < p; ++j) g.Set(j, u(rng) < rates[j]);
    c.gamma_draws.push_back(g);
    c.scale_draws.push_back(1.0 + 10.0 * u(rng));
    ++c.visits[g];
  }
  return c;
}

}  // namespace

TEST_CASE("summary of constant chains") {
  ChainOutput c;
  c.p = 3;
  for (int t = 0; t < 40000; ++t) {
    ModelIndicator g = ModelIndicator::FromString(t % 2 == 0 ? "110" : "100");
    c.gamma_draws.push_back(g);
    c.scale_draws.push_back(532.0);
  }
  const PosteriorSummary s = Summarize(c, 1000);
  CHECK(s.inclusion[0] == 1.0);
  CHECK(s.inclusion[1] == 0.5);
  CHECK(s.inclusion[2] == 0.0);
  CHECK(s.batch_estimates.rows() == 40);
  CHECK(s.batch_estimates.col(1).mean() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.shrinkage.mean == doctest::Approx(532.0 / 533.0));
  CHECK(std::round(s.shrinkage.median * 1000) / 1000 == 0.998);
  CHECK(s.shrinkage.q025 == s.shrinkage.q975);
  // Exact tie between "100" and "110": the smaller bitstring wins.
  CHECK(s.map_model == ModelIndicator::FromString("100"));
  CHECK(s.mpm_model == ModelIndicator::FromString("100"));
  CHECK(s.dropped_draws == 0);
}

TEST_CASE("summary invariants") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 6;
    const ChainOutput c = RandomChain(rng, p, 4000);
    const PosteriorSummary s = Summarize(c, 500);
    double total = 0.0;
    for (const auto& [m, pr] : s.model_probs) {
      total += pr;
      CHECK(pr <= static_cast<double>(s.map_visits) / s.draws);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < p; ++j) {
      CHECK(s.inclusion[j] >= 0.0);
      CHECK(s.inclusion[j] <= 1.0);
      CHECK(s.mpm_model.Includes(j) == (s.inclusion[j] > 0.5));
      CHECK(s.batch_estimates.col(j).mean() == doctest::Approx(s.inclusion[j]).epsilon(1e-12));
    }
    CHECK(s.shrinkage.q025 <= s.shrinkage.median);
    CHECK(s.shrinkage.median <= s.shrinkage.q975);
  }
}

TEST_CASE("summary is equivariant under predictor relabeling") {
  std::mt19937_64 rng(13);
  const int p = 4;
  const ChainOutput c = RandomChain(rng, p, 3000);
  const std::vector<int> perm{2, 0, 3, 1};
  ChainOutput r = c;
  r.gamma_draws.clear();
  for (const ModelIndicator& g : c.gamma_draws) {
    ModelIndicator h(p);
    for (int j = 0; j < p; ++j) h.Set(j, g.Includes(perm[j]));
    r.gamma_draws.push_back(h);
  }
  const PosteriorSummary a = Summarize(c, 1000);
  const PosteriorSummary b = Summarize(r, 1000);
  for (int j = 0; j < p; ++j) {
    CHECK(b.inclusion[j] == a.inclusion[perm[j]]);
    CHECK(b.mpm_model.Includes(j) == a.mpm_model.Includes(perm[j]));
    CHECK(b.batch_estimates.col(j) == a.batch_estimates.col(perm[j]));
  }
  CHECK(b.map_visits == a.map_visits);
}

TEST_CASE("partial batches and errors") {
  std::mt19937_64 rng(14);
  const ChainOutput c = RandomChain(rng, 2, 2500);
  const PosteriorSummary s = Summarize(c, 1000);
  CHECK(s.batch_estimates.rows() == 2);
  CHECK(s.dropped_draws == 500);
  CHECK_THROWS_AS(Summarize(c, 0), ConfigError);
  CHECK_THROWS_AS(Summarize(ChainOutput{}, 10), ConfigError);
  const PosteriorSummary none = Summarize(c, 5000);
  CHECK(none.batch_estimates.rows() == 0);
  CHECK_THROWS_AS(BatchQuantiles(none), ConfigError);
  const MatrixXd q = BatchQuantiles(s);
  CHECK(q.rows() == 2);
  CHECK(q(0, 0) <= q(0, 2));
  CHECK(q(0, 2) <= q(0, 4));
}

TEST_CASE("type-7 quantiles") {
  CHECK(Quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(Quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(Quantile({5}, 0.9) == 5);
  CHECK_THROWS_AS(Quantile({}, 0.5), ConfigError);
}

TEST_CASE("predictive rates") {
  // Null model with beta0 = 0 on balanced labels: each label is predicted
  // with probability 1/2.
  const int n = 400;
  MatrixXd raw(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    raw(i, 0) = i - n / 2 + 0.5;
    y[i] = i % 2;
  }
  const Dataset test = Dataset::FromCovariates(Family::Binomial(), y, raw);
  std::vector<VectorXd> draws(2000, VectorXd::Zero(2));
  const PredictiveRates coin = PredictiveEval(draws, ModelIndicator::FromString("0"), test,
                                              ClassificationRule::kSimulate, 3);
  CHECK(coin.false_negative_pct == doctest::Approx(25.0).epsilon(0.01));
  CHECK(coin.false_positive_pct == doctest::Approx(25.0).epsilon(0.01));

  // Perfectly separated labels and a dominant slope.
  VectorXd ys(n);
  for (int i = 0; i < n; ++i) ys[i] = raw(i, 0) > 0 ? 1 : 0;
  const Dataset sep = Dataset::FromCovariates(Family::Binomial(), ys, raw);
  double last = 100.0;
  for (double slope : {0.01, 0.1, 1.0, 100.0}) {
    VectorXd b(2);
    b << 0.0, slope;
    const PredictiveRates r = PredictiveEval({200, b}, ModelIndicator::FromString("1"), sep,
                                             ClassificationRule::kSimulate, 4);
    CHECK(r.false_negative_pct + r.false_positive_pct <= last + 1e-9);
    last = r.false_negative_pct + r.false_positive_pct;
  }
  CHECK(last < 0.1);
  VectorXd b(2);
  b << 0.0, 5.0;
  const PredictiveRates hard = PredictiveEval({b}, ModelIndicator::FromString("1"), sep,
                                              ClassificationRule::kThreshold, 1);
  CHECK(hard.false_negative_pct == 0.0);
  CHECK(hard.false_positive_pct == 0.0);

  CHECK_THROWS_AS(PredictiveEval({b}, ModelIndicator::FromString("1"),
                                 Dataset::FromCovariates(Family::Poisson(), ys, raw),
                                 ClassificationRule::kSimulate, 1),
                  DomainError);
}
