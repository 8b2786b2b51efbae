#include "pepglm/summary.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <random>

#include "pepglm/error.hpp"

namespace pepglm {

double Quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

PosteriorSummary Summarize(const ChainOutput& chain, int batch_size) {
  if (chain.gamma_draws.empty()) throw ConfigError("cannot summarize an empty chain");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  PosteriorSummary s;
  s.p = chain.p;
  s.draws = static_cast<long>(chain.gamma_draws.size());

  VectorXd counts = VectorXd::Zero(s.p);
  for (const ModelIndicator& g : chain.gamma_draws) {
    for (int j = 0; j < s.p; ++j) {
      if (g.Includes(j)) counts[j] += 1.0;
    }
  }
  s.inclusion = counts / static_cast<double>(s.draws);

  std::map<ModelIndicator, long> visits;
  for (const ModelIndicator& g : chain.gamma_draws) ++visits[g];
  // std::map iterates in model order, so the first maximum is the
  // lexicographically smallest among ties.
  for (const auto& [model, count] : visits) {
    if (count > s.map_visits) {
      s.map_visits = count;
      s.map_model = model;
    }
    s.model_probs.emplace_back(model, static_cast<double>(count) / s.draws);
  }
  std::stable_sort(s.model_probs.begin(), s.model_probs.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  s.mpm_model = ModelIndicator(s.p);
  for (int j = 0; j < s.p; ++j) {
    if (s.inclusion[j] > 0.5) s.mpm_model.Set(j, true);
  }

  if (!chain.scale_draws.empty()) {
    std::vector<double> shrink;
    shrink.reserve(chain.scale_draws.size());
    double sum = 0.0;
    for (double v : chain.scale_draws) {
      shrink.push_back(v / (1.0 + v));
      sum += shrink.back();
    }
    s.shrinkage.mean = sum / shrink.size();
    s.shrinkage.q025 = Quantile(shrink, 0.025);
    s.shrinkage.median = Quantile(shrink, 0.5);
    s.shrinkage.q975 = Quantile(shrink, 0.975);
  }

  s.batch_size = batch_size;
  const long batches = s.draws / batch_size;
  s.dropped_draws = s.draws - batches * batch_size;
  if (s.dropped_draws > 0) {
    std::cerr << "warning: " << s.dropped_draws << " draws after the last full batch of "
              << batch_size << " were dropped from batch estimates\n";
  }
  s.batch_estimates = MatrixXd::Zero(batches, s.p);
  for (long b = 0; b < batches; ++b) {
    for (long t = b * batch_size; t < (b + 1) * batch_size; ++t) {
      const ModelIndicator& g = chain.gamma_draws[t];
      for (int j = 0; j < s.p; ++j) {
        if (g.Includes(j)) s.batch_estimates(b, j) += 1.0;
      }
    }
  }
  if (batches > 0) s.batch_estimates /= static_cast<double>(batch_size);
  return s;
}

MatrixXd BatchQuantiles(const PosteriorSummary& summary) {
  MatrixXd out(summary.p, 5);
  const Eigen::Index batches = summary.batch_estimates.rows();
  if (batches == 0) throw ConfigError("no complete batches to summarize");
  for (int j = 0; j < summary.p; ++j) {
    std::vector<double> col(batches);
    for (Eigen::Index b = 0; b < batches; ++b) col[b] = summary.batch_estimates(b, j);
    const double probs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int k = 0; k < 5; ++k) out(j, k) = Quantile(col, probs[k]);
  }
  return out;
}

PredictiveRates PredictiveEval(const std::vector<VectorXd>& beta_draws, const ModelIndicator& model,
                               const Dataset& test, ClassificationRule rule, std::uint64_t seed) {
  if (test.n() == 0) throw DimensionError("empty test set");
  if (test.family.kind() != FamilyKind::kBinomial || !test.family.HasUnitTrials()) {
    throw DomainError("predictive classification needs a binary response");
  }
  if (beta_draws.empty()) throw ConfigError("no coefficient draws to evaluate");
  if (model.p() != test.p()) throw DimensionError("model and test data differ in p");
  const std::vector<int> cols = model.Columns();
  const MatrixXd Xg = SelectColumns(test.X, cols);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double fn_total = 0.0;
  double fp_total = 0.0;
  for (const VectorXd& beta : beta_draws) {
    if (beta.size() != test.p() + 1) throw DimensionError("coefficient draw has the wrong length");
    VectorXd b(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) b[k] = beta[cols[k]];
    const VectorXd eta = Xg * b;
    long fn = 0, fp = 0;
    for (int i = 0; i < test.n(); ++i) {
      const double prob = test.family.Mean(eta[i], 1.0);
      const bool predicted =
          rule == ClassificationRule::kSimulate ? unif(rng) < prob : prob > 0.5;
      const bool observed = test.y[i] > 0.5;
      if (observed && !predicted) ++fn;
      if (!observed && predicted) ++fp;
    }
    fn_total += 100.0 * fn / test.n();
    fp_total += 100.0 * fp / test.n();
  }
  PredictiveRates r;
  r.draws_used = static_cast<long>(beta_draws.size());
  r.false_negative_pct = fn_total / r.draws_used;
  r.false_positive_pct = fp_total / r.draws_used;
  return r;
}

}  // namespace pepglm
