#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pepglm/dataset.hpp"
#include "pepglm/model_indicator.hpp"
#include "pepglm/sampler.hpp"

namespace pepglm {

struct ShrinkageStats {
  double mean = 0.0;
  double q025 = 0.0;
  double median = 0.0;
  double q975 = 0.0;
};

struct PosteriorSummary {
  int p = 0;
  long draws = 0;
  VectorXd inclusion;
  ModelIndicator map_model;
  long map_visits = 0;
  ModelIndicator mpm_model;
  // Visit frequencies, most visited first (ties in model order).
  std::vector<std::pair<ModelIndicator, double>> model_probs;
  // Of scale/(1+scale): delta/(1+delta) or g/(1+g).
  ShrinkageStats shrinkage;
  int batch_size = 0;
  // Rows are contiguous batches, columns predictors.
  MatrixXd batch_estimates;
  // Draws left over after the last full batch (dropped from batching).
  long dropped_draws = 0;
};

// Throws ConfigError for an empty chain or batch_size < 1. A batch size
// larger than the draw count yields zero batches.
PosteriorSummary Summarize(const ChainOutput& chain, int batch_size = 1000);

// Per-predictor quantiles over batch estimates: rows are predictors, columns
// min, q25, median, q75, max.
MatrixXd BatchQuantiles(const PosteriorSummary& summary);

// Empirical quantile with linear interpolation (type 7).
double Quantile(std::vector<double> values, double prob);

enum class ClassificationRule { kSimulate, kThreshold };

struct PredictiveRates {
  double false_negative_pct = 0.0;
  double false_positive_pct = 0.0;
  long draws_used = 0;
};

// Binary-response predictive check on a test set. For each coefficient draw
// (full p+1 vectors; only the columns of `model` are used) the success
// probabilities of the test rows are computed; under kSimulate one response
// per row is simulated and compared with the observed label, under
// kThreshold a label is predicted when the probability exceeds 0.5.
// Percentages are relative to the number of test rows and averaged over
// draws. Throws DomainError unless the family is binomial with unit trials.
PredictiveRates PredictiveEval(const std::vector<VectorXd>& beta_draws, const ModelIndicator& model,
                               const Dataset& test, ClassificationRule rule, std::uint64_t seed);

}  // namespace pepglm
