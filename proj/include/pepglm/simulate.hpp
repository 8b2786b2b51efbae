#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pepglm/dataset.hpp"
#include "pepglm/methods.hpp"
#include "pepglm/model_indicator.hpp"

namespace pepglm {

struct ScenarioSpec {
  int study = 1;
  std::string family = "logistic";  // logistic | poisson
  std::string scenario = "null";    // null | sparse | medium | full | dense
  double r = 0.0;
  int n = 100;
  VectorXd true_beta;
  int replications = 20;
  std::uint64_t seed = 2024;
  ModelPriorKind model_prior = ModelPriorKind::kUniform;
};

// Fills n, true coefficients and the model prior for a named design.
// Study 1: logistic (p = 5) null/sparse/medium/full, Poisson (p = 3)
// null/sparse/medium/full, n = 100, uniform model prior. Study 2: logistic,
// p = 10, null/sparse/dense, n = 200, beta-binomial model prior.
ScenarioSpec MakeScenario(int study, const std::string& family, const std::string& scenario,
                          double r = 0.0);

// Predictors with a nonzero true coefficient.
ModelIndicator TrueModel(const ScenarioSpec& spec);

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t x);
std::uint64_t ReplicationSeed(const ScenarioSpec& spec, int rep);

// corr(X_i, X_j) = r^{|i-j|}, unit variances, rows N(0, R) via the
// symmetric square root of R; columns centred.
Dataset GenStudy1(const ScenarioSpec& spec, int rep);
// X1..X5 ~ N(0,1); X6..X10 ~ N(0.3X1+0.5X2+0.7X3+0.9X4+1.1X5, 1).
Dataset GenStudy2(const ScenarioSpec& spec, int rep);
Dataset Generate(const ScenarioSpec& spec, int rep);

struct ReplicationRecord {
  int rep = 0;
  std::string method;
  bool failed = false;
  std::string error;
  ModelIndicator map_model;
  bool map_correct = false;
  VectorXd inclusion;
};

struct MethodAggregate {
  int successes = 0;
  int completed = 0;
  int failures = 0;
  // Rows predictors; columns min, q25, median, q75, max of inclusion
  // probabilities over completed replications.
  MatrixXd inclusion_quantiles;
  double success_rate() const { return completed == 0 ? 0.0 : static_cast<double>(successes) / completed; }
};

struct ReplicationReport {
  ScenarioSpec spec;
  std::vector<std::string> methods;
  std::vector<ReplicationRecord> records;
  std::map<std::string, MethodAggregate> aggregate;
};

// Runs every (replication, method) pair; all methods see the same dataset
// and chain seed within a replication. Jobs run on `threads` workers
// (0 = hardware concurrency). Failures are recorded, not thrown.
ReplicationReport ReplicateCompare(const ScenarioSpec& spec, const std::vector<std::string>& methods,
                                   const RunSettings& settings, int threads = 0);

}  // namespace pepglm
