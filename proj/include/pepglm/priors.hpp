#pragma once

#include <string_view>

#include "pepglm/glm.hpp"
#include "pepglm/model_indicator.hpp"

namespace pepglm {

// --- Baseline prior on the active coefficients ----------------------------

enum class BaselineKind { kFlat, kJeffreys };

BaselineKind BaselineFromName(std::string_view name);
std::string_view BaselineName(BaselineKind kind);

// Unnormalized log pi^N(beta_gamma): 0 for flat, 1/2 log det(X' W(beta) X)
// for Jeffreys. Throws SingularError if the information is not positive
// definite.
double LogBaselinePrior(BaselineKind kind, const Family& family, const MatrixXd& X_gamma,
                        const VectorXd& beta_gamma);

// --- Hyper-priors on delta (and on g) ---------------------------------------

enum class DeltaMode { kFixed, kHyper, kHyperN };

DeltaMode DeltaModeFromName(std::string_view name);
std::string_view DeltaModeName(DeltaMode mode);

struct DeltaPrior {
  DeltaMode mode = DeltaMode::kFixed;
  // Used when mode == kFixed; non-positive means "sample size n".
  double fixed_value = 0.0;
  double a = 3.0;
  // Sample size; scales the hyper-n density and the fixed default.
  int n = 0;

  // Throws ConfigError when a <= 2 for a hyper mode or n is missing.
  void Validate() const;
  double FixedValue() const { return fixed_value > 0.0 ? fixed_value : static_cast<double>(n); }
  bool IsRandom() const { return mode != DeltaMode::kFixed; }
};

// hyper:   log((a-2)/2) - (a/2) log(1+delta)
// hyper-n: log((a-2)/(2n)) - (a/2) log(1+delta/n)
// Throws ConfigError for a fixed-mode prior or a <= 2, DomainError for
// delta <= 0.
double LogDeltaPrior(const DeltaPrior& prior, double delta);

// --- Model-space prior ------------------------------------------------------

enum class ModelPriorKind { kUniform, kBetaBinomial };

ModelPriorKind ModelPriorFromName(std::string_view name);
std::string_view ModelPriorName(ModelPriorKind kind);

struct ModelPrior {
  ModelPriorKind kind = ModelPriorKind::kUniform;
  int p = 0;
};

// uniform: -p log 2; beta-binomial(1,1): -log(p+1) - log C(p, p_gamma).
double LogModelPrior(const ModelPrior& prior, const ModelIndicator& gamma);

// --- g-prior comparators ------------------------------------------------------

enum class GPriorKind { kUnitInfo, kHyperG, kHyperGN, kMgHyperG };

GPriorKind GPriorFromName(std::string_view name);
std::string_view GPriorName(GPriorKind kind);

struct GPriorConfig {
  GPriorKind kind = GPriorKind::kUnitInfo;
  // Fixed g for kUnitInfo; non-positive means n.
  double g = 0.0;
  double a = 3.0;
  int n = 0;

  void Validate() const;
  double FixedG() const { return g > 0.0 ? g : static_cast<double>(n); }
  bool IsRandom() const { return kind != GPriorKind::kUnitInfo; }
};

// Log density of g. The MG hyper-g density depends on the model size p_gamma:
//   pi(g | p_gamma) = g^b (1+g)^{-a-b-2} / B(a+1, b+1),
//   a = -3/4, b = (n - p_gamma - 5)/2 - a.
// Throws ConfigError for the unit-information kind.
double LogGDensity(const GPriorConfig& cfg, double g, int p_gamma);

// GLM weights w0 of the intercept-only fit on the observed response:
// binomial N_i p(1-p) with p the pooled proportion, Poisson ybar, gaussian 1.
VectorXd NullModelWeights(const Family& family, const VectorXd& y);

// log N(beta_tilde; 0, g (X~' W0 X~)^{-1}) over the slope block X_tilde
// (no intercept column). Throws SingularError for a singular precision.
double LogGPriorDensity(const MatrixXd& X_tilde, const VectorXd& w0,
                        const VectorXd& beta_tilde, double g);
// Same density from a precomputed unscaled precision P = X~' W0 X~.
double LogGPriorDensityFromPrecision(const MatrixXd& precision, const VectorXd& beta_tilde,
                                     double g);

}  // namespace pepglm
