#pragma once

#include <functional>
#include <vector>

#include "pepglm/dataset.hpp"
#include "pepglm/model_indicator.hpp"
#include "pepglm/priors.hpp"
#include "pepglm/sampler.hpp"

namespace pepglm {

// Reference posterior model probabilities by enumeration and quadrature,
// for p <= 2. Used to validate the samplers.
struct OracleSetup {
  bool pep = true;
  ReferenceMode reference = ReferenceMode::kCR;
  DeltaPrior delta;
  BaselineKind baseline = BaselineKind::kFlat;
  ModelPrior model_prior;
  GPriorConfig gprior;
  // Binomial PEP: divide by the quadrature value of the powered predictive
  // instead of its Laplace approximation (flat baseline only). The sampler
  // targets the Laplace version.
  bool exact_normalizer = false;
  // Relative tolerance of each one-dimensional quadrature.
  double tolerance = 1e-6;
};

struct OracleResult {
  std::vector<ModelIndicator> models;
  // Unnormalized log marginal likelihoods (common constants dropped).
  std::vector<double> log_evidence;
  // Posterior model probabilities including the model prior.
  std::vector<double> probability;
};

// Gaussian: closed form over y*, beta0 and the coefficients (random delta
// or g by Gauss-Legendre; random delta only with the CR reference).
// Binomial with unit trials and n <= 14: exhaustive sum over y*, nested
// adaptive quadrature over beta; a flat baseline needs p <= 1 so that
// separation can be decided combinatorially. Throws ConfigError otherwise.
OracleResult BruteForceModelPosterior(const Dataset& data, const OracleSetup& setup);

// True when the binary response admits complete or quasi-complete
// separation on X (intercept plus at most one covariate), i.e. the MLE
// does not exist.
bool IsSeparable(const VectorXd& y, const MatrixXd& X);

// log of the integral of exp(log_f) over R^d, d <= 3, after centring at
// `center` and whitening with `precision` (nested sinh-sinh quadrature).
double LogIntegrate(const std::function<double(const VectorXd&)>& log_f, const VectorXd& center,
                    const MatrixXd& precision, double tolerance = 1e-10);

// Gaussian evidence with a flat intercept and slopes N(0, c (X~'X~)^{-1}),
// X~ the centred non-intercept columns of X (unit error variance).
double GaussianLogEvidence(const VectorXd& y, const MatrixXd& X, double c);

}  // namespace pepglm
