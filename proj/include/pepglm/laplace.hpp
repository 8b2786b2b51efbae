#pragma once

#include <cstdint>
#include <unordered_map>

#include "pepglm/glm.hpp"
#include "pepglm/model_indicator.hpp"
#include "pepglm/priors.hpp"

namespace pepglm {

// Ridge used for every sampler-side non-Gaussian fit. Gaussian fits need no
// stabilization and stay unpenalized so that conjugate moves remain exact.
inline constexpr double kSamplerRidge = 1e-6;

inline FitOptions SamplerFitOptions(const Family& family) {
  FitOptions opts;
  opts.ridge = family.kind() == FamilyKind::kGaussian ? 0.0 : kSamplerRidge;
  return opts;
}

// Delta-independent pieces of the Laplace approximation for one model and
// one imaginary response: the mode of f(y*|beta) (the powered likelihood
// has the same mode), the log-likelihood and log-determinant of the unit
// information there, and the baseline prior at the mode.
struct LaplaceTerms {
  // Finite Laplace value available.
  bool usable = false;
  // The MLE does not exist (separation, all-zero counts). Usable only under
  // the Jeffreys baseline, where the limit of the formula is finite; the
  // determinant and prior terms are then zero.
  bool at_infinity = false;
  int dimension = 0;
  VectorXd mode;
  double log_likelihood = 0.0;  // log f(y*|mode), c(y*) included
  double log_det_information = 0.0;
  double log_baseline = 0.0;
};

// Fits y* on X_gamma with the sampler ridge. `start` warm-starts IRLS.
LaplaceTerms ComputeLaplaceTerms(const Family& family, const VectorXd& y_star,
                                 const MatrixXd& X_gamma, BaselineKind baseline,
                                 const VectorXd* start = nullptr);

// (d/2) log(2 pi delta) - 1/2 log det(X' W X) + log f(y*|mode)/delta
//   + log pi^N(mode).
// Returns +infinity for unusable terms (flat baseline with no finite MLE:
// the determinant tends to zero).
double LaplaceLogMarginal(const LaplaceTerms& terms, double delta);

// Convenience wrapper running the fit and evaluating at delta. Throws
// NumericalError when the value diverges.
double LaplaceLogMarginal(const Family& family, const VectorXd& y_star, const MatrixXd& X_gamma,
                          BaselineKind baseline, double delta);

// log of int (2 pi)^{-n/(2 delta)} exp(-|y* - X b|^2/(2 delta)) db, the exact
// flat-baseline Gaussian powered predictive (QR based). Throws SingularError
// for rank-deficient X.
double GaussianLogMarginalExact(const VectorXd& y_star, const MatrixXd& X, double delta);

// Per-chain cache of Laplace terms keyed by model, valid for one y*.
// Remembers the last mode per model across y* changes for warm starts.
class LaplaceCache {
 public:
  LaplaceCache(const Family& family, const MatrixXd& X, BaselineKind baseline)
      : family_(family), X_(X), baseline_(baseline) {}

  // Terms for gamma at y*; computed on first use after Invalidate().
  const LaplaceTerms& Get(const ModelIndicator& gamma, const VectorXd& y_star);
  // Terms at a candidate y* without touching the cache contents.
  LaplaceTerms Evaluate(const ModelIndicator& gamma, const VectorXd& y_star);
  // Replace the cached y*: drops all entries.
  void Invalidate() { terms_.clear(); }
  // Installs externally computed terms for the current y*.
  void Store(const ModelIndicator& gamma, LaplaceTerms terms);

  long fits() const { return fits_; }

 private:
  Family family_;
  MatrixXd X_;
  BaselineKind baseline_;
  std::unordered_map<std::uint64_t, LaplaceTerms> terms_;
  std::unordered_map<std::uint64_t, VectorXd> warm_;
  long fits_ = 0;
};

}  // namespace pepglm
