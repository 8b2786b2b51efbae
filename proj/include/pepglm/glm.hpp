#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pepglm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class FamilyKind { kBinomial, kPoisson, kGaussian };

// Exponential-family response with canonical link and unit dispersion.
// Binomial families carry per-observation trial counts (empty means all 1).
class Family {
 public:
  explicit Family(FamilyKind kind, VectorXd trials = {});

  static Family Binomial(VectorXd trials = {}) {
    return Family(FamilyKind::kBinomial, std::move(trials));
  }
  static Family Poisson() { return Family(FamilyKind::kPoisson); }
  static Family Gaussian() { return Family(FamilyKind::kGaussian); }
  static Family FromName(std::string_view name, VectorXd trials = {});

  FamilyKind kind() const { return kind_; }
  std::string_view name() const;
  const VectorXd& trials() const { return trials_; }
  double Trials(Eigen::Index i) const {
    return trials_.size() == 0 ? 1.0 : trials_[i];
  }
  bool HasUnitTrials() const { return unit_trials_; }

  // Same family with the trials vector repeated `copies` times, for stacked
  // (observed, imaginary) fits.
  Family Stacked(int copies) const;

  // b(eta), b'(eta), b''(eta) for one observation.
  double Cumulant(double eta, double trials) const;
  double Mean(double eta, double trials) const;
  double Variance(double eta, double trials) const;
  // Canonical link: inverse of Mean.
  double Link(double mu, double trials) const;
  double InverseLink(double eta, double trials) const { return Mean(eta, trials); }
  // c(y) term of the density.
  double LogBaseMeasure(double y, double trials) const;
  double LogDensity(double y, double eta, double trials) const {
    return y * eta - Cumulant(eta, trials) + LogBaseMeasure(y, trials);
  }
  bool IsValidResponse(double y, double trials) const;

  // Throws DomainError if any y is outside the support.
  void ValidateResponse(const VectorXd& y) const;

 private:
  FamilyKind kind_;
  VectorXd trials_;
  bool unit_trials_ = true;
};

// --- Unchecked building blocks used on hot paths --------------------------

// sum_i weight * (y_i eta_i - b(eta_i)); excludes c(y).
double LogLikelihoodKernel(const Family& family, const VectorXd& y,
                           const VectorXd& eta, double weight = 1.0);
// sum_i c(y_i).
double LogBaseMeasureSum(const Family& family, const VectorXd& y);
// Full log-likelihood sum_i weight * l_i at linear predictor eta.
inline double LogLikelihoodAt(const Family& family, const VectorXd& y,
                              const VectorXd& eta, double weight = 1.0) {
  return LogLikelihoodKernel(family, y, eta, weight) +
         weight * LogBaseMeasureSum(family, y);
}
// Diagonal IRLS weights b''(eta_i) (unit observation weights).
VectorXd VarianceWeights(const Family& family, const VectorXd& eta);

// --- Checked operations ---------------------------------------------------

// sum_i w_i l_i(beta), including c(y_i). Throws DimensionError,
// DomainError (invalid response or non-positive weight) or NumericalError
// (non-finite linear predictor or overflow).
double LogLikelihood(const Family& family, const VectorXd& y, const MatrixXd& X,
                     const VectorXd& beta, const VectorXd& weights);
double LogLikelihood(const Family& family, const VectorXd& y, const MatrixXd& X,
                     const VectorXd& beta);

// Score X^T diag(w) (y - mu).
VectorXd Score(const Family& family, const VectorXd& y, const MatrixXd& X,
               const VectorXd& beta, const VectorXd& weights);

// X^T diag(w_i b''(eta_i)) X.
MatrixXd ObservedInformation(const Family& family, const MatrixXd& X,
                             const VectorXd& beta, const VectorXd& weights);
MatrixXd ObservedInformation(const Family& family, const MatrixXd& X,
                             const VectorXd& beta);

struct FitOptions {
  double ridge = 0.0;
  int max_iterations = 50;
  double score_tolerance = 1e-8;
  double relative_tolerance = 1e-10;
  int max_halvings = 10;
};

struct FitResult {
  VectorXd beta;
  // Weighted observed information at beta, without the ridge term.
  MatrixXd information;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  // True when the ridge term, not the data, pins the mode: the unpenalized
  // MLE does not exist (complete or quasi-complete separation, all-zero
  // counts). Only assessed when ridge > 0.
  bool ridge_dominated = false;

  // Mode is a genuine (unpenalized) maximum likelihood estimate.
  bool usable() const { return converged && !ridge_dominated; }
};

// Newton/IRLS on sum_i w_i l_i(beta) - ridge/2 |beta|^2 with step halving.
// Stops when max |score| < score_tolerance or the relative log-likelihood
// change drops below relative_tolerance; a Gaussian family stops after one
// exact Newton step. Throws SingularError for a singular system with ridge
// 0 and NumericalError on divergence.
FitResult FitIrls(const Family& family, const VectorXd& y, const MatrixXd& X,
                  const VectorXd& weights, const FitOptions& options = {},
                  const VectorXd* start = nullptr);
FitResult FitIrls(const Family& family, const VectorXd& y, const MatrixXd& X,
                  const FitOptions& options = {}, const VectorXd* start = nullptr);

// Columns `cols` of X.
MatrixXd SelectColumns(const MatrixXd& X, const std::vector<int>& cols);
// log det of a symmetric positive-definite matrix; throws SingularError.
double LogDetSpd(const MatrixXd& A);

}  // namespace pepglm
