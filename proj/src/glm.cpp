#include "pepglm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pepglm/error.hpp"

namespace pepglm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
// Threshold on the change of the linear predictor when the ridge is relaxed
// a hundredfold; above it the mode is set by the ridge, not the data.
constexpr double kRidgeSensitivity = 1e-2;

double Softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double Logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

bool IsIntegral(double v) { return std::isfinite(v) && v == std::floor(v); }

void CheckSameLength(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw DimensionError(std::string("dimension mismatch: ") + what);
}

void CheckLinearPredictor(const VectorXd& eta) {
  if (!eta.allFinite()) {
    throw NumericalError("non-finite linear predictor");
  }
}

MatrixXd WeightedCrossProduct(const MatrixXd& X, const VectorXd& w) {
  const MatrixXd Xw = X.array().colwise() * w.array().sqrt();
  MatrixXd out = MatrixXd::Zero(X.cols(), X.cols());
  out.selfadjointView<Eigen::Lower>().rankUpdate(Xw.transpose());
  return out.selfadjointView<Eigen::Lower>();
}

}  // namespace

Family::Family(FamilyKind kind, VectorXd trials) : kind_(kind), trials_(std::move(trials)) {
  if (kind_ != FamilyKind::kBinomial) {
    trials_.resize(0);
  }
  for (Eigen::Index i = 0; i < trials_.size(); ++i) {
    if (!IsIntegral(trials_[i]) || trials_[i] < 1.0) {
      throw DomainError("binomial trials must be positive integers");
    }
    if (trials_[i] != 1.0) unit_trials_ = false;
  }
}

Family Family::FromName(std::string_view name, VectorXd trials) {
  if (name == "binomial" || name == "logistic") return Binomial(std::move(trials));
  if (name == "poisson") return Poisson();
  if (name == "gaussian") return Gaussian();
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

std::string_view Family::name() const {
  switch (kind_) {
    case FamilyKind::kBinomial: return "binomial";
    case FamilyKind::kPoisson: return "poisson";
    case FamilyKind::kGaussian: return "gaussian";
  }
  return "unknown";
}

Family Family::Stacked(int copies) const {
  if (trials_.size() == 0) return *this;
  VectorXd t(trials_.size() * copies);
  for (int c = 0; c < copies; ++c) t.segment(c * trials_.size(), trials_.size()) = trials_;
  return Family(kind_, std::move(t));
}

double Family::Cumulant(double eta, double trials) const {
  switch (kind_) {
    case FamilyKind::kBinomial: return trials * Softplus(eta);
    case FamilyKind::kPoisson: return std::exp(eta);
    case FamilyKind::kGaussian: return 0.5 * eta * eta;
  }
  return 0.0;
}

double Family::Mean(double eta, double trials) const {
  switch (kind_) {
    case FamilyKind::kBinomial: return trials * Logistic(eta);
    case FamilyKind::kPoisson: return std::exp(eta);
    case FamilyKind::kGaussian: return eta;
  }
  return 0.0;
}

double Family::Variance(double eta, double trials) const {
  switch (kind_) {
    case FamilyKind::kBinomial: {
      const double p = Logistic(eta);
      return trials * p * (1.0 - p);
    }
    case FamilyKind::kPoisson: return std::exp(eta);
    case FamilyKind::kGaussian: return 1.0;
  }
  return 0.0;
}

double Family::Link(double mu, double trials) const {
  switch (kind_) {
    case FamilyKind::kBinomial: {
      const double p = mu / trials;
      return std::log(p) - std::log1p(-p);
    }
    case FamilyKind::kPoisson: return std::log(mu);
    case FamilyKind::kGaussian: return mu;
  }
  return 0.0;
}

double Family::LogBaseMeasure(double y, double trials) const {
  switch (kind_) {
    case FamilyKind::kBinomial:
      if (trials == 1.0) return 0.0;
      return std::lgamma(trials + 1.0) - std::lgamma(y + 1.0) - std::lgamma(trials - y + 1.0);
    case FamilyKind::kPoisson: return -std::lgamma(y + 1.0);
    case FamilyKind::kGaussian: return -0.5 * (y * y + kLog2Pi);
  }
  return 0.0;
}

bool Family::IsValidResponse(double y, double trials) const {
  switch (kind_) {
    case FamilyKind::kBinomial: return IsIntegral(y) && y >= 0.0 && y <= trials;
    case FamilyKind::kPoisson: return IsIntegral(y) && y >= 0.0;
    case FamilyKind::kGaussian: return std::isfinite(y);
  }
  return false;
}

void Family::ValidateResponse(const VectorXd& y) const {
  if (trials_.size() != 0) CheckSameLength(y.size(), trials_.size(), "response vs trials");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!IsValidResponse(y[i], Trials(i))) {
      throw DomainError("response value " + std::to_string(y[i]) + " at row " +
                        std::to_string(i) + " is invalid for the " +
                        std::string(name()) + " family");
    }
  }
}

double LogLikelihoodKernel(const Family& family, const VectorXd& y, const VectorXd& eta,
                           double weight) {
  double sum = 0.0;
  switch (family.kind()) {
    case FamilyKind::kBinomial:
      if (family.HasUnitTrials()) {
        for (Eigen::Index i = 0; i < y.size(); ++i) sum += y[i] * eta[i] - Softplus(eta[i]);
      } else {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
          sum += y[i] * eta[i] - family.Trials(i) * Softplus(eta[i]);
        }
      }
      break;
    case FamilyKind::kPoisson:
      for (Eigen::Index i = 0; i < y.size(); ++i) sum += y[i] * eta[i] - std::exp(eta[i]);
      break;
    case FamilyKind::kGaussian:
      for (Eigen::Index i = 0; i < y.size(); ++i) sum += y[i] * eta[i] - 0.5 * eta[i] * eta[i];
      break;
  }
  return weight * sum;
}

double LogBaseMeasureSum(const Family& family, const VectorXd& y) {
  if (family.kind() == FamilyKind::kBinomial && family.HasUnitTrials()) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) sum += family.LogBaseMeasure(y[i], family.Trials(i));
  return sum;
}

VectorXd VarianceWeights(const Family& family, const VectorXd& eta) {
  VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) w[i] = family.Variance(eta[i], family.Trials(i));
  return w;
}

double LogLikelihood(const Family& family, const VectorXd& y, const MatrixXd& X,
                     const VectorXd& beta, const VectorXd& weights) {
  CheckSameLength(y.size(), X.rows(), "response vs design rows");
  CheckSameLength(beta.size(), X.cols(), "coefficients vs design columns");
  CheckSameLength(weights.size(), y.size(), "weights vs response");
  family.ValidateResponse(y);
  if ((weights.array() <= 0.0).any() || !weights.allFinite()) {
    throw DomainError("observation weights must be strictly positive");
  }
  const VectorXd eta = X * beta;
  CheckLinearPredictor(eta);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    sum += weights[i] * family.LogDensity(y[i], eta[i], family.Trials(i));
  }
  if (!std::isfinite(sum)) throw NumericalError("log-likelihood overflow");
  return sum;
}

double LogLikelihood(const Family& family, const VectorXd& y, const MatrixXd& X,
                     const VectorXd& beta) {
  return LogLikelihood(family, y, X, beta, VectorXd::Ones(y.size()));
}

VectorXd Score(const Family& family, const VectorXd& y, const MatrixXd& X,
               const VectorXd& beta, const VectorXd& weights) {
  CheckSameLength(y.size(), X.rows(), "response vs design rows");
  CheckSameLength(beta.size(), X.cols(), "coefficients vs design columns");
  const VectorXd eta = X * beta;
  VectorXd r(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    r[i] = weights[i] * (y[i] - family.Mean(eta[i], family.Trials(i)));
  }
  return X.transpose() * r;
}

MatrixXd ObservedInformation(const Family& family, const MatrixXd& X, const VectorXd& beta,
                             const VectorXd& weights) {
  CheckSameLength(beta.size(), X.cols(), "coefficients vs design columns");
  CheckSameLength(weights.size(), X.rows(), "weights vs design rows");
  const VectorXd eta = X * beta;
  return WeightedCrossProduct(X, weights.cwiseProduct(VarianceWeights(family, eta)));
}

MatrixXd ObservedInformation(const Family& family, const MatrixXd& X, const VectorXd& beta) {
  return ObservedInformation(family, X, beta, VectorXd::Ones(X.rows()));
}

FitResult FitIrls(const Family& family, const VectorXd& y, const MatrixXd& X,
                  const VectorXd& weights, const FitOptions& options, const VectorXd* start) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n < 1) throw DimensionError("cannot fit a GLM to zero observations");
  CheckSameLength(y.size(), n, "response vs design rows");
  CheckSameLength(weights.size(), n, "weights vs response");
  if (options.ridge < 0.0) throw ConfigError("ridge must be non-negative");
  const double ridge = options.ridge;
  const bool gaussian = family.kind() == FamilyKind::kGaussian;

  auto penalized = [&](const VectorXd& beta, const VectorXd& eta) {
    double kernel = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      kernel += weights[i] * (y[i] * eta[i] - family.Cumulant(eta[i], family.Trials(i)));
    }
    return kernel - 0.5 * ridge * beta.squaredNorm();
  };

  VectorXd beta;
  if (start != nullptr) {
    CheckSameLength(start->size(), d, "start vs design columns");
    beta = *start;
  } else if (gaussian) {
    beta = VectorXd::Zero(d);
  } else {
    // Working-response start: eta0 = link of a smoothed response.
    VectorXd eta0(n), w0(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = family.Trials(i);
      const double mu0 = family.kind() == FamilyKind::kBinomial
                             ? t * (y[i] + 0.5) / (t + 1.0)
                             : y[i] + 0.1;
      eta0[i] = family.Link(mu0, t);
      w0[i] = weights[i] * family.Variance(eta0[i], t);
    }
    MatrixXd A = WeightedCrossProduct(X, w0);
    A.diagonal().array() += ridge + 1e-10;
    beta = A.ldlt().solve(X.transpose() * w0.cwiseProduct(eta0));
    if (!beta.allFinite()) beta = VectorXd::Zero(d);
  }

  FitResult result;
  VectorXd eta = X * beta;
  double objective = penalized(beta, eta);
  if (!std::isfinite(objective)) {
    beta.setZero();
    eta.setZero();
    objective = penalized(beta, eta);
  }

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    VectorXd resid(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = family.Trials(i);
      resid[i] = weights[i] * (y[i] - family.Mean(eta[i], t));
      w[i] = weights[i] * family.Variance(eta[i], t);
    }
    if (!w.allFinite() || !resid.allFinite()) throw NumericalError("IRLS weights diverged");
    const VectorXd score = X.transpose() * resid - ridge * beta;
    if (!gaussian && score.cwiseAbs().maxCoeff() < options.score_tolerance) {
      result.converged = true;
      break;
    }
    MatrixXd H = WeightedCrossProduct(X, w);
    H.diagonal().array() += ridge;
    Eigen::LLT<MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      throw SingularError("information matrix is singular; design may be rank deficient");
    }
    if (ridge == 0.0) {
      const VectorXd diag = llt.matrixLLT().diagonal().cwiseAbs2();
      if (diag.minCoeff() <= 1e-13 * diag.maxCoeff()) {
        throw SingularError("information matrix is singular; design may be rank deficient");
      }
    }
    VectorXd step = llt.solve(score);
    ++result.iterations;

    if (gaussian) {
      beta += step;
      eta = X * beta;
      result.converged = true;
      break;
    }

    VectorXd candidate = beta + step;
    VectorXd eta_new = X * candidate;
    double objective_new = penalized(candidate, eta_new);
    const double slack = 1e-12 * (std::abs(objective) + 1.0);
    int halvings = 0;
    while ((!std::isfinite(objective_new) || objective_new < objective - slack) &&
           halvings < options.max_halvings) {
      step *= 0.5;
      candidate = beta + step;
      eta_new = X * candidate;
      objective_new = penalized(candidate, eta_new);
      ++halvings;
    }
    if (!std::isfinite(objective_new)) throw NumericalError("IRLS diverged to a non-finite objective");
    if (objective_new < objective - slack) break;  // no ascent direction left

    const double change = std::abs(objective_new - objective) / (std::abs(objective_new) + 0.1);
    beta = std::move(candidate);
    eta = std::move(eta_new);
    objective = objective_new;
    if (change < options.relative_tolerance) {
      result.converged = true;
      break;
    }
  }

  if (!beta.allFinite()) throw NumericalError("IRLS produced non-finite coefficients");
  result.beta = beta;
  result.information = WeightedCrossProduct(
      X, weights.cwiseProduct(VarianceWeights(family, eta)));
  double loglik = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    loglik += weights[i] * family.LogDensity(y[i], eta[i], family.Trials(i));
  }
  result.log_likelihood = loglik;

  if (ridge > 0.0 && result.converged) {
    MatrixXd H = result.information;
    H.diagonal().array() += 0.01 * ridge;
    const VectorXd shift = H.ldlt().solve(0.99 * ridge * beta);
    const double sensitivity = shift.allFinite()
                                   ? (X * shift).cwiseAbs().maxCoeff()
                                   : std::numeric_limits<double>::infinity();
    result.ridge_dominated = !(sensitivity < kRidgeSensitivity);
  }
  return result;
}

FitResult FitIrls(const Family& family, const VectorXd& y, const MatrixXd& X,
                  const FitOptions& options, const VectorXd* start) {
  return FitIrls(family, y, X, VectorXd::Ones(y.size()), options, start);
}

MatrixXd SelectColumns(const MatrixXd& X, const std::vector<int>& cols) {
  MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(cols[k]);
  return out;
}

double LogDetSpd(const MatrixXd& A) {
  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw SingularError("matrix is not positive definite");
  const VectorXd diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) throw SingularError("matrix is not positive definite");
  return 2.0 * diag.array().log().sum();
}

}  // namespace pepglm
