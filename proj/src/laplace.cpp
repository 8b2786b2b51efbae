#include "pepglm/laplace.hpp"

#include <cmath>
#include <limits>

#include "pepglm/error.hpp"

namespace pepglm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

LaplaceTerms ComputeLaplaceTerms(const Family& family, const VectorXd& y_star,
                                 const MatrixXd& X_gamma, BaselineKind baseline,
                                 const VectorXd* start) {
  FitResult fit = FitIrls(family, y_star, X_gamma, SamplerFitOptions(family), start);
  LaplaceTerms t;
  t.dimension = static_cast<int>(X_gamma.cols());
  t.mode = std::move(fit.beta);
  if (!fit.converged) return t;
  t.log_likelihood = fit.log_likelihood;
  if (fit.ridge_dominated) {
    // MLE at infinity. Under Jeffreys the determinant and the prior cancel
    // and the formula tends to (d/2) log(2 pi delta) + sup log f / delta;
    // under a flat baseline the determinant vanishes and the value diverges.
    t.at_infinity = true;
    t.usable = baseline == BaselineKind::kJeffreys;
    return t;
  }
  Eigen::LLT<MatrixXd> llt(fit.information);
  if (llt.info() != Eigen::Success) return t;
  t.log_det_information = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  if (!std::isfinite(t.log_det_information)) return t;
  t.log_baseline = baseline == BaselineKind::kJeffreys ? 0.5 * t.log_det_information : 0.0;
  t.usable = true;
  return t;
}

double LaplaceLogMarginal(const LaplaceTerms& terms, double delta) {
  if (!terms.usable) return std::numeric_limits<double>::infinity();
  return 0.5 * terms.dimension * (kLog2Pi + std::log(delta)) - 0.5 * terms.log_det_information +
         terms.log_likelihood / delta + terms.log_baseline;
}

double LaplaceLogMarginal(const Family& family, const VectorXd& y_star, const MatrixXd& X_gamma,
                          BaselineKind baseline, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  family.ValidateResponse(y_star);
  const LaplaceTerms t = ComputeLaplaceTerms(family, y_star, X_gamma, baseline);
  if (!t.usable) {
    throw NumericalError("Laplace approximation diverges: no finite MLE for this imaginary response");
  }
  return LaplaceLogMarginal(t, delta);
}

double GaussianLogMarginalExact(const VectorXd& y_star, const MatrixXd& X, double delta) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (y_star.size() != n) throw DimensionError("response and design do not conform");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  if (qr.rank() < d) throw SingularError("design is rank deficient");
  const VectorXd fitted = X * qr.solve(y_star);
  const double rss = (y_star - fitted).squaredNorm();
  const double log_det_xtx = 2.0 * qr.matrixR().topLeftCorner(d, d).diagonal().cwiseAbs()
                                        .array().log().sum();
  return -0.5 * n * kLog2Pi / delta - 0.5 * rss / delta + 0.5 * d * (kLog2Pi + std::log(delta)) -
         0.5 * log_det_xtx;
}

LaplaceTerms LaplaceCache::Evaluate(const ModelIndicator& gamma, const VectorXd& y_star) {
  const MatrixXd Xg = SelectColumns(X_, gamma.Columns());
  auto it = warm_.find(gamma.bits());
  const VectorXd* start = it == warm_.end() ? nullptr : &it->second;
  ++fits_;
  LaplaceTerms t = ComputeLaplaceTerms(family_, y_star, Xg, baseline_, start);
  if (t.usable && !t.at_infinity) warm_[gamma.bits()] = t.mode;
  return t;
}

const LaplaceTerms& LaplaceCache::Get(const ModelIndicator& gamma, const VectorXd& y_star) {
  auto it = terms_.find(gamma.bits());
  if (it != terms_.end()) return it->second;
  return terms_.emplace(gamma.bits(), Evaluate(gamma, y_star)).first->second;
}

void LaplaceCache::Store(const ModelIndicator& gamma, LaplaceTerms terms) {
  if (terms.usable && !terms.at_infinity) warm_[gamma.bits()] = terms.mode;
  terms_[gamma.bits()] = std::move(terms);
}

}  // namespace pepglm
