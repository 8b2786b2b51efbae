#include "pepglm/priors.hpp"

#include <cmath>
#include <string>

#include "pepglm/error.hpp"

namespace pepglm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double LogChoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void CheckShape(double a) {
  if (!(a > 2.0) || !std::isfinite(a)) {
    throw ConfigError("hyper-prior parameter a must exceed 2, got " + std::to_string(a));
  }
}

}  // namespace

BaselineKind BaselineFromName(std::string_view name) {
  if (name == "flat") return BaselineKind::kFlat;
  if (name == "jeffreys") return BaselineKind::kJeffreys;
  throw ConfigError("unknown baseline prior '" + std::string(name) + "'");
}

std::string_view BaselineName(BaselineKind kind) {
  return kind == BaselineKind::kFlat ? "flat" : "jeffreys";
}

double LogBaselinePrior(BaselineKind kind, const Family& family, const MatrixXd& X_gamma,
                        const VectorXd& beta_gamma) {
  if (X_gamma.cols() != beta_gamma.size()) {
    throw DimensionError("baseline prior: design and coefficients do not conform");
  }
  if (kind == BaselineKind::kFlat) return 0.0;
  return 0.5 * LogDetSpd(ObservedInformation(family, X_gamma, beta_gamma));
}

DeltaMode DeltaModeFromName(std::string_view name) {
  if (name == "fixed") return DeltaMode::kFixed;
  if (name == "hyper") return DeltaMode::kHyper;
  if (name == "hyper-n") return DeltaMode::kHyperN;
  throw ConfigError("unknown delta mode '" + std::string(name) + "'");
}

std::string_view DeltaModeName(DeltaMode mode) {
  switch (mode) {
    case DeltaMode::kFixed: return "fixed";
    case DeltaMode::kHyper: return "hyper";
    case DeltaMode::kHyperN: return "hyper-n";
  }
  return "unknown";
}

void DeltaPrior::Validate() const {
  if (mode != DeltaMode::kFixed) CheckShape(a);
  if (mode == DeltaMode::kHyperN && n < 1) throw ConfigError("hyper-n delta prior needs n >= 1");
  if (mode == DeltaMode::kFixed && !(FixedValue() > 0.0)) {
    throw ConfigError("fixed delta must be positive");
  }
}

double LogDeltaPrior(const DeltaPrior& prior, double delta) {
  if (prior.mode == DeltaMode::kFixed) throw ConfigError("fixed delta has no density");
  CheckShape(prior.a);
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (prior.mode == DeltaMode::kHyper) {
    return std::log((prior.a - 2.0) / 2.0) - 0.5 * prior.a * std::log1p(delta);
  }
  if (prior.n < 1) throw ConfigError("hyper-n delta prior needs n >= 1");
  const double n = prior.n;
  return std::log((prior.a - 2.0) / (2.0 * n)) - 0.5 * prior.a * std::log1p(delta / n);
}

ModelPriorKind ModelPriorFromName(std::string_view name) {
  if (name == "uniform") return ModelPriorKind::kUniform;
  if (name == "betabinomial" || name == "beta-binomial") return ModelPriorKind::kBetaBinomial;
  throw ConfigError("unknown model prior '" + std::string(name) + "'");
}

std::string_view ModelPriorName(ModelPriorKind kind) {
  return kind == ModelPriorKind::kUniform ? "uniform" : "betabinomial";
}

double LogModelPrior(const ModelPrior& prior, const ModelIndicator& gamma) {
  if (gamma.p() != prior.p) throw DimensionError("model prior: indicator length differs from p");
  if (prior.kind == ModelPriorKind::kUniform) return -prior.p * std::log(2.0);
  return -std::log(prior.p + 1.0) - LogChoose(prior.p, gamma.Size());
}

GPriorKind GPriorFromName(std::string_view name) {
  if (name == "g-prior" || name == "unit-info") return GPriorKind::kUnitInfo;
  if (name == "hyper-g") return GPriorKind::kHyperG;
  if (name == "hyper-g-n") return GPriorKind::kHyperGN;
  if (name == "mg-hyper-g") return GPriorKind::kMgHyperG;
  throw ConfigError("unknown g-prior '" + std::string(name) + "'");
}

std::string_view GPriorName(GPriorKind kind) {
  switch (kind) {
    case GPriorKind::kUnitInfo: return "g-prior";
    case GPriorKind::kHyperG: return "hyper-g";
    case GPriorKind::kHyperGN: return "hyper-g-n";
    case GPriorKind::kMgHyperG: return "mg-hyper-g";
  }
  return "unknown";
}

void GPriorConfig::Validate() const {
  if (kind == GPriorKind::kHyperG || kind == GPriorKind::kHyperGN) CheckShape(a);
  if ((kind != GPriorKind::kUnitInfo || g <= 0.0) && n < 1) {
    throw ConfigError("g-prior needs the sample size n");
  }
  if (kind == GPriorKind::kMgHyperG && n < 7) {
    throw ConfigError("MG hyper-g prior needs n large enough for a proper density");
  }
}

double LogGDensity(const GPriorConfig& cfg, double g, int p_gamma) {
  if (!(g > 0.0)) throw DomainError("g must be positive");
  switch (cfg.kind) {
    case GPriorKind::kUnitInfo:
      throw ConfigError("unit-information g-prior has no density on g");
    case GPriorKind::kHyperG: {
      DeltaPrior dp{DeltaMode::kHyper, 0.0, cfg.a, cfg.n};
      return LogDeltaPrior(dp, g);
    }
    case GPriorKind::kHyperGN: {
      DeltaPrior dp{DeltaMode::kHyperN, 0.0, cfg.a, cfg.n};
      return LogDeltaPrior(dp, g);
    }
    case GPriorKind::kMgHyperG: {
      const double a = -0.75;
      const double b = (cfg.n - p_gamma - 5) / 2.0 - a;
      if (!(b > -1.0)) throw ConfigError("MG hyper-g prior is improper for this model size");
      const double log_beta = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0);
      return b * std::log(g) - (a + b + 2.0) * std::log1p(g) - log_beta;
    }
  }
  return 0.0;
}

VectorXd NullModelWeights(const Family& family, const VectorXd& y) {
  const Eigen::Index n = y.size();
  if (n == 0) throw DimensionError("null-model weights need at least one observation");
  switch (family.kind()) {
    case FamilyKind::kBinomial: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) total += family.Trials(i);
      const double p = y.sum() / total;
      VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) w[i] = family.Trials(i) * p * (1.0 - p);
      return w;
    }
    case FamilyKind::kPoisson: return VectorXd::Constant(n, y.mean());
    case FamilyKind::kGaussian: return VectorXd::Ones(n);
  }
  return VectorXd::Ones(n);
}

double LogGPriorDensityFromPrecision(const MatrixXd& precision, const VectorXd& beta_tilde,
                                     double g) {
  const Eigen::Index k = beta_tilde.size();
  if (precision.rows() != k || precision.cols() != k) {
    throw DimensionError("g-prior precision and coefficients do not conform");
  }
  if (!(g > 0.0)) throw DomainError("g must be positive");
  if (k == 0) return 0.0;
  const double quad = beta_tilde.dot(precision * beta_tilde);
  return -0.5 * k * (kLog2Pi + std::log(g)) + 0.5 * LogDetSpd(precision) - 0.5 * quad / g;
}

double LogGPriorDensity(const MatrixXd& X_tilde, const VectorXd& w0, const VectorXd& beta_tilde,
                        double g) {
  if (X_tilde.rows() != w0.size()) throw DimensionError("g-prior weights do not conform");
  const MatrixXd P = X_tilde.transpose() * w0.asDiagonal() * X_tilde;
  return LogGPriorDensityFromPrecision(P, beta_tilde, g);
}

}  // namespace pepglm
