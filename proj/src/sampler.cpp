#include "pepglm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pepglm/error.hpp"

namespace pepglm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogNormalPdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * (kLog2Pi + z * z) - std::log(sd);
}

double LogGammaPdf(double x, double shape) {
  return (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
}

double LogPoissonPmf(double k, double mean) {
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double LogBinomialPmf(double k, double trials, double p) {
  double out = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
  if (k > 0) out += k * std::log(p);
  if (trials - k > 0) out += (trials - k) * std::log1p(-p);
  return out;
}

double LogSigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Probability of gamma_j = 1 from the log odds, with infinite odds allowed.
double InclusionProbability(double log_odds) {
  if (log_odds == std::numeric_limits<double>::infinity()) return 1.0;
  if (log_odds == kNegInf) return 0.0;
  return Sigmoid(log_odds);
}

double Uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool AcceptLog(std::mt19937_64& rng, double log_ratio) {
  const double u = Uniform(rng);
  return log_ratio >= 0.0 || std::log(u) < log_ratio;
}

// Draw from N(mean, Q^{-1}) given the Cholesky factor of the precision Q.
VectorXd DrawGaussian(std::mt19937_64& rng, const VectorXd& mean, const Eigen::LLT<MatrixXd>& llt) {
  std::normal_distribution<double> z;
  VectorXd e(mean.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = z(rng);
  return mean + llt.matrixU().solve(e);
}

double GaussianKernel(const VectorXd& x, const VectorXd& mean, const MatrixXd& precision) {
  const VectorXd d = x - mean;
  return -0.5 * d.dot(precision * d);
}

VectorXd Gather(const VectorXd& v, const std::vector<int>& idx) {
  VectorXd out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

void Scatter(VectorXd& v, const std::vector<int>& idx, const VectorXd& values) {
  for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] = values[k];
}

}  // namespace

ReferenceMode ReferenceFromName(std::string_view name) {
  if (name == "cr" || name == "CR") return ReferenceMode::kCR;
  if (name == "dr" || name == "DR") return ReferenceMode::kDR;
  throw ConfigError("unknown reference mode '" + std::string(name) + "'");
}

std::string_view ReferenceName(ReferenceMode mode) {
  return mode == ReferenceMode::kCR ? "cr" : "dr";
}

void SamplerConfig::Validate(int n, int p) const {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (burnin < 0 || burnin >= iterations) throw ConfigError("burn-in must lie in [0, iterations)");
  if (model_prior.p != p) throw ConfigError("model prior dimension differs from the data");
  if (delta.n != n && delta.n != 0) throw ConfigError("delta prior sample size differs from the data");
  delta.Validate();
  if (fixed_model && fixed_model->p() != p) throw ConfigError("fixed model has the wrong length");
}

void GPriorSamplerConfig::Validate(int n, int p) const {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (burnin < 0 || burnin >= iterations) throw ConfigError("burn-in must lie in [0, iterations)");
  if (model_prior.p != p) throw ConfigError("model prior dimension differs from the data");
  if (prior.n != n) throw ConfigError("g-prior sample size differs from the data");
  prior.Validate();
  if (fixed_model && fixed_model->p() != p) throw ConfigError("fixed model has the wrong length");
}

PseudoPrior PseudoPrior::FromData(const Dataset& data) {
  const FitOptions opts = SamplerFitOptions(data.family);
  const FitResult fit = FitIrls(data.family, data.y, data.X, opts);
  if (!fit.converged) {
    throw NumericalError("full-model fit on the observed data did not converge");
  }
  MatrixXd info = fit.information;
  info.diagonal().array() += opts.ridge;
  const MatrixXd cov = info.ldlt().solve(MatrixXd::Identity(info.rows(), info.cols()));
  PseudoPrior pp;
  pp.mean = fit.beta;
  pp.sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  if (!pp.sd.allFinite() || (pp.sd.array() <= 0.0).any()) {
    throw NumericalError("pseudo-prior standard errors are not finite");
  }
  return pp;
}

double PseudoPrior::LogDensity(int column, double value) const {
  return LogNormalPdf(value, mean[column], sd[column]);
}

double BinomialProposalProbability(double beta0, double eta, double psi, double delta) {
  const double a = LogSigmoid(beta0) / psi + LogSigmoid(eta) / delta;
  const double b = LogSigmoid(-beta0) / psi + LogSigmoid(-eta) / delta;
  return Sigmoid(a - b);
}

double PoissonProposalMean(double beta0, double eta, double psi, double delta) {
  return std::clamp(std::exp(beta0 / psi + eta / delta), 1e-12, 1e12);
}

// --- PEP sampler -------------------------------------------------------------

PepSampler::PepSampler(const Dataset& data, const SamplerConfig& config)
    : data_(data),
      config_(config),
      pseudo_(PseudoPrior::FromData(data)),
      rng_(config.seed),
      laplace_(data.family, data.X, config.baseline),
      stacked_family_(data.family.Stacked(2)),
      null_column_(MatrixXd::Ones(data.n(), 1)) {
  if (config_.delta.n == 0) config_.delta.n = data.n();
  config_.Validate(data.n(), data.p());

  state_.gamma = config_.fixed_model ? *config_.fixed_model : ModelIndicator::Full(data.p());
  state_.beta = pseudo_.mean;
  const FitResult null_fit = FitIrls(data.family, data.y, null_column_, SamplerFitOptions(data.family));
  if (!null_fit.usable()) {
    throw NumericalError("intercept-only fit on the observed data has no finite MLE");
  }
  state_.beta0 = null_fit.beta[0];
  state_.y_star = data.y;
  state_.delta = config_.delta.IsRandom() ? static_cast<double>(data.n()) : config_.delta.FixedValue();
  eta_ = LinearPredictor(state_.gamma);

  out_.p = data.p();
  out_.scale_name = "delta";
}

void PepSampler::SetState(const SamplerState& state) {
  if (state.gamma.p() != data_.p() || state.beta.size() != data_.p() + 1 ||
      state.y_star.size() != data_.n()) {
    throw DimensionError("sampler state does not conform to the data");
  }
  if (!(state.delta > 0.0)) throw DomainError("delta must be positive");
  data_.family.ValidateResponse(state.y_star);
  state_ = state;
  eta_ = LinearPredictor(state_.gamma);
  laplace_.Invalidate();
}

VectorXd PepSampler::LinearPredictor(const ModelIndicator& gamma) const {
  VectorXd eta = VectorXd::Constant(data_.n(), state_.beta[0]);
  for (int j = 0; j < data_.p(); ++j) {
    if (gamma.Includes(j)) eta.noalias() += data_.X.col(j + 1) * state_.beta[j + 1];
  }
  return eta;
}

double PepSampler::LogNullBaseline(double beta0) const {
  if (config_.baseline == BaselineKind::kFlat) return 0.0;
  double trace = 0.0;
  for (int i = 0; i < data_.n(); ++i) trace += data_.family.Variance(beta0, data_.family.Trials(i));
  return trace > 0.0 ? 0.5 * std::log(trace) : kNegInf;
}

double PepSampler::LogActiveBaseline(const ModelIndicator& gamma, const VectorXd& eta) const {
  if (config_.baseline == BaselineKind::kFlat) return 0.0;
  const MatrixXd Xg = SelectColumns(data_.X, gamma.Columns());
  const VectorXd w = VarianceWeights(data_.family, eta);
  const MatrixXd Xw = Xg.array().colwise() * w.array().sqrt();
  Eigen::LLT<MatrixXd> llt(Xw.transpose() * Xw);
  if (llt.info() != Eigen::Success) return kNegInf;
  const double ld = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return std::isfinite(ld) ? 0.5 * ld : kNegInf;
}

double PepSampler::GammaLogOdds(int j) {
  if (j < 0 || j >= data_.p()) throw DimensionError("predictor index out of range");
  const ModelIndicator g1 = state_.gamma.With(j, true);
  const ModelIndicator g0 = state_.gamma.With(j, false);
  const int col = j + 1;
  const double delta = state_.delta;
  VectorXd eta0 = eta_;
  if (state_.gamma.Includes(j)) eta0.noalias() -= data_.X.col(col) * state_.beta[col];
  VectorXd eta1 = eta0 + data_.X.col(col) * state_.beta[col];

  const double d_obs = LogLikelihoodKernel(data_.family, data_.y, eta1) -
                       LogLikelihoodKernel(data_.family, data_.y, eta0);
  const double d_imag = (LogLikelihoodKernel(data_.family, state_.y_star, eta1) -
                         LogLikelihoodKernel(data_.family, state_.y_star, eta0)) /
                        delta;
  const double d_base = LogActiveBaseline(g1, eta1) - LogActiveBaseline(g0, eta0);
  const double d_pseudo = -pseudo_.LogDensity(col, state_.beta[col]);
  const double d_model = LogModelPrior(config_.model_prior, g1) - LogModelPrior(config_.model_prior, g0);
  const double m1 = LaplaceLogMarginal(laplace_.Get(g1, state_.y_star), delta);
  const double m0 = LaplaceLogMarginal(laplace_.Get(g0, state_.y_star), delta);

  double d_marginal;
  if (std::isinf(m1) && std::isinf(m0)) {
    return std::numeric_limits<double>::quiet_NaN();
  } else if (std::isinf(m1)) {
    return kNegInf;
  } else if (std::isinf(m0)) {
    return std::numeric_limits<double>::infinity();
  } else {
    d_marginal = m1 - m0;
  }
  return d_obs + d_imag + d_base + d_pseudo - d_marginal + d_model;
}

void PepSampler::SweepGamma() {
  for (int j = 0; j < data_.p(); ++j) {
    const double log_odds = GammaLogOdds(j);
    const double u = Uniform(rng_);
    if (std::isnan(log_odds)) {
      const bool both = !laplace_.Get(state_.gamma.With(j, true), state_.y_star).usable &&
                        !laplace_.Get(state_.gamma.With(j, false), state_.y_star).usable;
      if (both) {
        ++out_.diagnostics.retained_both_unusable;
      } else {
        ++out_.diagnostics.retained_nonfinite_odds;
      }
      continue;
    }
    const bool include = u < InclusionProbability(log_odds);
    if (include != state_.gamma.Includes(j)) {
      const int col = j + 1;
      if (include) {
        eta_.noalias() += data_.X.col(col) * state_.beta[col];
      } else {
        eta_.noalias() -= data_.X.col(col) * state_.beta[col];
      }
      state_.gamma.Set(j, include);
    }
  }
}

void PepSampler::UpdateBeta() {
  const std::vector<int> cols = state_.gamma.Columns();
  const int n = data_.n();
  const MatrixXd Xg = SelectColumns(data_.X, cols);
  MatrixXd X_all(2 * n, Xg.cols());
  X_all << Xg, Xg;
  VectorXd y_all(2 * n);
  y_all << data_.y, state_.y_star;
  VectorXd w_all(2 * n);
  w_all << VectorXd::Ones(n), VectorXd::Constant(n, 1.0 / state_.delta);

  const VectorXd current = Gather(state_.beta, cols);
  const FitOptions opts = SamplerFitOptions(data_.family);
  FitResult fit;
  try {
    fit = FitIrls(stacked_family_, y_all, X_all, w_all, opts, &current);
  } catch (const NumericalError&) {
    fit.converged = false;
  }
  if (!fit.converged) {
    ++out_.diagnostics.beta_fit_skipped;
    return;
  }
  MatrixXd Q = fit.information;
  Q.diagonal().array() += opts.ridge;
  Eigen::LLT<MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    ++out_.diagnostics.beta_fit_skipped;
    return;
  }
  const VectorXd proposal = DrawGaussian(rng_, fit.beta, llt);

  ModelIndicator gamma = state_.gamma;
  auto log_target = [&](const VectorXd& eta) {
    return LogLikelihoodKernel(data_.family, data_.y, eta) +
           LogLikelihoodKernel(data_.family, state_.y_star, eta) / state_.delta +
           LogActiveBaseline(gamma, eta);
  };
  const VectorXd eta_new = Xg * proposal;
  const double log_ratio = log_target(eta_new) - log_target(eta_) +
                           GaussianKernel(current, fit.beta, Q) -
                           GaussianKernel(proposal, fit.beta, Q);
  ++out_.beta_moves.attempted;
  if (std::isnan(log_ratio)) {
    ++out_.diagnostics.nonfinite_ratios;
    Uniform(rng_);
    return;
  }
  if (AcceptLog(rng_, log_ratio)) {
    ++out_.beta_moves.accepted;
    Scatter(state_.beta, cols, proposal);
    eta_ = eta_new;
  }
}

void PepSampler::UpdateInactive() {
  std::normal_distribution<double> z;
  for (int col : state_.gamma.InactiveColumns()) {
    state_.beta[col] = pseudo_.mean[col] + pseudo_.sd[col] * z(rng_);
  }
}

void PepSampler::UpdateBeta0() {
  const LaplaceTerms& null_terms = laplace_.Get(ModelIndicator::Empty(data_.p()), state_.y_star);
  if (!null_terms.usable) {
    ++out_.diagnostics.beta0_fit_skipped;
    return;
  }
  const double psi = psi_for(state_.delta);
  const double center = null_terms.mode[0];
  const double sd = std::sqrt(psi * std::exp(-null_terms.log_det_information));
  const double proposal = center + sd * std::normal_distribution<double>()(rng_);

  auto log_target = [&](double b0) {
    return LogLikelihoodKernel(data_.family, state_.y_star, VectorXd::Constant(data_.n(), b0)) / psi +
           LogNullBaseline(b0);
  };
  auto log_q = [&](double b0) { return -0.5 * (b0 - center) * (b0 - center) / (sd * sd); };
  const double log_ratio = log_target(proposal) - log_target(state_.beta0) + log_q(state_.beta0) -
                           log_q(proposal);
  ++out_.beta0_moves.attempted;
  if (std::isnan(log_ratio)) {
    ++out_.diagnostics.nonfinite_ratios;
    Uniform(rng_);
    return;
  }
  if (AcceptLog(rng_, log_ratio)) {
    ++out_.beta0_moves.accepted;
    state_.beta0 = proposal;
  }
}

void PepSampler::UpdateYStar() {
  const int n = data_.n();
  const double delta = state_.delta;
  const double psi = psi_for(delta);
  const double b0 = state_.beta0;
  const Family& fam = data_.family;
  const VectorXd& cur = state_.y_star;
  VectorXd prop(n);
  double log_q_forward = 0.0;  // q(y*' | y*)
  double log_q_backward = 0.0;  // q(y* | y*')

  switch (fam.kind()) {
    case FamilyKind::kBinomial:
      for (int i = 0; i < n; ++i) {
        const double pi = BinomialProposalProbability(b0, eta_[i], psi, delta);
        const double t = fam.Trials(i);
        prop[i] = std::binomial_distribution<int>(static_cast<int>(t), pi)(rng_);
        log_q_forward += LogBinomialPmf(prop[i], t, pi);
        log_q_backward += LogBinomialPmf(cur[i], t, pi);
      }
      break;
    case FamilyKind::kPoisson:
      if (config_.reference == ReferenceMode::kCR) {
        for (int i = 0; i < n; ++i) {
          const double mean = PoissonProposalMean(b0, eta_[i], psi, delta);
          prop[i] = std::poisson_distribution<long>(mean)(rng_);
          log_q_forward += LogPoissonPmf(prop[i], mean);
          log_q_backward += LogPoissonPmf(cur[i], mean);
        }
      } else {
        // Random walk centred at the current count; the 0.5 floor keeps
        // zero counts from being absorbing.
        for (int i = 0; i < n; ++i) {
          const double mean = std::max(cur[i], 0.5);
          prop[i] = std::poisson_distribution<long>(mean)(rng_);
          log_q_forward += LogPoissonPmf(prop[i], mean);
          log_q_backward += LogPoissonPmf(cur[i], std::max(prop[i], 0.5));
        }
      }
      break;
    case FamilyKind::kGaussian: {
      const double precision = 1.0 / psi + 1.0 / delta;
      const double sd = 1.0 / std::sqrt(precision);
      std::normal_distribution<double> z;
      for (int i = 0; i < n; ++i) {
        const double mean = (b0 / psi + eta_[i] / delta) / precision;
        prop[i] = mean + sd * z(rng_);
        log_q_forward += LogNormalPdf(prop[i], mean, sd);
        log_q_backward += LogNormalPdf(cur[i], mean, sd);
      }
      break;
    }
  }

  ++out_.ystar_moves.attempted;
  LaplaceTerms proposed = laplace_.Evaluate(state_.gamma, prop);
  const double u = Uniform(rng_);
  if (!proposed.usable) {
    ++out_.diagnostics.ystar_unusable;
    return;
  }
  const double m_new = LaplaceLogMarginal(proposed, delta);
  const double m_cur = LaplaceLogMarginal(laplace_.Get(state_.gamma, cur), delta);
  bool accept;
  if (std::isinf(m_cur)) {
    // The current configuration has zero density; any usable proposal wins.
    accept = true;
  } else {
    const VectorXd eta0 = VectorXd::Constant(n, b0);
    const double log_ratio =
        (LogLikelihoodAt(fam, prop, eta_) - LogLikelihoodAt(fam, cur, eta_)) / delta +
        (LogLikelihoodAt(fam, prop, eta0) - LogLikelihoodAt(fam, cur, eta0)) / psi -
        (m_new - m_cur) + log_q_backward - log_q_forward;
    if (std::isnan(log_ratio)) {
      ++out_.diagnostics.nonfinite_ratios;
      return;
    }
    accept = log_ratio >= 0.0 || std::log(u) < log_ratio;
  }
  if (accept) {
    ++out_.ystar_moves.accepted;
    state_.y_star = std::move(prop);
    laplace_.Invalidate();
    laplace_.Store(state_.gamma, std::move(proposed));
  }
}

void PepSampler::UpdateDelta() {
  if (!config_.delta.IsRandom()) return;
  const double delta = state_.delta;
  const double proposal = std::gamma_distribution<double>(delta, 1.0)(rng_);
  const double u = Uniform(rng_);
  ++out_.scale_moves.attempted;
  const LaplaceTerms& terms = laplace_.Get(state_.gamma, state_.y_star);
  if (!terms.usable || !(proposal > 0.0)) {
    ++out_.diagnostics.nonfinite_ratios;
    return;
  }
  const double psi = psi_for(delta);
  const double psi_new = psi_for(proposal);
  const double d = state_.gamma.Dimension();
  const double log_lik_gap = LogLikelihoodAt(data_.family, state_.y_star, eta_) - terms.log_likelihood;
  double log_ratio = 0.5 * d * (std::log(delta) - std::log(proposal)) +
                     (1.0 / proposal - 1.0 / delta) * log_lik_gap +
                     LogDeltaPrior(config_.delta, proposal) - LogDeltaPrior(config_.delta, delta) +
                     LogGammaPdf(delta, proposal) - LogGammaPdf(proposal, delta);
  if (psi_new != psi) {
    const double null_loglik = LogLikelihoodAt(data_.family, state_.y_star,
                                               VectorXd::Constant(data_.n(), state_.beta0));
    log_ratio += (1.0 / psi_new - 1.0 / psi) * null_loglik;
  }
  if (!std::isfinite(log_ratio)) {
    ++out_.diagnostics.nonfinite_ratios;
    return;
  }
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
    ++out_.scale_moves.accepted;
    state_.delta = proposal;
  }
}

void PepSampler::Step() {
  if (!config_.fixed_model) SweepGamma();
  UpdateBeta();
  UpdateInactive();
  UpdateBeta0();
  UpdateYStar();
  if (config_.delta.IsRandom()) UpdateDelta();
}

void PepSampler::Record() {
  out_.gamma_draws.push_back(state_.gamma);
  out_.scale_draws.push_back(state_.delta);
  ++out_.visits[state_.gamma];
  if (config_.record_beta) {
    out_.beta_draws.push_back(state_.beta);
    out_.beta0_draws.push_back(state_.beta0);
  }
}

ChainOutput PepSampler::Run() {
  const int retained = config_.iterations - config_.burnin;
  out_.gamma_draws.reserve(retained);
  out_.scale_draws.reserve(retained);
  for (int it = 0; it < config_.iterations; ++it) {
    Step();
    if (it >= config_.burnin) Record();
  }
  return out_;
}

ChainOutput RunPepChain(const Dataset& data, const SamplerConfig& config) {
  PepSampler sampler(data, config);
  return sampler.Run();
}

// --- g-prior sampler ---------------------------------------------------------

GPriorSampler::GPriorSampler(const Dataset& data, const GPriorSamplerConfig& config)
    : data_(data), config_(config), pseudo_(PseudoPrior::FromData(data)), rng_(config.seed) {
  if (config_.prior.n == 0) config_.prior.n = data.n();
  config_.Validate(data.n(), data.p());
  const VectorXd w0 = NullModelWeights(data.family, data.y);
  const MatrixXd Xt = data.X.rightCols(data.p());
  precision_ = Xt.transpose() * w0.asDiagonal() * Xt;
  gamma_ = config_.fixed_model ? *config_.fixed_model : ModelIndicator::Full(data.p());
  beta_ = pseudo_.mean;
  g_ = config_.prior.IsRandom() ? static_cast<double>(data.n()) : config_.prior.FixedG();
  eta_ = VectorXd::Constant(data.n(), beta_[0]);
  for (int j = 0; j < data.p(); ++j) {
    if (gamma_.Includes(j)) eta_.noalias() += data_.X.col(j + 1) * beta_[j + 1];
  }
  out_.p = data.p();
  out_.scale_name = "g";
}

const GPriorSampler::ModelFit& GPriorSampler::FitFor(const ModelIndicator& gamma) {
  auto it = fits_.find(gamma.bits());
  if (it != fits_.end()) return it->second;
  ModelFit mf;
  const std::vector<int> cols = gamma.Columns();
  const MatrixXd Xg = SelectColumns(data_.X, cols);
  try {
    const FitResult fit = FitIrls(data_.family, data_.y, Xg, SamplerFitOptions(data_.family));
    mf.ok = fit.converged;
    mf.mode = fit.beta;
    mf.information = fit.information;
  } catch (const NumericalError&) {
    mf.ok = false;
  }
  const int k = gamma.Size();
  mf.slope_precision.resize(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) mf.slope_precision(a, b) = precision_(cols[a + 1] - 1, cols[b + 1] - 1);
  }
  mf.log_det_precision = k > 0 ? LogDetSpd(mf.slope_precision) : 0.0;
  return fits_.emplace(gamma.bits(), std::move(mf)).first->second;
}

double GPriorSampler::LogSlopePrior(const ModelIndicator& gamma, const VectorXd& beta, double g) {
  const int k = gamma.Size();
  if (k == 0) return 0.0;
  const ModelFit& mf = FitFor(gamma);
  VectorXd slopes(k);
  int a = 0;
  for (int j = 0; j < data_.p(); ++j) {
    if (gamma.Includes(j)) slopes[a++] = beta[j + 1];
  }
  const double quad = slopes.dot(mf.slope_precision * slopes);
  return -0.5 * k * (kLog2Pi + std::log(g)) + 0.5 * mf.log_det_precision - 0.5 * quad / g;
}

double GPriorSampler::LogGPrior(double g, int p_gamma) const {
  return LogGDensity(config_.prior, g, p_gamma);
}

double GPriorSampler::GammaLogOdds(int j) {
  const ModelIndicator g1 = gamma_.With(j, true);
  const ModelIndicator g0 = gamma_.With(j, false);
  const int col = j + 1;
  VectorXd eta0 = eta_;
  if (gamma_.Includes(j)) eta0.noalias() -= data_.X.col(col) * beta_[col];
  const VectorXd eta1 = eta0 + data_.X.col(col) * beta_[col];
  double log_odds = LogLikelihoodKernel(data_.family, data_.y, eta1) -
                    LogLikelihoodKernel(data_.family, data_.y, eta0) +
                    LogSlopePrior(g1, beta_, g_) - LogSlopePrior(g0, beta_, g_) -
                    pseudo_.LogDensity(col, beta_[col]) +
                    LogModelPrior(config_.model_prior, g1) - LogModelPrior(config_.model_prior, g0);
  if (config_.prior.kind == GPriorKind::kMgHyperG) {
    log_odds += LogGPrior(g_, g1.Size()) - LogGPrior(g_, g0.Size());
  }
  return log_odds;
}

void GPriorSampler::SweepGamma() {
  for (int j = 0; j < data_.p(); ++j) {
    const double log_odds = GammaLogOdds(j);
    const double u = Uniform(rng_);
    if (std::isnan(log_odds)) {
      ++out_.diagnostics.retained_nonfinite_odds;
      continue;
    }
    const bool include = u < InclusionProbability(log_odds);
    if (include != gamma_.Includes(j)) {
      const int col = j + 1;
      if (include) {
        eta_.noalias() += data_.X.col(col) * beta_[col];
      } else {
        eta_.noalias() -= data_.X.col(col) * beta_[col];
      }
      gamma_.Set(j, include);
    }
  }
}

void GPriorSampler::UpdateBeta() {
  const ModelFit& mf = FitFor(gamma_);
  if (!mf.ok) {
    ++out_.diagnostics.beta_fit_skipped;
    return;
  }
  const std::vector<int> cols = gamma_.Columns();
  const int d = static_cast<int>(cols.size());
  // Gaussian approximation to likelihood times g-prior.
  MatrixXd Q = mf.information;
  Q.bottomRightCorner(d - 1, d - 1) += mf.slope_precision / g_;
  Q.diagonal().array() += SamplerFitOptions(data_.family).ridge;
  Eigen::LLT<MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    ++out_.diagnostics.beta_fit_skipped;
    return;
  }
  const VectorXd center = llt.solve(mf.information * mf.mode);
  const VectorXd proposal = DrawGaussian(rng_, center, llt);
  const MatrixXd Xg = SelectColumns(data_.X, cols);
  const VectorXd current = Gather(beta_, cols);
  VectorXd beta_new = beta_;
  Scatter(beta_new, cols, proposal);
  const VectorXd eta_new = Xg * proposal;
  const double log_ratio = LogLikelihoodKernel(data_.family, data_.y, eta_new) -
                           LogLikelihoodKernel(data_.family, data_.y, eta_) +
                           LogSlopePrior(gamma_, beta_new, g_) - LogSlopePrior(gamma_, beta_, g_) +
                           GaussianKernel(current, center, Q) - GaussianKernel(proposal, center, Q);
  ++out_.beta_moves.attempted;
  if (std::isnan(log_ratio)) {
    ++out_.diagnostics.nonfinite_ratios;
    Uniform(rng_);
    return;
  }
  if (AcceptLog(rng_, log_ratio)) {
    ++out_.beta_moves.accepted;
    beta_ = std::move(beta_new);
    eta_ = eta_new;
  }
}

void GPriorSampler::UpdateInactive() {
  std::normal_distribution<double> z;
  for (int col : gamma_.InactiveColumns()) beta_[col] = pseudo_.mean[col] + pseudo_.sd[col] * z(rng_);
}

void GPriorSampler::UpdateG() {
  if (!config_.prior.IsRandom()) return;
  const double proposal = std::gamma_distribution<double>(g_, 1.0)(rng_);
  const double u = Uniform(rng_);
  ++out_.scale_moves.attempted;
  if (!(proposal > 0.0)) {
    ++out_.diagnostics.nonfinite_ratios;
    return;
  }
  const int k = gamma_.Size();
  const double log_ratio = LogSlopePrior(gamma_, beta_, proposal) - LogSlopePrior(gamma_, beta_, g_) +
                           LogGPrior(proposal, k) - LogGPrior(g_, k) + LogGammaPdf(g_, proposal) -
                           LogGammaPdf(proposal, g_);
  if (!std::isfinite(log_ratio)) {
    ++out_.diagnostics.nonfinite_ratios;
    return;
  }
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
    ++out_.scale_moves.accepted;
    g_ = proposal;
  }
}

void GPriorSampler::Step() {
  if (!config_.fixed_model) SweepGamma();
  UpdateBeta();
  UpdateInactive();
  UpdateG();
}

void GPriorSampler::Record() {
  out_.gamma_draws.push_back(gamma_);
  out_.scale_draws.push_back(g_);
  ++out_.visits[gamma_];
  if (config_.record_beta) {
    out_.beta_draws.push_back(beta_);
    out_.beta0_draws.push_back(beta_[0]);
  }
}

ChainOutput GPriorSampler::Run() {
  const int retained = config_.iterations - config_.burnin;
  out_.gamma_draws.reserve(retained);
  out_.scale_draws.reserve(retained);
  for (int it = 0; it < config_.iterations; ++it) {
    Step();
    if (it >= config_.burnin) Record();
  }
  return out_;
}

ChainOutput RunGPriorChain(const Dataset& data, const GPriorSamplerConfig& config) {
  GPriorSampler sampler(data, config);
  return sampler.Run();
}

}  // namespace pepglm
