#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pepglm/dataset.hpp"
#include "pepglm/laplace.hpp"
#include "pepglm/model_indicator.hpp"
#include "pepglm/priors.hpp"

namespace pepglm {

enum class ReferenceMode { kCR, kDR };

ReferenceMode ReferenceFromName(std::string_view name);
std::string_view ReferenceName(ReferenceMode mode);

struct SamplerConfig {
  int iterations = 41000;
  int burnin = 1000;
  std::uint64_t seed = 1;
  ReferenceMode reference = ReferenceMode::kCR;
  DeltaPrior delta;
  BaselineKind baseline = BaselineKind::kJeffreys;
  ModelPrior model_prior;
  // Freeze gamma at this model (no gamma sweep).
  std::optional<ModelIndicator> fixed_model;
  // Keep the full coefficient vector of every retained draw.
  bool record_beta = false;

  // Throws ConfigError on inconsistent settings for a dataset with p
  // predictors and n rows.
  void Validate(int n, int p) const;
};

struct GPriorSamplerConfig {
  int iterations = 41000;
  int burnin = 1000;
  std::uint64_t seed = 1;
  GPriorConfig prior;
  ModelPrior model_prior;
  std::optional<ModelIndicator> fixed_model;
  bool record_beta = false;

  void Validate(int n, int p) const;
};

struct SamplerState {
  ModelIndicator gamma;
  // All p+1 coefficients; entries of inactive predictors hold the
  // pseudo-prior draws.
  VectorXd beta;
  double beta0 = 0.0;
  VectorXd y_star;
  double delta = 1.0;
};

// Normal pseudo-prior for inactive slopes: full-model ML estimates and
// standard errors on the observed data (ridge stabilized).
struct PseudoPrior {
  VectorXd mean;
  VectorXd sd;

  static PseudoPrior FromData(const Dataset& data);
  // Log density of coefficient j (design column index, 1..p).
  double LogDensity(int column, double value) const;
};

struct MoveStats {
  long attempted = 0;
  long accepted = 0;
  double rate() const { return attempted == 0 ? 0.0 : static_cast<double>(accepted) / attempted; }
};

struct ChainDiagnostics {
  // Gamma updates where the odds were NaN or both configurations lacked a
  // Laplace value; gamma_j was retained.
  long retained_nonfinite_odds = 0;
  long retained_both_unusable = 0;
  // Coefficient moves skipped because the proposal fit failed.
  long beta_fit_skipped = 0;
  long beta0_fit_skipped = 0;
  // y* proposals rejected because the MLE at the proposal did not exist.
  long ystar_unusable = 0;
  // Non-finite acceptance ratios (move rejected).
  long nonfinite_ratios = 0;
};

struct ChainOutput {
  int p = 0;
  std::string method;
  // "delta" for PEP chains, "g" for g-prior chains.
  std::string scale_name = "delta";
  std::vector<ModelIndicator> gamma_draws;
  std::vector<double> scale_draws;
  std::vector<VectorXd> beta_draws;
  std::vector<double> beta0_draws;
  std::map<ModelIndicator, long> visits;
  MoveStats beta_moves;
  MoveStats beta0_moves;
  MoveStats ystar_moves;
  MoveStats scale_moves;
  ChainDiagnostics diagnostics;
};

// Success probability of the binomial imaginary-data proposal: the
// normalized product p0^{1/psi} p_gamma^{1/delta} against the failures.
double BinomialProposalProbability(double beta0, double eta, double psi, double delta);
// Mean of the Poisson imaginary-data proposal under the CR reference,
// exp(beta0/psi + eta/delta) clamped to [1e-12, 1e12].
double PoissonProposalMean(double beta0, double eta, double psi, double delta);

// Gibbs variable selection under the power-expected-posterior prior.
// The public step methods are exposed so tests can drive single moves.
class PepSampler {
 public:
  PepSampler(const Dataset& data, const SamplerConfig& config);

  const SamplerState& state() const { return state_; }
  // Replaces the state; recomputes derived quantities and drops caches.
  void SetState(const SamplerState& state);
  double psi() const { return psi_for(state_.delta); }
  const PseudoPrior& pseudo_prior() const { return pseudo_; }

  // log O_j for predictor j (0-based) at the current state.
  double GammaLogOdds(int j);

  void SweepGamma();
  void UpdateBeta();
  void UpdateInactive();
  void UpdateBeta0();
  void UpdateYStar();
  void UpdateDelta();
  // One full iteration in the fixed order above.
  void Step();
  // Runs the configured number of iterations from the initial state.
  ChainOutput Run();

  const ChainOutput& output() const { return out_; }

 private:
  double psi_for(double delta) const {
    return config_.reference == ReferenceMode::kCR ? 1.0 : delta;
  }
  VectorXd LinearPredictor(const ModelIndicator& gamma) const;
  double LogNullBaseline(double beta0) const;
  double LogActiveBaseline(const ModelIndicator& gamma, const VectorXd& eta) const;
  void Record();

  Dataset data_;
  SamplerConfig config_;
  PseudoPrior pseudo_;
  std::mt19937_64 rng_;
  SamplerState state_;
  VectorXd eta_;  // X_gamma beta_gamma at the current state
  LaplaceCache laplace_;
  Family stacked_family_;
  MatrixXd null_column_;
  ChainOutput out_;
};

// Gibbs variable selection under the g-prior family.
class GPriorSampler {
 public:
  GPriorSampler(const Dataset& data, const GPriorSamplerConfig& config);

  ModelIndicator gamma() const { return gamma_; }
  const VectorXd& beta() const { return beta_; }
  double g() const { return g_; }

  double GammaLogOdds(int j);
  void SweepGamma();
  void UpdateBeta();
  void UpdateInactive();
  void UpdateG();
  void Step();
  ChainOutput Run();

 private:
  struct ModelFit {
    bool ok = false;
    VectorXd mode;
    MatrixXd information;
    MatrixXd slope_precision;
    double log_det_precision = 0.0;
  };
  const ModelFit& FitFor(const ModelIndicator& gamma);
  double LogSlopePrior(const ModelIndicator& gamma, const VectorXd& beta, double g);
  double LogGPrior(double g, int p_gamma) const;
  void Record();

  Dataset data_;
  GPriorSamplerConfig config_;
  PseudoPrior pseudo_;
  std::mt19937_64 rng_;
  MatrixXd precision_;  // X~' W0 X~ over all slopes
  std::map<std::uint64_t, ModelFit> fits_;
  ModelIndicator gamma_;
  VectorXd beta_;
  double g_ = 1.0;
  VectorXd eta_;
  ChainOutput out_;
};

ChainOutput RunPepChain(const Dataset& data, const SamplerConfig& config);
ChainOutput RunGPriorChain(const Dataset& data, const GPriorSamplerConfig& config);

}  // namespace pepglm
