#include "pepglm/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "pepglm/error.hpp"
#include "pepglm/summary.hpp"

namespace pepglm {
namespace {

VectorXd Coefficients(std::initializer_list<double> v) {
  VectorXd out(v.size());
  int k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

VectorXd SimulateResponse(std::mt19937_64& rng, const std::string& family, const VectorXd& eta) {
  VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (family == "logistic") {
      y[i] = std::bernoulli_distribution(1.0 / (1.0 + std::exp(-eta[i])))(rng) ? 1.0 : 0.0;
    } else {
      y[i] = static_cast<double>(std::poisson_distribution<long>(std::exp(eta[i]))(rng));
    }
  }
  return y;
}

Family FamilyFor(const std::string& family) {
  if (family == "logistic") return Family::Binomial();
  if (family == "poisson") return Family::Poisson();
  throw ConfigError("unknown study family '" + family + "'");
}

}  // namespace

ScenarioSpec MakeScenario(int study, const std::string& family, const std::string& scenario, double r) {
  ScenarioSpec s;
  s.study = study;
  s.family = family;
  s.scenario = scenario;
  s.r = r;
  if (study == 1) {
    s.n = 100;
    s.model_prior = ModelPriorKind::kUniform;
    if (family == "logistic") {
      if (scenario == "null") s.true_beta = Coefficients({0.1, 0, 0, 0, 0, 0});
      else if (scenario == "sparse") s.true_beta = Coefficients({0.1, 0.7, 0, 0, 0, 0});
      else if (scenario == "medium") s.true_beta = Coefficients({0.1, 1.6, 0.8, -1.5, 0, 0});
      else if (scenario == "full") s.true_beta = Coefficients({0.1, 1.75, 1.5, -1.1, -1.4, 0.5});
    } else if (family == "poisson") {
      if (scenario == "null") s.true_beta = Coefficients({-0.3, 0, 0, 0});
      else if (scenario == "sparse") s.true_beta = Coefficients({-0.3, 0.3, 0, 0});
      else if (scenario == "medium") s.true_beta = Coefficients({-0.3, 0.3, 0.2, 0});
      else if (scenario == "full") s.true_beta = Coefficients({-0.3, 0.3, 0.2, -0.15});
    } else {
      throw ConfigError("unknown study family '" + family + "'");
    }
  } else if (study == 2) {
    if (family != "logistic") throw ConfigError("study 2 is logistic only");
    s.n = 200;
    s.model_prior = ModelPriorKind::kBetaBinomial;
    if (scenario == "null") s.true_beta = Coefficients({0.1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    else if (scenario == "sparse") s.true_beta = Coefficients({0.1, 0, 0, -0.9, 0, 0, 0, 1.2, 0, 0, 0.4});
    else if (scenario == "dense") s.true_beta = Coefficients({0.1, 0.6, 0, -0.9, 0, 1, 0.9, 1.2, -1.2, -0.5, 0});
  } else {
    throw ConfigError("study must be 1 or 2");
  }
  if (s.true_beta.size() == 0) {
    throw ConfigError("unknown scenario '" + scenario + "' for study " + std::to_string(study) + " " + family);
  }
  if (!(r >= 0.0 && r < 1.0)) throw ConfigError("correlation r must lie in [0, 1)");
  return s;
}

ModelIndicator TrueModel(const ScenarioSpec& spec) {
  const int p = static_cast<int>(spec.true_beta.size()) - 1;
  ModelIndicator m(p);
  for (int j = 0; j < p; ++j) m.Set(j, spec.true_beta[j + 1] != 0.0);
  return m;
}

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t ReplicationSeed(const ScenarioSpec& spec, int rep) {
  return MixSeed(spec.seed + static_cast<std::uint64_t>(rep));
}

Dataset GenStudy1(const ScenarioSpec& spec, int rep) {
  if (spec.study != 1) throw ConfigError("GenStudy1 needs a study-1 scenario");
  if (!(spec.r >= 0.0 && spec.r < 1.0)) throw ConfigError("correlation r must lie in [0, 1)");
  const int p = static_cast<int>(spec.true_beta.size()) - 1;
  MatrixXd R(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) R(i, j) = std::pow(spec.r, std::abs(i - j));
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(R);
  const MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().transpose();
  std::mt19937_64 rng(ReplicationSeed(spec, rep));
  std::normal_distribution<double> z;
  MatrixXd Z(spec.n, p);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < p; ++j) Z(i, j) = z(rng);
  }
  const MatrixXd X = Z * root;
  const VectorXd eta = (X * spec.true_beta.tail(p)).array() + spec.true_beta[0];
  VectorXd y = SimulateResponse(rng, spec.family, eta);
  return Dataset::FromCovariates(FamilyFor(spec.family), std::move(y), X);
}

Dataset GenStudy2(const ScenarioSpec& spec, int rep) {
  if (spec.study != 2) throw ConfigError("GenStudy2 needs a study-2 scenario");
  std::mt19937_64 rng(ReplicationSeed(spec, rep));
  std::normal_distribution<double> z;
  MatrixXd X(spec.n, 10);
  const double w[5] = {0.3, 0.5, 0.7, 0.9, 1.1};
  for (int i = 0; i < spec.n; ++i) {
    double mean = 0.0;
    for (int j = 0; j < 5; ++j) {
      X(i, j) = z(rng);
      mean += w[j] * X(i, j);
    }
    for (int j = 5; j < 10; ++j) X(i, j) = mean + z(rng);
  }
  const VectorXd eta = (X * spec.true_beta.tail(10)).array() + spec.true_beta[0];
  VectorXd y = SimulateResponse(rng, spec.family, eta);
  return Dataset::FromCovariates(Family::Binomial(), std::move(y), X);
}

Dataset Generate(const ScenarioSpec& spec, int rep) {
  return spec.study == 1 ? GenStudy1(spec, rep) : GenStudy2(spec, rep);
}

ReplicationReport ReplicateCompare(const ScenarioSpec& spec, const std::vector<std::string>& methods,
                                   const RunSettings& settings, int threads) {
  std::vector<MethodSpec> parsed;
  for (const std::string& m : methods) parsed.push_back(MethodFromName(m));
  if (spec.replications < 1) throw ConfigError("replications must be positive");

  ReplicationReport report;
  report.spec = spec;
  report.methods = methods;
  const ModelIndicator truth = TrueModel(spec);
  const int jobs = spec.replications * static_cast<int>(parsed.size());
  report.records.resize(jobs);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int job = next++; job < jobs; job = next++) {
      const int rep = job / static_cast<int>(parsed.size());
      const MethodSpec& method = parsed[job % parsed.size()];
      ReplicationRecord& rec = report.records[job];
      rec.rep = rep;
      rec.method = method.name;
      try {
        const Dataset data = Generate(spec, rep);
        RunSettings s = settings;
        s.model_prior = spec.model_prior;
        s.seed = MixSeed(ReplicationSeed(spec, rep) ^ 0x5EEDull);
        const ChainOutput chain = RunMethod(method, data, s);
        const PosteriorSummary summary = Summarize(chain, std::max(1, settings.iterations - settings.burnin));
        rec.map_model = summary.map_model;
        rec.map_correct = summary.map_model == truth;
        rec.inclusion = summary.inclusion;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const int p = truth.p();
  for (const std::string& m : methods) {
    MethodAggregate agg;
    std::vector<std::vector<double>> incl(p);
    for (const ReplicationRecord& rec : report.records) {
      if (rec.method != m) continue;
      if (rec.failed) {
        ++agg.failures;
        continue;
      }
      ++agg.completed;
      if (rec.map_correct) ++agg.successes;
      for (int j = 0; j < p; ++j) incl[j].push_back(rec.inclusion[j]);
    }
    agg.inclusion_quantiles = MatrixXd::Zero(p, 5);
    if (agg.completed > 0) {
      const double probs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
      for (int j = 0; j < p; ++j) {
        for (int k = 0; k < 5; ++k) agg.inclusion_quantiles(j, k) = Quantile(incl[j], probs[k]);
      }
    }
    report.aggregate[m] = agg;
  }
  return report;
}

}  // namespace pepglm
