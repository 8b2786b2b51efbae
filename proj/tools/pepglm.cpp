#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pepglm/dataset.hpp"
#include "pepglm/error.hpp"
#include "pepglm/io.hpp"
#include "pepglm/methods.hpp"
#include "pepglm/oracle.hpp"
#include "pepglm/simulate.hpp"
#include "pepglm/summary.hpp"

using namespace pepglm;

namespace {

struct DataFlags {
  std::string path;
  std::string family = "binomial";
  std::string response;
  std::string trials;
};

struct ChainFlags {
  std::string method = "cr-pep";
  int iterations = 41000;
  int burnin = 1000;
  std::uint64_t seed = 1;
  std::string delta;
  std::string reference;
  double a = 3.0;
  double scale = 0.0;
  std::string baseline = "jeffreys";
  std::string model_prior = "uniform";
};

void AddDataFlags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.path, "CSV file with a header row")->required();
  cmd->add_option("--family", f.family, "binomial | poisson | gaussian")->capture_default_str();
  cmd->add_option("--response", f.response, "response column (default: last column)");
  cmd->add_option("--trials", f.trials, "binomial trials column (default: all 1)");
}

void AddChainFlags(CLI::App* cmd, ChainFlags& f) {
  cmd->add_option("--method", f.method, "prior configuration")->capture_default_str();
  cmd->add_option("--iterations", f.iterations)->capture_default_str();
  cmd->add_option("--burnin", f.burnin)->capture_default_str();
  cmd->add_option("--seed", f.seed)->capture_default_str();
  cmd->add_option("--delta", f.delta, "PEP power parameter: fixed | hyper | hyper-n");
  cmd->add_option("--reference", f.reference, "PEP reference: cr | dr");
  cmd->add_option("--a", f.a, "hyper-prior shape")->capture_default_str();
  cmd->add_option("--scale", f.scale, "fixed delta or g (default n)");
  cmd->add_option("--baseline", f.baseline, "flat | jeffreys")->capture_default_str();
  cmd->add_option("--model-prior", f.model_prior, "uniform | betabinomial")->capture_default_str();
}

std::string ResponseColumn(const DataFlags& f) {
  if (!f.response.empty()) return f.response;
  std::ifstream in(f.path);
  if (!in) throw IoError("cannot open '" + f.path + "'");
  std::string header;
  std::getline(in, header);
  const auto comma = header.find_last_of(',');
  std::string last = comma == std::string::npos ? header : header.substr(comma + 1);
  while (!last.empty() && (last.back() == '\r' || last.back() == ' ')) last.pop_back();
  return last;
}

Dataset Load(const DataFlags& f) {
  std::optional<std::string> trials;
  if (!f.trials.empty()) trials = f.trials;
  return LoadCsv(f.path, f.family, ResponseColumn(f), trials);
}

// --method names a configuration; --reference and --delta adjust a PEP one.
MethodSpec ResolveMethod(const ChainFlags& f) {
  MethodSpec m = MethodFromName(f.method);
  if (f.reference.empty() && f.delta.empty()) return m;
  if (!m.is_pep) throw ConfigError("--reference and --delta apply to PEP methods only");
  if (!f.reference.empty()) m.reference = ReferenceFromName(f.reference);
  if (!f.delta.empty()) m.delta_mode = DeltaModeFromName(f.delta);
  std::string name = m.reference == ReferenceMode::kCR ? "cr-pep" : "dr-pep";
  if (m.delta_mode == DeltaMode::kHyper) name += "-hyper-delta";
  if (m.delta_mode == DeltaMode::kHyperN) name += "-hyper-delta-n";
  return MethodFromName(name);
}

RunSettings Settings(const ChainFlags& f) {
  RunSettings s;
  s.iterations = f.iterations;
  s.burnin = f.burnin;
  s.seed = f.seed;
  s.baseline = BaselineFromName(f.baseline);
  s.a = f.a;
  if (f.scale > 0.0) s.fixed_scale = f.scale;
  s.model_prior = ModelPriorFromName(f.model_prior);
  return s;
}

RunInfo Info(const Dataset& data, const RunSettings& s) {
  RunInfo info;
  info.family = std::string(data.family.name());
  info.n = data.n();
  info.iterations = s.iterations;
  info.burnin = s.burnin;
  info.seed = s.seed;
  info.baseline = std::string(BaselineName(s.baseline));
  info.model_prior = std::string(ModelPriorName(s.model_prior));
  return info;
}

// Writes to `path`, or stdout when empty.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot write '" + path + "'");
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string Sibling(const std::string& out, const std::string& suffix) {
  if (out.empty() || out == "-") throw ConfigError("--emit " + suffix + " needs --out");
  std::string base = out;
  const auto dot = base.rfind('.');
  if (dot != std::string::npos && base.find('/', dot) == std::string::npos) base = base.substr(0, dot);
  return base + suffix;
}

int RunSelect(const DataFlags& df, const ChainFlags& cf, const std::vector<std::string>& emit,
              const std::string& out, int batch_size) {
  const Dataset data = Load(df);
  const MethodSpec method = ResolveMethod(cf);
  const RunSettings s = Settings(cf);
  const ChainOutput chain = RunMethod(method, data, s);
  const PosteriorSummary summary = Summarize(chain, batch_size);
  for (const std::string& e : emit) {
    if (e == "summary") {
      Sink sink(out);
      sink.out() << SummaryRecord(chain, summary, data.names, Info(data, s)).dump() << '\n';
    } else if (e == "traces") {
      std::ofstream f(Sibling(out, ".trace.csv"));
      WriteTrace(chain, f);
    } else if (e == "boxplot-data") {
      std::ofstream f(Sibling(out, ".batches.csv"));
      WriteBatchQuantiles(summary, data.names, f);
    } else {
      throw ConfigError("unknown --emit value '" + e + "'");
    }
  }
  return 0;
}

struct SimFlags {
  int study = 1;
  std::string family = "logistic";
  std::vector<std::string> scenarios{"all"};
  std::vector<double> r{0.0, 0.75};
  std::vector<std::string> methods{"all"};
  int replications = 20;
  int iterations = 11000;
  int burnin = 1000;
  std::uint64_t seed = 2024;
  int threads = 0;
  bool full_scale = false;
  std::string out;
};

int RunSimulate(SimFlags f) {
  if (f.family == "binomial") f.family = "logistic";
  if (f.full_scale) {
    f.replications = 100;
    f.iterations = 41000;
  }
  std::vector<std::string> scenarios = f.scenarios;
  if (scenarios.size() == 1 && scenarios[0] == "all") {
    scenarios = f.study == 1 ? std::vector<std::string>{"null", "sparse", "medium", "full"}
                             : std::vector<std::string>{"null", "sparse", "dense"};
  }
  std::vector<std::string> methods = f.methods;
  if (methods.size() == 1 && methods[0] == "all") methods = AllMethodNames();
  for (const std::string& m : methods) MethodFromName(m);

  RunSettings settings;
  settings.iterations = f.iterations;
  settings.burnin = f.burnin;

  Sink records(f.out.empty() ? "" : f.out);
  std::unique_ptr<std::ofstream> success, inclusion;
  if (!f.out.empty() && f.out != "-") {
    success = std::make_unique<std::ofstream>(Sibling(f.out, ".success.csv"));
    inclusion = std::make_unique<std::ofstream>(Sibling(f.out, ".inclusion.csv"));
  }
  bool first = true;
  for (const std::string& scenario : scenarios) {
    for (double r : f.r) {
      ScenarioSpec spec = MakeScenario(f.study, f.family, scenario, f.study == 1 ? r : 0.0);
      spec.replications = f.replications;
      spec.seed = f.seed;
      const ReplicationReport report = ReplicateCompare(spec, methods, settings, f.threads);
      for (const ReplicationRecord& rec : report.records) {
        records.out() << ReplicationRecordJson(report, rec).dump() << '\n';
      }
      if (success) {
        WriteSuccessRows(report, *success, first);
        WriteInclusionRows(report, *inclusion, first);
      } else {
        WriteSuccessRows(report, std::cerr, first);
      }
      for (const auto& [m, agg] : report.aggregate) {
        if (agg.failures > 0) {
          std::cerr << "warning: " << agg.failures << " failed replications for " << m << " ("
                    << scenario << ", r=" << r << ")\n";
        }
      }
      first = false;
      if (f.study == 2) break;
    }
  }
  return 0;
}

int RunPredict(const DataFlags& df, const ChainFlags& cf, std::uint64_t split_seed,
               const std::string& rule_name, const std::string& out) {
  const Dataset data = Load(df);
  const auto [train, test] = SplitHalf(data, split_seed);
  const MethodSpec method = ResolveMethod(cf);
  RunSettings s = Settings(cf);
  const ChainOutput chain = RunMethod(method, train, s);
  const PosteriorSummary summary = Summarize(chain);

  s.fixed_model = summary.map_model;
  s.record_beta = true;
  const ChainOutput frozen = RunMethod(method, train, s);
  ClassificationRule rule;
  if (rule_name == "simulate") rule = ClassificationRule::kSimulate;
  else if (rule_name == "threshold") rule = ClassificationRule::kThreshold;
  else throw ConfigError("unknown --rule '" + rule_name + "'");
  const PredictiveRates rates = PredictiveEval(frozen.beta_draws, summary.map_model, test, rule, cf.seed);

  nlohmann::ordered_json rec;
  rec["schema"] = "pepglm.predict/1";
  rec["method"] = method.name;
  rec["split_seed"] = split_seed;
  rec["train_n"] = train.n();
  rec["test_n"] = test.n();
  rec["map_model"] = summary.map_model.ToString();
  std::vector<std::string> terms;
  for (int j : summary.map_model.Columns()) {
    if (j > 0) terms.push_back(data.names[j - 1]);
  }
  rec["map_terms"] = terms;
  rec["rule"] = rule_name;
  rec["false_negative_pct"] = rates.false_negative_pct;
  rec["false_positive_pct"] = rates.false_positive_pct;
  rec["draws"] = rates.draws_used;
  Sink sink(out);
  sink.out() << rec.dump() << '\n';
  return 0;
}

int RunOracleCheck(const DataFlags& df, const ChainFlags& cf, bool exact, double max_diff,
                   const std::string& out) {
  const Dataset data = Load(df);
  const MethodSpec method = ResolveMethod(cf);
  const RunSettings s = Settings(cf);

  OracleSetup setup;
  setup.pep = method.is_pep;
  setup.reference = method.reference;
  setup.delta.mode = method.delta_mode;
  setup.delta.a = s.a;
  setup.delta.n = data.n();
  setup.delta.fixed_value = s.fixed_scale.value_or(0.0);
  setup.baseline = s.baseline;
  setup.model_prior.kind = s.model_prior;
  setup.model_prior.p = data.p();
  setup.gprior.kind = method.gprior;
  setup.gprior.g = s.fixed_scale.value_or(data.n());
  setup.gprior.a = s.a;
  setup.gprior.n = data.n();
  setup.exact_normalizer = exact;
  const OracleResult oracle = BruteForceModelPosterior(data, setup);

  const ChainOutput chain = RunMethod(method, data, s);
  const PosteriorSummary summary = Summarize(chain);
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < oracle.models.size(); ++k) {
    double freq = 0.0;
    for (const auto& [m, pr] : summary.model_probs) {
      if (m == oracle.models[k]) freq = pr;
    }
    worst = std::max(worst, std::abs(freq - oracle.probability[k]));
    models.push_back({{"model", oracle.models[k].ToString()},
                      {"oracle", oracle.probability[k]},
                      {"sampler", freq}});
  }
  nlohmann::ordered_json rec;
  rec["schema"] = "pepglm.oracle/1";
  rec["method"] = method.name;
  rec["iterations"] = s.iterations;
  rec["models"] = models;
  rec["max_abs_diff"] = worst;
  Sink sink(out);
  sink.out() << rec.dump() << '\n';
  return max_diff > 0.0 && worst > max_diff ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection for generalized linear models"};
  app.require_subcommand(1);

  DataFlags sel_data;
  ChainFlags sel_chain;
  std::vector<std::string> emit{"summary"};
  std::string sel_out;
  int batch_size = 1000;
  CLI::App* select = app.add_subcommand("select", "run one chain and summarize it");
  AddDataFlags(select, sel_data);
  AddChainFlags(select, sel_chain);
  select->add_option("--emit", emit, "summary, traces, boxplot-data")->delimiter(',')->capture_default_str();
  select->add_option("--out", sel_out, "summary path (default stdout)");
  select->add_option("--batch-size", batch_size)->capture_default_str();

  SimFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "replicated comparison on synthetic data");
  simulate->add_option("--study", sim.study)->capture_default_str();
  simulate->add_option("--family", sim.family, "logistic | poisson")->capture_default_str();
  simulate->add_option("--scenario", sim.scenarios, "scenario names or 'all'")->delimiter(',');
  simulate->add_option("--r", sim.r, "predictor correlations")->delimiter(',');
  simulate->add_option("--methods,--method", sim.methods, "method names or 'all'")->delimiter(',');
  simulate->add_option("--replications", sim.replications)->capture_default_str();
  simulate->add_option("--iterations", sim.iterations)->capture_default_str();
  simulate->add_option("--burnin", sim.burnin)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--threads", sim.threads, "0 = all cores")->capture_default_str();
  simulate->add_flag("--full-scale", sim.full_scale, "100 replications of 41000 iterations");
  simulate->add_option("--out", sim.out, "JSON-lines path; tables go next to it");

  DataFlags pred_data;
  ChainFlags pred_chain;
  std::uint64_t split_seed = 1;
  std::string rule = "simulate";
  std::string pred_out;
  CLI::App* predict = app.add_subcommand("predict", "half-split predictive check of the MAP model");
  AddDataFlags(predict, pred_data);
  AddChainFlags(predict, pred_chain);
  predict->add_option("--split-seed", split_seed)->capture_default_str();
  predict->add_option("--rule", rule, "simulate | threshold")->capture_default_str();
  predict->add_option("--out", pred_out);

  DataFlags or_data;
  ChainFlags or_chain;
  bool exact = false;
  double max_diff = 0.0;
  std::string or_out;
  CLI::App* oracle = app.add_subcommand("oracle-check", "compare the sampler with exact enumeration");
  or_chain.baseline = "flat";
  AddDataFlags(oracle, or_data);
  AddChainFlags(oracle, or_chain);
  oracle->add_flag("--exact-normalizer", exact);
  oracle->add_option("--max-diff", max_diff, "exit 3 when exceeded");
  oracle->add_option("--out", or_out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*select) return RunSelect(sel_data, sel_chain, emit, sel_out, batch_size);
    if (*simulate) return RunSimulate(sim);
    if (*predict) return RunPredict(pred_data, pred_chain, split_seed, rule, pred_out);
    if (*oracle) return RunOracleCheck(or_data, or_chain, exact, max_diff, or_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
