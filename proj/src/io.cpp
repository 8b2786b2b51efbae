#include "pepglm/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "pepglm/error.hpp"

namespace pepglm {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double ParseCell(const std::string& cell, int row, const std::string& column) {
  if (cell.empty() || cell == "NA" || cell == "NaN") {
    throw IoError("missing value in row " + std::to_string(row) + ", column '" + column + "'");
  }
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw IoError("non-numeric value '" + cell + "' in row " + std::to_string(row) + ", column '" +
                  column + "'");
  }
  return v;
}

int FindColumn(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<int>(k);
  }
  throw IoError("column '" + name + "' not found in header");
}

nlohmann::ordered_json Moves(const MoveStats& m) {
  return {{"attempted", m.attempted}, {"accepted", m.accepted}, {"rate", m.rate()}};
}

}  // namespace

Dataset ReadCsv(std::istream& in, const std::string& family_name, const std::string& response_column,
                const std::optional<std::string>& trials_column) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = SplitLine(line);
  const int resp = FindColumn(header, response_column);
  const int trials = trials_column ? FindColumn(header, *trials_column) : -1;
  std::vector<int> covariate_cols;
  std::vector<std::string> names;
  for (int k = 0; k < static_cast<int>(header.size()); ++k) {
    if (k == resp || k == trials) continue;
    covariate_cols.push_back(k);
    names.push_back(header[k]);
  }

  std::vector<std::vector<double>> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw IoError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                    " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> values(header.size());
    for (std::size_t k = 0; k < header.size(); ++k) values[k] = ParseCell(cells[k], row, header[k]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw IoError("dataset has no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  MatrixXd cov(n, static_cast<Eigen::Index>(covariate_cols.size()));
  VectorXd y(n);
  VectorXd t;
  if (trials >= 0) t.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rows[i][resp];
    if (trials >= 0) t[i] = rows[i][trials];
    for (std::size_t k = 0; k < covariate_cols.size(); ++k) cov(i, k) = rows[i][covariate_cols[k]];
  }
  Family family = Family::FromName(family_name, t);
  return Dataset::FromCovariates(std::move(family), std::move(y), cov, std::move(names));
}

Dataset LoadCsv(const std::string& path, const std::string& family_name,
                const std::string& response_column, const std::optional<std::string>& trials_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadCsv(in, family_name, response_column, trials_column);
}

void VerifyPima(const Dataset& data) {
  const std::vector<std::string> expected{"npreg", "glu", "bp", "skin", "bmi", "ped", "age"};
  if (data.n() != 532) {
    throw IoError("Pima fixture should have 532 rows, found " + std::to_string(data.n()));
  }
  if (data.names != expected) throw IoError("Pima fixture columns differ from npreg,glu,bp,skin,bmi,ped,age");
}

void WriteCsv(const Dataset& data, std::ostream& out, const std::string& response_column,
              const std::string& trials_column) {
  const bool has_trials = data.family.trials().size() > 0;
  for (const std::string& name : data.names) out << name << ',';
  out << response_column;
  if (has_trials) out << ',' << trials_column;
  out << '\n';
  const MatrixXd raw = data.RawCovariates();
  out << std::setprecision(17);
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) out << raw(i, j) << ',';
    out << data.y[i];
    if (has_trials) out << ',' << data.family.Trials(i);
    out << '\n';
  }
}

nlohmann::ordered_json SummaryRecord(const ChainOutput& chain, const PosteriorSummary& summary,
                                     const std::vector<std::string>& names, const RunInfo& info,
                                     int top_models) {
  nlohmann::ordered_json rec;
  rec["schema"] = kSummarySchema;
  rec["method"] = chain.method;
  rec["family"] = info.family;
  rec["n"] = info.n;
  rec["p"] = summary.p;
  rec["iterations"] = info.iterations;
  rec["burnin"] = info.burnin;
  rec["seed"] = info.seed;
  rec["baseline"] = info.baseline;
  rec["model_prior"] = info.model_prior;
  rec["draws"] = summary.draws;
  rec["predictors"] = names;
  std::vector<double> incl(summary.inclusion.data(), summary.inclusion.data() + summary.p);
  rec["inclusion"] = incl;
  rec["map_model"] = {{"model", summary.map_model.ToString()},
                      {"visits", summary.map_visits},
                      {"probability", static_cast<double>(summary.map_visits) / summary.draws}};
  rec["mpm_model"] = summary.mpm_model.ToString();
  nlohmann::ordered_json top = nlohmann::ordered_json::array();
  for (int k = 0; k < static_cast<int>(summary.model_probs.size()) && k < top_models; ++k) {
    top.push_back({{"model", summary.model_probs[k].first.ToString()},
                   {"probability", summary.model_probs[k].second}});
  }
  rec["top_models"] = top;
  rec["scale"] = chain.scale_name;
  rec["shrinkage"] = {{"mean", summary.shrinkage.mean},
                      {"q025", summary.shrinkage.q025},
                      {"median", summary.shrinkage.median},
                      {"q975", summary.shrinkage.q975}};
  rec["acceptance"] = {{"beta", Moves(chain.beta_moves)},
                       {"beta0", Moves(chain.beta0_moves)},
                       {"ystar", Moves(chain.ystar_moves)},
                       {"scale", Moves(chain.scale_moves)}};
  const ChainDiagnostics& d = chain.diagnostics;
  rec["diagnostics"] = {{"retained_nonfinite_odds", d.retained_nonfinite_odds},
                        {"retained_both_unusable", d.retained_both_unusable},
                        {"beta_fit_skipped", d.beta_fit_skipped},
                        {"beta0_fit_skipped", d.beta0_fit_skipped},
                        {"ystar_unusable", d.ystar_unusable},
                        {"nonfinite_ratios", d.nonfinite_ratios}};
  rec["batch_size"] = summary.batch_size;
  rec["batches"] = summary.batch_estimates.rows();
  return rec;
}

void WriteTrace(const ChainOutput& chain, std::ostream& out) {
  out << "draw,gamma," << chain.scale_name << '\n';
  out << std::setprecision(17);
  for (std::size_t t = 0; t < chain.gamma_draws.size(); ++t) {
    out << t << ',' << chain.gamma_draws[t].ToString() << ','
        << (t < chain.scale_draws.size() ? chain.scale_draws[t] : 0.0) << '\n';
  }
}

void WriteBatchQuantiles(const PosteriorSummary& summary, const std::vector<std::string>& names,
                         std::ostream& out) {
  const MatrixXd q = BatchQuantiles(summary);
  out << "predictor,min,q25,median,q75,max\n";
  out << std::setprecision(10);
  for (int j = 0; j < summary.p; ++j) {
    out << names[j];
    for (int k = 0; k < 5; ++k) out << ',' << q(j, k);
    out << '\n';
  }
}

}  // namespace pepglm

namespace pepglm {

nlohmann::ordered_json ReplicationRecordJson(const ReplicationReport& report,
                                             const ReplicationRecord& record) {
  const ScenarioSpec& s = report.spec;
  nlohmann::ordered_json rec;
  rec["schema"] = kReplicationSchema;
  rec["study"] = s.study;
  rec["family"] = s.family;
  rec["scenario"] = s.scenario;
  rec["r"] = s.r;
  rec["n"] = s.n;
  rec["rep"] = record.rep;
  rec["method"] = record.method;
  rec["true_model"] = TrueModel(s).ToString();
  if (record.failed) {
    rec["failed"] = true;
    rec["error"] = record.error;
    return rec;
  }
  rec["failed"] = false;
  rec["map_model"] = record.map_model.ToString();
  rec["map_correct"] = record.map_correct;
  rec["inclusion"] = std::vector<double>(record.inclusion.data(),
                                         record.inclusion.data() + record.inclusion.size());
  return rec;
}

void WriteSuccessRows(const ReplicationReport& report, std::ostream& out, bool header) {
  if (header) out << "scenario,r,method,successes,completed,failures,success_rate\n";
  for (const std::string& m : report.methods) {
    const MethodAggregate& a = report.aggregate.at(m);
    out << report.spec.scenario << ',' << report.spec.r << ',' << m << ',' << a.successes << ','
        << a.completed << ',' << a.failures << ',' << a.success_rate() << '\n';
  }
}

void WriteInclusionRows(const ReplicationReport& report, std::ostream& out, bool header) {
  if (header) out << "scenario,r,method,predictor,min,q25,median,q75,max\n";
  for (const std::string& m : report.methods) {
    const MatrixXd& q = report.aggregate.at(m).inclusion_quantiles;
    for (Eigen::Index j = 0; j < q.rows(); ++j) {
      out << report.spec.scenario << ',' << report.spec.r << ',' << m << ",X" << j + 1;
      for (Eigen::Index k = 0; k < q.cols(); ++k) out << ',' << q(j, k);
      out << '\n';
    }
  }
}

}  // namespace pepglm
