#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "pepglm/dataset.hpp"
#include "pepglm/sampler.hpp"
#include "pepglm/simulate.hpp"
#include "pepglm/summary.hpp"

namespace pepglm {

inline constexpr const char* kSummarySchema = "pepglm.summary/1";
inline constexpr const char* kReplicationSchema = "pepglm.replication/1";

// Reads a comma-separated file with a header row. Every column other than
// the response and trials columns becomes a covariate. Throws IoError with
// a specific message for a missing file, a missing column, a non-numeric
// or empty cell, a ragged row, or an empty dataset.
Dataset LoadCsv(const std::string& path, const std::string& family_name,
                const std::string& response_column,
                const std::optional<std::string>& trials_column = std::nullopt);
Dataset ReadCsv(std::istream& in, const std::string& family_name,
                const std::string& response_column,
                const std::optional<std::string>& trials_column = std::nullopt);

// Checks the shipped Pima fixture: 532 rows and the seven covariates
// npreg, glu, bp, skin, bmi, ped, age in that order. Throws IoError.
void VerifyPima(const Dataset& data);

// Writes raw covariates, response (and trials) with full precision; the
// response column is named `response_column`.
void WriteCsv(const Dataset& data, std::ostream& out, const std::string& response_column = "y",
              const std::string& trials_column = "trials");

struct RunInfo {
  std::string family;
  int n = 0;
  int iterations = 0;
  int burnin = 0;
  std::uint64_t seed = 0;
  std::string baseline;
  std::string model_prior;
};

// One summary record; see docs/output-format.md.
nlohmann::ordered_json SummaryRecord(const ChainOutput& chain, const PosteriorSummary& summary,
                                     const std::vector<std::string>& names, const RunInfo& info,
                                     int top_models = 10);

// Per-iteration trace: iteration index, gamma bitstring, scale.
void WriteTrace(const ChainOutput& chain, std::ostream& out);
// Per-predictor quantiles over the batch estimates.
void WriteBatchQuantiles(const PosteriorSummary& summary, const std::vector<std::string>& names,
                         std::ostream& out);

// One line per (replication, method) job.
nlohmann::ordered_json ReplicationRecordJson(const ReplicationReport& report,
                                             const ReplicationRecord& record);
// scenario,r,method,successes,completed,failures,success_rate
void WriteSuccessRows(const ReplicationReport& report, std::ostream& out, bool header);
// scenario,r,method,predictor,min,q25,median,q75,max
void WriteInclusionRows(const ReplicationReport& report, std::ostream& out, bool header);

}  // namespace pepglm
