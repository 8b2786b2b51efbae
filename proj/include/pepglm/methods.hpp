#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pepglm/dataset.hpp"
#include "pepglm/priors.hpp"
#include "pepglm/sampler.hpp"

namespace pepglm {

// One of the ten prior configurations compared in the studies.
struct MethodSpec {
  std::string name;
  bool is_pep = true;
  ReferenceMode reference = ReferenceMode::kCR;
  DeltaMode delta_mode = DeltaMode::kFixed;
  GPriorKind gprior = GPriorKind::kUnitInfo;
};

// Names: g-prior, hyper-g, hyper-g-n, mg-hyper-g, cr-pep,
// cr-pep-hyper-delta, cr-pep-hyper-delta-n, dr-pep, dr-pep-hyper-delta,
// dr-pep-hyper-delta-n. Throws ConfigError otherwise.
MethodSpec MethodFromName(std::string_view name);
const std::vector<std::string>& AllMethodNames();

struct RunSettings {
  int iterations = 41000;
  int burnin = 1000;
  std::uint64_t seed = 1;
  BaselineKind baseline = BaselineKind::kJeffreys;
  double a = 3.0;
  // Fixed delta (PEP) or g (unit-information); unset means n.
  std::optional<double> fixed_scale;
  ModelPriorKind model_prior = ModelPriorKind::kUniform;
  std::optional<ModelIndicator> fixed_model;
  bool record_beta = false;
};

SamplerConfig MakePepConfig(const MethodSpec& method, const Dataset& data, const RunSettings& s);
GPriorSamplerConfig MakeGPriorConfig(const MethodSpec& method, const Dataset& data,
                                     const RunSettings& s);

// Runs the chain for `method`; the output carries the method name.
ChainOutput RunMethod(const MethodSpec& method, const Dataset& data, const RunSettings& settings);

}  // namespace pepglm
