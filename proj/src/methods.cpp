#include "pepglm/methods.hpp"

#include "pepglm/error.hpp"

namespace pepglm {

const std::vector<std::string>& AllMethodNames() {
  static const std::vector<std::string> names = {
      "g-prior", "hyper-g", "hyper-g-n", "mg-hyper-g", "cr-pep", "cr-pep-hyper-delta",
      "cr-pep-hyper-delta-n", "dr-pep", "dr-pep-hyper-delta", "dr-pep-hyper-delta-n"};
  return names;
}

MethodSpec MethodFromName(std::string_view name) {
  MethodSpec m;
  m.name = std::string(name);
  if (name == "g-prior" || name == "hyper-g" || name == "hyper-g-n" || name == "mg-hyper-g") {
    m.is_pep = false;
    m.gprior = GPriorFromName(name);
    return m;
  }
  std::string_view rest;
  if (name.starts_with("cr-pep")) {
    m.reference = ReferenceMode::kCR;
    rest = name.substr(6);
  } else if (name.starts_with("dr-pep")) {
    m.reference = ReferenceMode::kDR;
    rest = name.substr(6);
  } else {
    throw ConfigError("unknown method '" + std::string(name) + "'");
  }
  if (rest.empty()) {
    m.delta_mode = DeltaMode::kFixed;
  } else if (rest == "-hyper-delta") {
    m.delta_mode = DeltaMode::kHyper;
  } else if (rest == "-hyper-delta-n") {
    m.delta_mode = DeltaMode::kHyperN;
  } else {
    throw ConfigError("unknown method '" + std::string(name) + "'");
  }
  return m;
}

SamplerConfig MakePepConfig(const MethodSpec& method, const Dataset& data, const RunSettings& s) {
  if (!method.is_pep) throw ConfigError("method " + method.name + " is not a PEP method");
  SamplerConfig c;
  c.iterations = s.iterations;
  c.burnin = s.burnin;
  c.seed = s.seed;
  c.reference = method.reference;
  c.delta.mode = method.delta_mode;
  c.delta.a = s.a;
  c.delta.n = data.n();
  c.delta.fixed_value = s.fixed_scale.value_or(0.0);
  c.baseline = s.baseline;
  c.model_prior = ModelPrior{s.model_prior, data.p()};
  c.fixed_model = s.fixed_model;
  c.record_beta = s.record_beta;
  return c;
}

GPriorSamplerConfig MakeGPriorConfig(const MethodSpec& method, const Dataset& data,
                                     const RunSettings& s) {
  if (method.is_pep) throw ConfigError("method " + method.name + " is not a g-prior method");
  GPriorSamplerConfig c;
  c.iterations = s.iterations;
  c.burnin = s.burnin;
  c.seed = s.seed;
  c.prior.kind = method.gprior;
  c.prior.a = s.a;
  c.prior.n = data.n();
  c.prior.g = s.fixed_scale.value_or(0.0);
  c.model_prior = ModelPrior{s.model_prior, data.p()};
  c.fixed_model = s.fixed_model;
  c.record_beta = s.record_beta;
  return c;
}

ChainOutput RunMethod(const MethodSpec& method, const Dataset& data, const RunSettings& settings) {
  ChainOutput out = method.is_pep ? RunPepChain(data, MakePepConfig(method, data, settings))
                                  : RunGPriorChain(data, MakeGPriorConfig(method, data, settings));
  out.method = method.name;
  return out;
}

}  // namespace pepglm
