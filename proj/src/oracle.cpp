#include "pepglm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "pepglm/error.hpp"
#include "pepglm/laplace.hpp"

namespace pepglm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<ModelIndicator> AllModels(int p) {
  std::vector<ModelIndicator> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << p); ++b) out.emplace_back(p, b);
  return out;
}

double LogJeffreys(const Family& fam, const MatrixXd& X, const VectorXd& beta) {
  const VectorXd w = VarianceWeights(fam, X * beta);
  const MatrixXd Xw = X.array().colwise() * w.array().sqrt();
  Eigen::LLT<MatrixXd> llt(Xw.transpose() * Xw);
  if (llt.info() != Eigen::Success) return kNegInf;
  return llt.matrixLLT().diagonal().array().log().sum();
}

// Scale mapped from u in (0,1) so that u is uniform under the hyper prior.
double ScaleFromUniform(DeltaMode mode, double a, int n, double u) {
  const double t = std::pow(u, -1.0 / (0.5 * a - 1.0)) - 1.0;
  return mode == DeltaMode::kHyperN ? n * t : t;
}

// Integrate F(scale) against the hyper prior: sum_k w_k F(scale(u_k)).
double LogMixOverScale(DeltaMode mode, double a, int n, const std::function<double(double)>& log_f) {
  using Rule = boost::math::quadrature::gauss<double, 40>;
  std::vector<double> terms;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  // Rule nodes are the non-negative half on [-1, 1]; map to (0, 1).
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    for (int sign : {1, -1}) {
      if (k == 0 && sign == -1 && abscissa[0] == 0.0) continue;
      const double u = 0.5 * (1.0 + sign * abscissa[k]);
      terms.push_back(std::log(0.5 * weights[k]) + log_f(ScaleFromUniform(mode, a, n, u)));
    }
  }
  return LogSumExp(terms);
}

OracleResult Normalize(std::vector<ModelIndicator> models, std::vector<double> log_ev,
                       const ModelPrior& mp) {
  OracleResult r;
  r.models = std::move(models);
  r.log_evidence = log_ev;
  std::vector<double> post(r.models.size());
  for (std::size_t k = 0; k < r.models.size(); ++k) post[k] = log_ev[k] + LogModelPrior(mp, r.models[k]);
  const double lse = LogSumExp(post);
  for (double& v : post) v = std::exp(v - lse);
  r.probability = std::move(post);
  return r;
}

OracleResult GaussianOracle(const Dataset& data, const OracleSetup& setup) {
  const auto models = AllModels(data.p());
  std::vector<double> log_ev;
  for (const ModelIndicator& g : models) {
    const MatrixXd Xg = SelectColumns(data.X, g.Columns());
    double value;
    if (setup.pep) {
      const bool cr = setup.reference == ReferenceMode::kCR;
      if (!setup.delta.IsRandom()) {
        const double delta = setup.delta.FixedValue();
        value = GaussianLogEvidence(data.y, Xg, delta + (cr ? 1.0 : delta));
      } else {
        if (!cr) throw ConfigError("random delta with the DR reference is improper for the gaussian family");
        value = LogMixOverScale(setup.delta.mode, setup.delta.a, data.n(),
                                [&](double d) { return GaussianLogEvidence(data.y, Xg, d + 1.0); });
      }
    } else {
      switch (setup.gprior.kind) {
        case GPriorKind::kUnitInfo:
          value = GaussianLogEvidence(data.y, Xg, setup.gprior.FixedG());
          break;
        case GPriorKind::kHyperG:
        case GPriorKind::kHyperGN: {
          const DeltaMode mode = setup.gprior.kind == GPriorKind::kHyperG ? DeltaMode::kHyper : DeltaMode::kHyperN;
          value = LogMixOverScale(mode, setup.gprior.a, data.n(),
                                  [&](double g) { return GaussianLogEvidence(data.y, Xg, g); });
          break;
        }
        default:
          throw ConfigError("oracle does not support the MG hyper-g prior");
      }
    }
    log_ev.push_back(value);
  }
  return Normalize(models, log_ev, setup.model_prior);
}

// log int f(y|b) N(b~; 0, g P^{-1}) db, flat intercept.
double BinomialGPriorEvidence(const Dataset& data, const ModelIndicator& g, double gval, double tol) {
  const std::vector<int> cols = g.Columns();
  const MatrixXd Xg = SelectColumns(data.X, cols);
  const VectorXd w0 = NullModelWeights(data.family, data.y);
  const MatrixXd Xt = Xg.rightCols(Xg.cols() - 1);
  const MatrixXd P = Xt.transpose() * w0.asDiagonal() * Xt;
  auto log_f = [&](const VectorXd& b) {
    const double prior = Xt.cols() > 0 ? LogGPriorDensityFromPrecision(P, b.tail(b.size() - 1), gval) : 0.0;
    return LogLikelihoodAt(data.family, data.y, Xg * b) + prior;
  };
  FitOptions opts;
  opts.ridge = 1e-8;
  const FitResult fit = FitIrls(data.family, data.y, Xg, opts);
  MatrixXd prec = fit.information;
  prec.bottomRightCorner(Xt.cols(), Xt.cols()) += P / gval;
  return LogIntegrate(log_f, fit.beta, prec, tol);
}

OracleResult BinomialOracle(const Dataset& data, const OracleSetup& setup) {
  const Family& fam = data.family;
  const int n = data.n();
  if (!fam.HasUnitTrials()) throw ConfigError("binomial oracle needs unit trials");
  const auto models = AllModels(data.p());

  if (!setup.pep) {
    std::vector<double> log_ev;
    for (const ModelIndicator& g : models) {
      if (setup.gprior.kind == GPriorKind::kUnitInfo) {
        log_ev.push_back(BinomialGPriorEvidence(data, g, setup.gprior.FixedG(), setup.tolerance));
      } else if (setup.gprior.kind == GPriorKind::kMgHyperG) {
        throw ConfigError("oracle does not support the MG hyper-g prior");
      } else {
        const DeltaMode mode = setup.gprior.kind == GPriorKind::kHyperG ? DeltaMode::kHyper : DeltaMode::kHyperN;
        log_ev.push_back(LogMixOverScale(mode, setup.gprior.a, n,
                                         [&](double gv) { return BinomialGPriorEvidence(data, g, gv, setup.tolerance); }));
      }
    }
    return Normalize(models, log_ev, setup.model_prior);
  }

  if (n > 14) throw ConfigError("binomial oracle enumerates y*; n must be at most 14");
  const bool flat = setup.baseline == BaselineKind::kFlat;
  if (flat && data.p() > 1) throw ConfigError("flat-baseline binomial oracle supports p <= 1");
  if (setup.exact_normalizer && !flat) throw ConfigError("exact normalizer needs the flat baseline");
  for (const ModelIndicator& g : models) {
    if (IsSeparable(data.y, SelectColumns(data.X, g.Columns()))) {
      throw ConfigError("observed response is separable; evidence is not finite");
    }
  }

  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<VectorXd> ystars(total, VectorXd(n));
  for (std::uint64_t m = 0; m < total; ++m) {
    for (int i = 0; i < n; ++i) ystars[m][i] = static_cast<double>((m >> i) & 1u);
  }
  std::vector<MatrixXd> designs;
  std::vector<std::vector<bool>> separable(models.size(), std::vector<bool>(total));
  for (std::size_t k = 0; k < models.size(); ++k) {
    designs.push_back(SelectColumns(data.X, models[k].Columns()));
    if (flat) {
      for (std::uint64_t m = 0; m < total; ++m) separable[k][m] = IsSeparable(ystars[m], designs[k]);
    }
  }
  const MatrixXd ones = MatrixXd::Ones(n, 1);

  // log p(y | gamma, delta) for every model.
  auto evidence_at = [&](double delta) {
    const double psi = setup.reference == ReferenceMode::kCR ? 1.0 : delta;
    // Reference factor depends on y* through its sum only.
    std::map<int, double> reference;
    auto reference_for = [&](const VectorXd& ys) {
      const int s = static_cast<int>(ys.sum());
      auto it = reference.find(s);
      if (it != reference.end()) return it->second;
      auto log_f = [&](const VectorXd& b) {
        double v = LogLikelihoodAt(fam, ys, ones * b) / psi;
        if (!flat) v += 0.5 * std::log(n * fam.Variance(b[0], 1.0));
        return v;
      };
      const double p_hat = std::clamp((s + 0.5) / (n + 1.0), 1e-3, 1 - 1e-3);
      VectorXd c(1);
      c[0] = std::log(p_hat / (1 - p_hat));
      MatrixXd prec(1, 1);
      prec(0, 0) = n * p_hat * (1 - p_hat) / psi;
      const double v = LogIntegrate(log_f, c, prec, setup.tolerance);
      reference.emplace(s, v);
      return v;
    };

    std::vector<double> out;
    for (std::size_t k = 0; k < models.size(); ++k) {
      const MatrixXd& Xg = designs[k];
      const int d = static_cast<int>(Xg.cols());
      MatrixXd X_all(2 * n, d);
      X_all << Xg, Xg;
      VectorXd w_all(2 * n);
      w_all << VectorXd::Ones(n), VectorXd::Constant(n, 1.0 / delta);
      std::vector<double> terms;
      for (std::uint64_t m = 0; m < total; ++m) {
        if (flat && separable[k][m]) continue;
        const VectorXd& ys = ystars[m];
        auto log_num = [&](const VectorXd& b) {
          const VectorXd eta = Xg * b;
          double v = LogLikelihoodAt(fam, data.y, eta) + LogLikelihoodAt(fam, ys, eta) / delta;
          if (!flat) v += LogJeffreys(fam, Xg, b);
          return v;
        };
        VectorXd y_all(2 * n);
        y_all << data.y, ys;
        FitOptions opts;
        opts.ridge = 1e-8;
        const FitResult joint = FitIrls(fam.Stacked(2), y_all, X_all, w_all, opts);
        const double numerator = LogIntegrate(log_num, joint.beta, joint.information, setup.tolerance);
        double normalizer;
        if (setup.exact_normalizer) {
          const FitResult own = FitIrls(fam, ys, Xg, opts);
          auto log_m = [&](const VectorXd& b) { return LogLikelihoodAt(fam, ys, Xg * b) / delta; };
          normalizer = LogIntegrate(log_m, own.beta, own.information / delta, setup.tolerance);
        } else {
          normalizer = LaplaceLogMarginal(ComputeLaplaceTerms(fam, ys, Xg, setup.baseline), delta);
        }
        terms.push_back(numerator - normalizer + reference_for(ys));
      }
      out.push_back(LogSumExp(terms));
    }
    return out;
  };

  std::vector<double> log_ev;
  if (!setup.delta.IsRandom()) {
    log_ev = evidence_at(setup.delta.FixedValue());
  } else {
    // Mix each model's evidence over delta with shared nodes.
    std::vector<std::vector<double>> per_node;
    std::vector<double> log_w;
    using Rule = boost::math::quadrature::gauss<double, 20>;
    for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
      for (int sign : {1, -1}) {
        const double u = 0.5 * (1.0 + sign * Rule::abscissa()[k]);
        per_node.push_back(evidence_at(ScaleFromUniform(setup.delta.mode, setup.delta.a, n, u)));
        log_w.push_back(std::log(0.5 * Rule::weights()[k]));
      }
    }
    for (std::size_t k = 0; k < models.size(); ++k) {
      std::vector<double> terms;
      for (std::size_t q = 0; q < per_node.size(); ++q) terms.push_back(log_w[q] + per_node[q][k]);
      log_ev.push_back(LogSumExp(terms));
    }
  }
  return Normalize(models, log_ev, setup.model_prior);
}

}  // namespace

bool IsSeparable(const VectorXd& y, const MatrixXd& X) {
  const Eigen::Index n = y.size();
  const double s = y.sum();
  if (s == 0.0 || s == static_cast<double>(n)) return true;
  if (X.cols() == 1) return false;
  if (X.cols() > 2) throw ConfigError("separation check supports one covariate");
  const VectorXd x = X.col(1);
  double max0 = -std::numeric_limits<double>::infinity(), min0 = -max0;
  double max1 = max0, min1 = min0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] > 0.5) {
      max1 = std::max(max1, x[i]);
      min1 = std::min(min1, x[i]);
    } else {
      max0 = std::max(max0, x[i]);
      min0 = std::min(min0, x[i]);
    }
  }
  return max0 <= min1 || max1 <= min0;
}

double LogIntegrate(const std::function<double(const VectorXd&)>& log_f, const VectorXd& center,
                    const MatrixXd& precision, double tolerance) {
  const Eigen::Index d = center.size();
  if (d < 1 || d > 3) throw ConfigError("quadrature supports dimension 1 to 3");
  Eigen::LLT<MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw SingularError("quadrature scaling matrix is not positive definite");
  const MatrixXd U = llt.matrixU();
  const double log_jacobian = -U.diagonal().array().log().sum();
  const double shift = log_f(center);
  if (!std::isfinite(shift)) throw NumericalError("integrand is not finite at the centre");

  boost::math::quadrature::sinh_sinh<double> rule(12);
  VectorXd u = VectorXd::Zero(d);
  auto value_at = [&](const VectorXd& uu) {
    const VectorXd b = center + U.triangularView<Eigen::Upper>().solve(uu);
    const double v = log_f(b) - shift;
    return std::isfinite(v) ? std::exp(v) : 0.0;
  };
  std::function<double(int)> integrate_from = [&](int level) -> double {
    auto f = [&](double t) {
      u[level] = t;
      return level + 1 == d ? value_at(u) : integrate_from(level + 1);
    };
    return rule.integrate(f, tolerance);
  };
  const double integral = integrate_from(0);
  if (!(integral > 0.0) || !std::isfinite(integral)) throw NumericalError("quadrature failed");
  return shift + log_jacobian + std::log(integral);
}

double GaussianLogEvidence(const VectorXd& y, const MatrixXd& X, double c) {
  const Eigen::Index n = y.size();
  const Eigen::Index k = X.cols() - 1;
  const double ybar = y.mean();
  const VectorXd yc = y.array() - ybar;
  double fit_ss = 0.0;
  if (k > 0) {
    MatrixXd Xt = X.rightCols(k);
    Xt.rowwise() -= Xt.colwise().mean();
    const MatrixXd S = Xt.transpose() * Xt;
    const VectorXd xty = Xt.transpose() * yc;
    fit_ss = xty.dot(S.ldlt().solve(xty));
  }
  return -0.5 * n * kLog2Pi + 0.5 * (kLog2Pi - std::log(static_cast<double>(n))) -
         0.5 * (yc.squaredNorm() - fit_ss) - 0.5 * k * std::log1p(c) - 0.5 * fit_ss / (1.0 + c);
}

OracleResult BruteForceModelPosterior(const Dataset& data, const OracleSetup& setup) {
  if (data.p() > 2) throw ConfigError("brute-force oracle supports p <= 2");
  if (setup.model_prior.p != data.p()) throw ConfigError("model prior dimension differs from the data");
  switch (data.family.kind()) {
    case FamilyKind::kGaussian: return GaussianOracle(data, setup);
    case FamilyKind::kBinomial: return BinomialOracle(data, setup);
    case FamilyKind::kPoisson: break;
  }
  throw ConfigError("brute-force oracle does not support the poisson family");
}

}  // namespace pepglm
