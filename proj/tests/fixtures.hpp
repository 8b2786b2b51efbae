#pragma once

#include <random>

#include <Eigen/Dense>

#include "pepglm/glm.hpp"

namespace testing_support {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// n x (p+1) design: intercept then centred standard normal columns.
inline MatrixXd RandomDesign(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> z;
  MatrixXd X(n, p + 1);
  X.col(0).setOnes();
  for (int j = 1; j <= p; ++j) {
    for (int i = 0; i < n; ++i) X(i, j) = z(rng);
    X.col(j).array() -= X.col(j).mean();
  }
  return X;
}

inline VectorXd SimulateResponse(std::mt19937_64& rng, const pepglm::Family& family,
                                 const VectorXd& eta) {
  VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double mu = family.Mean(eta[i], family.Trials(i));
    switch (family.kind()) {
      case pepglm::FamilyKind::kBinomial: {
        std::binomial_distribution<int> b(static_cast<int>(family.Trials(i)),
                                          mu / family.Trials(i));
        y[i] = b(rng);
        break;
      }
      case pepglm::FamilyKind::kPoisson: {
        std::poisson_distribution<int> pd(mu);
        y[i] = pd(rng);
        break;
      }
      case pepglm::FamilyKind::kGaussian: {
        std::normal_distribution<double> z(mu, 1.0);
        y[i] = z(rng);
        break;
      }
    }
  }
  return y;
}

}  // namespace testing_support
