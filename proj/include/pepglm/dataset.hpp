#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pepglm/glm.hpp"

namespace pepglm {

// Response, centred design with a leading intercept column, and the column
// means that were removed (needed to place new rows on the same scale).
struct Dataset {
  Family family = Family::Binomial();
  VectorXd y;
  MatrixXd X;
  std::vector<std::string> names;
  VectorXd column_means;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()) - 1; }

  // Builds from raw covariates (n x p, no intercept): validates the
  // response, centres each column and prepends the intercept.
  static Dataset FromCovariates(Family family, VectorXd y, const MatrixXd& covariates,
                                std::vector<std::string> names = {});

  // Covariates on their original scale.
  MatrixXd RawCovariates() const;
  // Design rows for raw covariates centred with this dataset's means.
  MatrixXd DesignFor(const MatrixXd& raw_covariates) const;
  // Rows `rows` as a new dataset, recentred on their own means.
  Dataset Subset(const std::vector<int>& rows) const;
};

// Seeded uniform random half split. The training part is recentred on its
// own means; the test part is centred with the training means.
std::pair<Dataset, Dataset> SplitHalf(const Dataset& data, std::uint64_t seed);

}  // namespace pepglm
