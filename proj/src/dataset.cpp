#include "pepglm/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "pepglm/error.hpp"

namespace pepglm {

Dataset Dataset::FromCovariates(Family family, VectorXd y, const MatrixXd& covariates,
                                std::vector<std::string> names) {
  const Eigen::Index n = covariates.rows();
  const Eigen::Index p = covariates.cols();
  if (n == 0) throw DimensionError("dataset has no rows");
  if (y.size() != n) throw DimensionError("response length differs from the number of rows");
  if (!covariates.allFinite()) throw DomainError("covariates contain non-finite values");
  family.ValidateResponse(y);
  if (names.empty()) {
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != p) {
    throw DimensionError("number of predictor names differs from the number of columns");
  }
  Dataset d;
  d.family = std::move(family);
  d.y = std::move(y);
  d.names = std::move(names);
  d.column_means = covariates.colwise().mean().transpose();
  d.X.resize(n, p + 1);
  d.X.col(0).setOnes();
  d.X.rightCols(p) = covariates.rowwise() - d.column_means.transpose();
  return d;
}

MatrixXd Dataset::RawCovariates() const {
  return X.rightCols(p()).rowwise() + column_means.transpose();
}

MatrixXd Dataset::DesignFor(const MatrixXd& raw_covariates) const {
  if (raw_covariates.cols() != p()) throw DimensionError("covariate count differs");
  MatrixXd out(raw_covariates.rows(), p() + 1);
  out.col(0).setOnes();
  out.rightCols(p()) = raw_covariates.rowwise() - column_means.transpose();
  return out;
}

Dataset Dataset::Subset(const std::vector<int>& rows) const {
  const MatrixXd raw = RawCovariates();
  MatrixXd sub(rows.size(), p());
  VectorXd ysub(rows.size());
  VectorXd trials;
  const bool has_trials = family.trials().size() > 0;
  if (has_trials) trials.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= n()) throw DimensionError("row index out of range");
    sub.row(k) = raw.row(rows[k]);
    ysub[k] = y[rows[k]];
    if (has_trials) trials[k] = family.Trials(rows[k]);
  }
  return FromCovariates(Family(family.kind(), trials), ysub, sub, names);
}

std::pair<Dataset, Dataset> SplitHalf(const Dataset& data, std::uint64_t seed) {
  if (data.n() < 2) throw DimensionError("need at least two rows to split");
  std::vector<int> idx(data.n());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle implementation.
  for (int i = data.n() - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(idx[i], idx[pick(rng)]);
  }
  const int half = data.n() / 2;
  std::vector<int> train(idx.begin(), idx.begin() + half);
  std::vector<int> test(idx.begin() + half, idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  Dataset tr = data.Subset(train);
  Dataset te = data.Subset(test);
  // Put the test rows on the training scale.
  MatrixXd raw_test = te.RawCovariates();
  te.X = tr.DesignFor(raw_test);
  te.column_means = tr.column_means;
  return {std::move(tr), std::move(te)};
}

}  // namespace pepglm
