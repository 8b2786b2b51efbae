#include "pepglm/model_indicator.hpp"

#include <bit>

#include "pepglm/error.hpp"

namespace pepglm {

ModelIndicator::ModelIndicator(int p, std::uint64_t bits) : p_(p), bits_(bits) {
  if (p < 0 || p > kMaxPredictors) {
    throw ConfigError("number of predictors must lie in [0, 63], got " +
                      std::to_string(p));
  }
  if (p < 64 && (bits >> p) != 0) {
    throw ConfigError("indicator bits exceed the number of predictors");
  }
}

ModelIndicator ModelIndicator::Full(int p) {
  return ModelIndicator(p, p == 0 ? 0 : (~std::uint64_t{0} >> (64 - p)));
}

ModelIndicator ModelIndicator::FromString(std::string_view bits) {
  ModelIndicator m(static_cast<int>(bits.size()));
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1') {
      m.Set(static_cast<int>(j), true);
    } else if (bits[j] != '0') {
      throw ConfigError("model indicator string must contain only 0/1");
    }
  }
  return m;
}

void ModelIndicator::Set(int j, bool included) {
  if (j < 0 || j >= p_) throw DimensionError("predictor index out of range");
  const std::uint64_t mask = std::uint64_t{1} << j;
  bits_ = included ? (bits_ | mask) : (bits_ & ~mask);
}

ModelIndicator ModelIndicator::With(int j, bool included) const {
  ModelIndicator copy = *this;
  copy.Set(j, included);
  return copy;
}

int ModelIndicator::Size() const { return std::popcount(bits_); }

std::vector<int> ModelIndicator::Columns() const {
  std::vector<int> cols;
  cols.reserve(Dimension());
  cols.push_back(0);
  for (int j = 0; j < p_; ++j) {
    if (Includes(j)) cols.push_back(j + 1);
  }
  return cols;
}

std::vector<int> ModelIndicator::InactiveColumns() const {
  std::vector<int> cols;
  for (int j = 0; j < p_; ++j) {
    if (!Includes(j)) cols.push_back(j + 1);
  }
  return cols;
}

std::string ModelIndicator::ToString() const {
  std::string s(p_, '0');
  for (int j = 0; j < p_; ++j) {
    if (Includes(j)) s[j] = '1';
  }
  return s;
}

std::strong_ordering ModelIndicator::operator<=>(const ModelIndicator& other) const {
  const int common = p_ < other.p_ ? p_ : other.p_;
  for (int j = 0; j < common; ++j) {
    const bool a = Includes(j);
    const bool b = other.Includes(j);
    if (a != b) return a ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return p_ <=> other.p_;
}

}  // namespace pepglm
