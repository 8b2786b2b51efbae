#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace pepglm {

// Binary inclusion vector over p candidate predictors. Predictor j (0-based)
// maps to design column j + 1; column 0 is the intercept, present in every
// model. Supports up to 63 predictors.
class ModelIndicator {
 public:
  static constexpr int kMaxPredictors = 63;

  ModelIndicator() = default;
  explicit ModelIndicator(int p, std::uint64_t bits = 0);

  static ModelIndicator Empty(int p) { return ModelIndicator(p); }
  static ModelIndicator Full(int p);
  // Parses a '0'/'1' string, predictor 1 first.
  static ModelIndicator FromString(std::string_view bits);

  int p() const { return p_; }
  std::uint64_t bits() const { return bits_; }

  bool Includes(int j) const { return (bits_ >> j) & 1u; }
  void Set(int j, bool included);
  ModelIndicator With(int j, bool included) const;

  // Number of active predictors p_gamma.
  int Size() const;
  // Number of active coefficients d_gamma = p_gamma + 1.
  int Dimension() const { return Size() + 1; }

  // Design-matrix column indices of the active coefficients, intercept first.
  std::vector<int> Columns() const;
  // Design-matrix column indices of the inactive predictors.
  std::vector<int> InactiveColumns() const;

  std::string ToString() const;

  bool operator==(const ModelIndicator& other) const = default;
  // Lexicographic on ToString(): "0..." sorts before "1...".
  std::strong_ordering operator<=>(const ModelIndicator& other) const;

 private:
  int p_ = 0;
  std::uint64_t bits_ = 0;
};

}  // namespace pepglm

template <>
struct std::hash<pepglm::ModelIndicator> {
  std::size_t operator()(const pepglm::ModelIndicator& m) const noexcept {
    return std::hash<std::uint64_t>{}(m.bits() * 0x9E3779B97F4A7C15ull ^
                                      static_cast<std::uint64_t>(m.p()));
  }
};
