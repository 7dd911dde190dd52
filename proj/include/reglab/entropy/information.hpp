#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reglab/error.hpp"
#include "reglab/prob/partition.hpp"
#include "reglab/prob/random_variable.hpp"
#include "reglab/prob/sample_space.hpp"

namespace reglab {

// A random variable with finitely many values, stored as a symbol per
// outcome. Symbols are dense integers in [0, alphabet_size()).
class DiscreteRV {
 public:
  DiscreteRV(SpacePtr base, std::vector<std::size_t> symbols)
      : base_(std::move(base)), symbols_(std::move(symbols)) {
    if (!base_) throw StructuralError("discrete variable: null sample space");
    if (symbols_.size() != base_->size())
      throw StructuralError("discrete variable: " + std::to_string(symbols_.size()) +
                            " symbols for " + std::to_string(base_->size()) +
                            " outcomes");
    for (std::size_t s : symbols_) alphabet_ = std::max(alphabet_, s + 1);
  }

  static DiscreteRV constant(SpacePtr base) {
    const std::size_t n = base ? base->size() : 0;
    return DiscreteRV(std::move(base), std::vector<std::size_t>(n, 0));
  }

  // Symbols of a real-valued variable: one per distinct value, in increasing
  // value order.
  static DiscreteRV from_values(const RandomVariable& x) {
    std::vector<double> distinct = x.values();
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::size_t> sym(x.size());
    for (std::size_t k = 0; k < sym.size(); ++k)
      sym[k] = static_cast<std::size_t>(
          std::lower_bound(distinct.begin(), distinct.end(), x[k]) - distinct.begin());
    return DiscreteRV(x.space(), std::move(sym));
  }

  const SpacePtr& base() const noexcept { return base_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::size_t>& symbols() const noexcept { return symbols_; }
  std::size_t operator[](std::size_t k) const { return symbols_[k]; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }

  // Number of symbols carried by an outcome of positive probability.
  std::size_t range_size() const {
    std::vector<char> used(alphabet_, 0);
    for (std::size_t k = 0; k < symbols_.size(); ++k)
      if (base_->weight(k) > 0.0) used[symbols_[k]] = 1;
    return static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));
  }

  std::vector<double> distribution() const {
    std::vector<double> p(alphabet_, 0.0);
    for (std::size_t k = 0; k < symbols_.size(); ++k) p[symbols_[k]] += base_->weight(k);
    return p;
  }

  // The sigma-algebra generated by this variable.
  Partition partition() const { return Partition(base_, symbols_); }

 private:
  SpacePtr base_;
  std::vector<std::size_t> symbols_;
  std::size_t alphabet_ = 0;
};

inline void require_same_base(const DiscreteRV& a, const DiscreteRV& b) {
  require_same_space(a.base(), b.base(), "discrete variables");
}

// (X, Y) as a single variable; pair symbols numbered by first appearance.
inline DiscreteRV joint(const DiscreteRV& x, const DiscreteRV& y) {
  require_same_base(x, y);
  std::unordered_map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> sym(x.size());
  for (std::size_t k = 0; k < sym.size(); ++k)
    sym[k] = ids.try_emplace(x[k] * y.alphabet_size() + y[k], ids.size()).first->second;
  return DiscreteRV(x.base(), std::move(sym));
}

inline DiscreteRV joint(const DiscreteRV& x, const DiscreteRV& y, const DiscreteRV& z) {
  return joint(joint(x, y), z);
}

// sum p log2(1/p) with 0 log(1/0) = 0. Clamped at 0: a point mass whose
// weight rounds to just above 1 would otherwise come out as -1e-16.
inline double entropy_of(const std::vector<double>& probabilities) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log2(p);
  return std::max(h, 0.0);
}

// Shannon entropy in bits.
inline double entropy(const DiscreteRV& x) { return entropy_of(x.distribution()); }

// H(X|Y) as sum_y P(Y=y) H(X | Y=y).
inline double conditional_entropy_definitional(const DiscreteRV& x, const DiscreteRV& y) {
  require_same_base(x, y);
  std::map<std::size_t, std::map<std::size_t, double>> cells;
  for (std::size_t k = 0; k < x.size(); ++k) cells[y[k]][x[k]] += x.base()->weight(k);
  double h = 0.0;
  for (const auto& [ys, row] : cells) {
    double py = 0.0;
    for (const auto& [xs, p] : row) py += p;
    if (py <= 0.0) continue;
    double hy = 0.0;
    for (const auto& [xs, p] : row)
      if (p > 0.0) hy -= (p / py) * std::log2(p / py);
    h += py * hy;
  }
  return h;
}

// H(X|Y) = H(X,Y) - H(Y); cross-checked against the definitional sum.
inline double conditional_entropy(const DiscreteRV& x, const DiscreteRV& y) {
  const double bayes = entropy(joint(x, y)) - entropy(y);
  const double direct = conditional_entropy_definitional(x, y);
  if (std::abs(bayes - direct) > 1e-9)
    throw std::logic_error("conditional entropy: Bayes form " + std::to_string(bayes) +
                           " disagrees with definition " + std::to_string(direct));
  return bayes;
}

struct MutualInformationForms {
  double via_x;  // H(X|Z) - H(X|Y,Z)
  double via_y;  // H(Y|Z) - H(Y|X,Z)
};

inline MutualInformationForms conditional_mutual_information_forms(const DiscreteRV& x,
                                                                   const DiscreteRV& y,
                                                                   const DiscreteRV& z) {
  return {conditional_entropy(x, z) - conditional_entropy(x, joint(y, z)),
          conditional_entropy(y, z) - conditional_entropy(y, joint(x, z))};
}

// I(X:Y|Z) = H(X|Z) - H(X|Y,Z); both symmetric forms must agree.
inline double conditional_mutual_information(const DiscreteRV& x, const DiscreteRV& y,
                                             const DiscreteRV& z) {
  const auto f = conditional_mutual_information_forms(x, y, z);
  if (std::abs(f.via_x - f.via_y) > 1e-9)
    throw std::logic_error("conditional mutual information: symmetric forms disagree");
  return f.via_x;
}

inline double mutual_information(const DiscreteRV& x, const DiscreteRV& y) {
  return conditional_mutual_information(x, y, DiscreteRV::constant(x.base()));
}

// True when Y' is a function of Y on outcomes of positive probability.
inline bool determines(const DiscreteRV& y, const DiscreteRV& yp) {
  require_same_base(y, yp);
  std::vector<std::size_t> image(y.alphabet_size(), SIZE_MAX);
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!(y.base()->weight(k) > 0.0)) continue;
    auto& slot = image[y[k]];
    if (slot == SIZE_MAX)
      slot = yp[k];
    else if (slot != yp[k])
      return false;
  }
  return true;
}

struct PinskerGap {
  double lhs;  // E|E(X|Y') - E(X|Y)|
  double rhs;  // 2 I(X:Y|Y')^(1/2)
};

// Both sides of E|E(X|Y') - E(X|Y)| <= 2 I(X:Y|Y')^(1/2) for X with values in
// [-1, 1] and Y' determined by Y.
inline PinskerGap pinsker_gap(const RandomVariable& x, const DiscreteRV& y,
                              const DiscreteRV& yp) {
  require_same_space(x.space(), y.base(), "pinsker_gap");
  for (double v : x.values())
    if (!(v >= -1.0 && v <= 1.0))
      throw PreconditionError("pinsker_gap: X must take values in [-1, 1]");
  if (!determines(y, yp))
    throw PreconditionError("pinsker_gap: Y does not determine Y'");
  const RandomVariable diff = conditional_expectation(x, yp.partition()) -
                              conditional_expectation(x, y.partition());
  const double info = conditional_mutual_information(DiscreteRV::from_values(x), y, yp);
  return {diff.norm1(), 2.0 * std::sqrt(std::max(0.0, info))};
}

}  // namespace reglab
