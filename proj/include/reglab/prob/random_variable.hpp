#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "reglab/error.hpp"
#include "reglab/prob/partition.hpp"
#include "reglab/prob/sample_space.hpp"

namespace reglab {

// A real-valued function on the outcomes of a sample space.
class RandomVariable {
 public:
  RandomVariable(SpacePtr space, std::vector<double> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw StructuralError("random variable: null sample space");
    if (values_.size() != space_->size())
      throw StructuralError("random variable: " +
                            std::to_string(values_.size()) + " values for " +
                            std::to_string(space_->size()) + " outcomes");
  }

  static RandomVariable constant(SpacePtr space, double c) {
    const std::size_t n = space ? space->size() : 0;
    return RandomVariable(std::move(space), std::vector<double>(n, c));
  }

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  double mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
      s += space_->weight(k) * values_[k];
    return s;
  }

  // E(|X|^2)
  double norm2_squared() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
      s += space_->weight(k) * values_[k] * values_[k];
    return s;
  }

  double norm2() const { return std::sqrt(norm2_squared()); }

  // E(|X|)
  double norm1() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
      s += space_->weight(k) * std::abs(values_[k]);
    return s;
  }

  friend RandomVariable operator-(const RandomVariable& a,
                                  const RandomVariable& b) {
    require_same_space(a.space_, b.space_, "difference");
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.values_[k] - b.values_[k];
    return RandomVariable(a.space_, std::move(v));
  }

  friend RandomVariable operator*(const RandomVariable& a,
                                  const RandomVariable& b) {
    require_same_space(a.space_, b.space_, "product");
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.values_[k] * b.values_[k];
    return RandomVariable(a.space_, std::move(v));
  }

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

// E(X | B): on each atom the weighted average of X over that atom; 0 on atoms
// of zero probability.
inline RandomVariable conditional_expectation(const RandomVariable& x,
                                              const Partition& b) {
  require_same_space(x.space(), b.space(), "conditional_expectation");
  const auto& w = x.space()->weights();
  std::vector<double> mass(b.atom_count(), 0.0), sum(b.atom_count(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    mass[b.atom(k)] += w[k];
    sum[b.atom(k)] += w[k] * x[k];
  }
  std::vector<double> avg(b.atom_count(), 0.0);
  for (std::size_t a = 0; a < avg.size(); ++a)
    if (mass[a] > 0.0) avg[a] = sum[a] / mass[a];
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = avg[b.atom(k)];
  return RandomVariable(x.space(), std::move(out));
}

// Energy (index) of B relative to X: ||E(X|B)||_2^2.
inline double energy(const RandomVariable& x, const Partition& b) {
  return conditional_expectation(x, b).norm2_squared();
}

// ||E(X|fine) - E(X|coarse)||_2^2. Requires fine to refine coarse, in which
// case it equals energy(x, fine) - energy(x, coarse).
inline double pythagoras_residual(const RandomVariable& x,
                                  const Partition& coarse,
                                  const Partition& fine) {
  if (!refines(fine, coarse))
    throw PreconditionError(
        "pythagoras_residual: fine partition does not refine coarse");
  return (conditional_expectation(x, fine) - conditional_expectation(x, coarse))
      .norm2_squared();
}

// Indicator of {outcome : label on `side` lies in `subset`}.
inline RandomVariable lift_event(const SpacePtr& space, std::size_t side,
                                 const std::vector<std::size_t>& subset) {
  const FactorSide& fs = space->side(side);
  std::vector<char> member(fs.label_count, 0);
  for (std::size_t l : subset) {
    if (l >= fs.label_count)
      throw InputError("lift_event: label " + std::to_string(l) +
                       " not in side " + std::to_string(side));
    member[l] = 1;
  }
  std::vector<double> v(space->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = member[fs.labels[k]] ? 1.0 : 0.0;
  return RandomVariable(space, std::move(v));
}

}  // namespace reglab
