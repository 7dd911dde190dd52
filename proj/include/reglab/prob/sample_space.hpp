#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "reglab/error.hpp"

namespace reglab {

// One coordinate of a product structure: the projection of every outcome onto
// side `index`. Labels are dense integers in [0, label_count).
struct FactorSide {
  std::size_t index = 0;
  std::size_t label_count = 0;
  std::vector<std::size_t> labels;  // one per outcome
};

// A finite probability space (Omega, power set, P). Outcomes are identified by
// opaque 64-bit ids; an optional list of factor sides describes a product
// structure such as V1 x V2.
class SampleSpace {
 public:
  static constexpr double kWeightTolerance = 1e-12;

  SampleSpace(std::vector<std::uint64_t> ids, std::vector<double> weights,
              std::vector<FactorSide> sides = {})
      : ids_(std::move(ids)), weights_(std::move(weights)),
        sides_(std::move(sides)) {
    if (ids_.size() != weights_.size())
      throw StructuralError("sample space: " + std::to_string(ids_.size()) +
                            " ids but " + std::to_string(weights_.size()) +
                            " weights");
    if (ids_.empty()) throw InputError("sample space: no outcomes");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw InputError("sample space: negative or non-finite weight");
      total += w;
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
      throw InputError("sample space: weights sum to " +
                       std::to_string(total) + ", expected 1");
    std::unordered_set<std::uint64_t> seen(ids_.begin(), ids_.end());
    if (seen.size() != ids_.size())
      throw InputError("sample space: duplicate outcome ids");
    for (std::size_t s = 0; s < sides_.size(); ++s) {
      auto& side = sides_[s];
      side.index = s;
      if (side.labels.size() != ids_.size())
        throw StructuralError("factor side " + std::to_string(s) +
                              ": label count does not match outcome count");
      for (std::size_t l : side.labels)
        if (l >= side.label_count)
          throw InputError("factor side " + std::to_string(s) +
                           ": label out of range");
    }
  }

  // Uniform measure on n outcomes with ids 0..n-1.
  static std::shared_ptr<const SampleSpace> uniform(std::size_t n) {
    if (n == 0) throw InputError("sample space: no outcomes");
    std::vector<std::uint64_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return std::make_shared<const SampleSpace>(
        std::move(ids), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  // Uniform product V1 x V2 with n1*n2 outcomes ordered (u, v) row-major;
  // outcome id u*n2 + v; side 0 projects to u, side 1 to v.
  static std::shared_ptr<const SampleSpace> uniform_product(std::size_t n1,
                                                            std::size_t n2) {
    if (n1 == 0 || n2 == 0)
      throw InputError("product space: empty side");
    const std::size_t n = n1 * n2;
    std::vector<std::uint64_t> ids(n);
    FactorSide s0{0, n1, std::vector<std::size_t>(n)};
    FactorSide s1{1, n2, std::vector<std::size_t>(n)};
    for (std::size_t u = 0; u < n1; ++u)
      for (std::size_t v = 0; v < n2; ++v) {
        const std::size_t k = u * n2 + v;
        ids[k] = k;
        s0.labels[k] = u;
        s1.labels[k] = v;
      }
    return std::make_shared<const SampleSpace>(
        std::move(ids), std::vector<double>(n, 1.0 / static_cast<double>(n)),
        std::vector<FactorSide>{std::move(s0), std::move(s1)});
  }

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::uint64_t>& ids() const noexcept { return ids_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t k) const { return weights_[k]; }

  std::size_t side_count() const noexcept { return sides_.size(); }
  const std::vector<FactorSide>& sides() const noexcept { return sides_; }
  const FactorSide& side(std::size_t i) const {
    if (i >= sides_.size())
      throw StructuralError("no factor side " + std::to_string(i));
    return sides_[i];
  }

 private:
  std::vector<std::uint64_t> ids_;
  std::vector<double> weights_;
  std::vector<FactorSide> sides_;
};

using SpacePtr = std::shared_ptr<const SampleSpace>;

}  // namespace reglab
