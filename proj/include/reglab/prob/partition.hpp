#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reglab/error.hpp"
#include "reglab/prob/sample_space.hpp"

namespace reglab {

// ceil(log2(k)) for k >= 1: the number of binary events needed to separate k
// atoms.
inline std::size_t ceil_log2(std::size_t k) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < k) ++bits;
  return bits;
}

// A finite sub-sigma-algebra of the power set, stored as its atoms. Atom ids
// are canonical (numbered in order of first appearance along the outcome
// list), so two partitions with the same atoms compare equal.
//
// `generator_count` is an upper bound on the complexity (the least number of
// generating events); refinement by one event adds one to it. `side`, when
// set, records that the partition is generated by that factor side alone.
class Partition {
 public:
  Partition(SpacePtr space, const std::vector<std::size_t>& atom_labels,
            std::optional<std::size_t> generator_count = std::nullopt,
            std::optional<std::size_t> side = std::nullopt)
      : space_(std::move(space)), side_(side) {
    if (!space_) throw StructuralError("partition: null sample space");
    if (atom_labels.size() != space_->size())
      throw StructuralError("partition: " + std::to_string(atom_labels.size()) +
                            " labels for " + std::to_string(space_->size()) +
                            " outcomes");
    canonicalize(atom_labels);
    const std::size_t exact = exact_complexity();
    generator_count_ = generator_count.value_or(exact);
    if (generator_count_ < exact)
      throw PreconditionError("partition: generator_count " +
                              std::to_string(generator_count_) +
                              " below exact complexity " +
                              std::to_string(exact));
    if (side_) check_side_measurable(*side_);
  }

  static Partition trivial(SpacePtr space,
                           std::optional<std::size_t> side = std::nullopt) {
    const std::size_t n = space ? space->size() : 0;
    return Partition(std::move(space), std::vector<std::size_t>(n, 0), 0, side);
  }

  static Partition discrete(SpacePtr space) {
    const std::size_t n = space ? space->size() : 0;
    std::vector<std::size_t> labels(n);
    for (std::size_t k = 0; k < n; ++k) labels[k] = k;
    return Partition(std::move(space), labels);
  }

  // Lifts a partition of side `side`'s label set to Omega.
  static Partition from_side(SpacePtr space, std::size_t side,
                             const std::vector<std::size_t>& label_atoms,
                             std::optional<std::size_t> generator_count =
                                 std::nullopt) {
    const FactorSide& fs = space->side(side);
    if (label_atoms.size() != fs.label_count)
      throw StructuralError("partition: side " + std::to_string(side) +
                            " has " + std::to_string(fs.label_count) +
                            " labels");
    std::vector<std::size_t> atoms(space->size());
    for (std::size_t k = 0; k < atoms.size(); ++k)
      atoms[k] = label_atoms[fs.labels[k]];
    return Partition(std::move(space), atoms, generator_count, side);
  }

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return atom_of_.size(); }
  const std::vector<std::size_t>& atom_of() const noexcept { return atom_of_; }
  std::size_t atom(std::size_t outcome) const { return atom_of_[outcome]; }
  std::size_t atom_count() const noexcept { return atom_count_; }
  std::size_t generator_count() const noexcept { return generator_count_; }
  std::optional<std::size_t> side() const noexcept { return side_; }

  std::vector<double> atom_weights() const {
    std::vector<double> w(atom_count_, 0.0);
    for (std::size_t k = 0; k < atom_of_.size(); ++k)
      w[atom_of_[k]] += space_->weight(k);
    return w;
  }

  std::size_t positive_atom_count() const {
    std::size_t n = 0;
    for (double w : atom_weights())
      if (w > 0.0) ++n;
    return n;
  }

  std::size_t exact_complexity() const {
    return ceil_log2(positive_atom_count());
  }

  // Atom of each label of `side`; requires the partition to factor through
  // that side. Labels no outcome carries map to nullopt.
  std::vector<std::optional<std::size_t>> side_atoms(std::size_t side) const {
    const FactorSide& fs = space_->side(side);
    std::vector<std::optional<std::size_t>> out(fs.label_count);
    for (std::size_t k = 0; k < atom_of_.size(); ++k) {
      auto& slot = out[fs.labels[k]];
      if (slot && *slot != atom_of_[k])
        throw PreconditionError("partition is not measurable in side " +
                                std::to_string(side));
      slot = atom_of_[k];
    }
    return out;
  }

  // Atoms compare by structure only; generator_count and side are metadata.
  bool same_atoms(const Partition& other) const {
    return atom_of_ == other.atom_of_;
  }

 private:
  void canonicalize(const std::vector<std::size_t>& labels) {
    std::unordered_map<std::size_t, std::size_t> remap;
    atom_of_.resize(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
      auto [it, inserted] = remap.try_emplace(labels[k], remap.size());
      atom_of_[k] = it->second;
    }
    atom_count_ = remap.size();
  }

  void check_side_measurable(std::size_t side) const {
    const FactorSide& fs = space_->side(side);
    std::vector<std::size_t> seen(fs.label_count, SIZE_MAX);
    for (std::size_t k = 0; k < atom_of_.size(); ++k) {
      auto& slot = seen[fs.labels[k]];
      if (slot == SIZE_MAX)
        slot = atom_of_[k];
      else if (slot != atom_of_[k])
        throw PreconditionError("partition does not factor through side " +
                                std::to_string(side));
    }
  }

  SpacePtr space_;
  std::vector<std::size_t> atom_of_;
  std::size_t atom_count_ = 0;
  std::size_t generator_count_ = 0;
  std::optional<std::size_t> side_;
};

inline void require_same_space(const SpacePtr& a, const SpacePtr& b,
                               const char* what) {
  if (a != b && (a->size() != b->size()))
    throw StructuralError(std::string(what) +
                          ": operands live on different sample spaces");
}

// The smallest sigma-algebra containing both: atoms are the nonempty pairwise
// intersections. Complexity is subadditive, so the generator counts add.
inline Partition join(const Partition& p, const Partition& q) {
  require_same_space(p.space(), q.space(), "join");
  const std::size_t n = p.size();
  const std::uint64_t stride = q.atom_count();
  std::unordered_map<std::uint64_t, std::size_t> ids;
  std::vector<std::size_t> labels(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t key = p.atom(k) * stride + q.atom(k);
    labels[k] = ids.try_emplace(key, ids.size()).first->second;
  }
  std::optional<std::size_t> side;
  if (p.side() && p.side() == q.side()) side = p.side();
  return Partition(p.space(), labels, p.generator_count() + q.generator_count(),
                   side);
}

inline Partition join(const std::vector<Partition>& parts) {
  if (parts.empty()) throw StructuralError("join: no partitions");
  Partition acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = join(acc, parts[i]);
  return acc;
}

// True when every atom of `fine` lies inside a single atom of `coarse`.
inline bool refines(const Partition& fine, const Partition& coarse) {
  require_same_space(fine.space(), coarse.space(), "refines");
  std::vector<std::size_t> parent(fine.atom_count(), SIZE_MAX);
  for (std::size_t k = 0; k < fine.size(); ++k) {
    auto& slot = parent[fine.atom(k)];
    if (slot == SIZE_MAX)
      slot = coarse.atom(k);
    else if (slot != coarse.atom(k))
      return false;
  }
  return true;
}

}  // namespace reglab
