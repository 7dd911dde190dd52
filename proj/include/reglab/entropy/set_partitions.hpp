#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace reglab {

// A set partition of {0, ..., n-1} as a restricted growth string: block[i] is
// the block of element i, blocks numbered by first element.
using BlockLabels = std::vector<std::size_t>;

inline std::size_t block_count(const BlockLabels& b) {
  std::size_t k = 0;
  for (std::size_t x : b) k = std::max(k, x + 1);
  return k;
}

// Renumbers blocks by first appearance.
inline BlockLabels canonical_blocks(const BlockLabels& b) {
  std::vector<std::size_t> remap(b.empty() ? 0 : *std::max_element(b.begin(), b.end()) + 1,
                                 SIZE_MAX);
  BlockLabels out(b.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto& r = remap[b[i]];
    if (r == SIZE_MAX) r = next++;
    out[i] = r;
  }
  return out;
}

// Fewer blocks first, then lexicographic on the growth string.
inline bool canonical_less(const BlockLabels& a, const BlockLabels& b) {
  const std::size_t ka = block_count(a), kb = block_count(b);
  if (ka != kb) return ka < kb;
  return a < b;
}

// All Bell(n) set partitions of an n-element set, in growth-string order.
inline std::vector<BlockLabels> all_set_partitions(std::size_t n) {
  std::vector<BlockLabels> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  BlockLabels a(n, 0);
  for (;;) {
    out.push_back(a);
    // Advance the rightmost entry that may still grow: a[i] <= max(a[0..i-1]) + 1.
    std::size_t i = n - 1;
    for (; i > 0; --i) {
      const std::size_t bound = *std::max_element(a.begin(), a.begin() + i) + 1;
      if (a[i] < bound) break;
    }
    if (i == 0) break;
    ++a[i];
    std::fill(a.begin() + i + 1, a.end(), 0);
  }
  return out;
}

// Every partition of {0, ..., n-1} that refines `base`: each block of `base`
// is split independently. Canonical, sorted by canonical_less.
inline std::vector<BlockLabels> refinements_of(const BlockLabels& base) {
  const BlockLabels b = canonical_blocks(base);
  const std::size_t nb = block_count(b);
  std::vector<std::vector<std::size_t>> members(nb);
  for (std::size_t i = 0; i < b.size(); ++i) members[b[i]].push_back(i);
  std::vector<std::vector<BlockLabels>> choices(nb);
  for (std::size_t k = 0; k < nb; ++k) choices[k] = all_set_partitions(members[k].size());

  std::vector<BlockLabels> out;
  std::vector<std::size_t> pick(nb, 0);
  for (;;) {
    BlockLabels labels(b.size());
    std::size_t offset = 0;
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& split = choices[k][pick[k]];
      for (std::size_t t = 0; t < members[k].size(); ++t)
        labels[members[k][t]] = offset + split[t];
      offset += block_count(split);
    }
    out.push_back(canonical_blocks(labels));
    std::size_t k = 0;
    while (k < nb && ++pick[k] == choices[k].size()) pick[k++] = 0;
    if (k == nb) break;
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

}  // namespace reglab
