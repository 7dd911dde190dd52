#pragma once

// Slow, independent reference computations for the test suites. Nothing here
// calls into the library's search or averaging code.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

// max over all (row subset, col subset) of |sum of entries|, row-major data.
inline double brute_max_rectangle(std::size_t rows, std::size_t cols,
                                  const std::vector<double>& data) {
  double best = 0.0;
  for (std::uint32_t a = 0; a < (1u << rows); ++a)
    for (std::uint32_t b = 0; b < (1u << cols); ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r)
        if (a >> r & 1u)
          for (std::size_t c = 0; c < cols; ++c)
            if (b >> c & 1u) s += data[r * cols + c];
      best = std::max(best, std::abs(s));
    }
  return best;
}

// Entries of the form k / 2^10 with |k| <= 64, so every partial sum is exact.
inline std::vector<double> dyadic_matrix(std::size_t rows, std::size_t cols,
                                         std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(-64, 64);
  std::vector<double> out(rows * cols);
  for (double& x : out) x = std::ldexp(static_cast<double>(k(rng)), -10);
  return out;
}

// Largest | e(A1, A2) - d |A1||A2| | / (|cell1||cell2|) over all subsets,
// from an adjacency lookup.
template <class HasEdge>
double brute_pair_discrepancy(const std::vector<std::size_t>& cell1,
                              const std::vector<std::size_t>& cell2, HasEdge has_edge) {
  std::size_t total = 0;
  for (auto u : cell1)
    for (auto v : cell2) total += has_edge(u, v) ? 1 : 0;
  const double area = static_cast<double>(cell1.size() * cell2.size());
  const double d = static_cast<double>(total) / area;
  double best = 0.0;
  for (std::uint32_t a = 0; a < (1u << cell1.size()); ++a)
    for (std::uint32_t b = 0; b < (1u << cell2.size()); ++b) {
      std::size_t e = 0, na = 0, nb = 0;
      for (std::size_t i = 0; i < cell1.size(); ++i) na += a >> i & 1u;
      for (std::size_t j = 0; j < cell2.size(); ++j) nb += b >> j & 1u;
      for (std::size_t i = 0; i < cell1.size(); ++i)
        if (a >> i & 1u)
          for (std::size_t j = 0; j < cell2.size(); ++j)
            if (b >> j & 1u) e += has_edge(cell1[i], cell2[j]) ? 1 : 0;
      const double dev = std::abs(static_cast<double>(e) - d * static_cast<double>(na * nb));
      best = std::max(best, dev / area);
    }
  return best;
}

// H in bits from a list of outcome weights and a key per outcome.
template <class Key>
double entropy_bits(const std::vector<double>& w, const std::vector<Key>& key) {
  std::map<Key, double> p;
  for (std::size_t k = 0; k < w.size(); ++k) p[key[k]] += w[k];
  double h = 0.0;
  for (const auto& [x, q] : p)
    if (q > 0.0) h -= q * std::log2(q);
  return h;
}

inline std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng,
                                          bool allow_zero = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) {
    x = u(rng);
    if (allow_zero && u(rng) < 0.1) x = 0.0;
    s += x;
  }
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (double& x : w) x /= s;
  // push the rounding error onto the largest weight
  double t = 0.0;
  std::size_t big = 0;
  for (std::size_t k = 0; k < n; ++k) {
    t += w[k];
    if (w[k] > w[big]) big = k;
  }
  w[big] += 1.0 - t;
  return w;
}

inline std::vector<std::size_t> random_labels(std::size_t n, std::size_t k,
                                              std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, k - 1);
  std::vector<std::size_t> out(n);
  for (auto& x : out) x = d(rng);
  return out;
}

// Coarsening of `fine` obtained by merging its labels through a random map.
inline std::vector<std::size_t> merge_labels(const std::vector<std::size_t>& fine,
                                             std::size_t k, std::mt19937_64& rng) {
  std::size_t top = 0;
  for (auto x : fine) top = std::max(top, x + 1);
  const auto f = random_labels(top, k, rng);
  std::vector<std::size_t> out(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) out[i] = f[fine[i]];
  return out;
}

}  // namespace oracle
