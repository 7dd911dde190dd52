#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "reglab/error.hpp"
#include "reglab/parallel.hpp"
#include "reglab/prob/partition.hpp"
#include "reglab/prob/random_variable.hpp"

namespace reglab {

// Largest side the exact oracle will enumerate: 2^24 subsets.
inline constexpr std::size_t kExactOracleCapacity = 24;

// Dense rows x cols matrix of residual mass: entry (a, b) is
// sum over outcomes with side labels (a, b) of P(outcome) * D(outcome).
// The correlation of a rectangle A1 x A2 is the sum of its entries.
class ResidualMatrix {
 public:
  ResidualMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  ResidualMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw StructuralError("residual matrix: wrong data size");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

  // sum |entries|; an upper bound on every rectangle correlation.
  double abs_sum() const {
    double s = 0.0;
    for (double v : data_) s += std::abs(v);
    return s;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

using Membership = std::vector<char>;

// Order on subsets: read the membership as a binary number with label 0 as
// the least significant bit.
inline bool encoding_less(const Membership& a, const Membership& b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return b[i] != 0;
  return false;
}

inline std::vector<std::size_t> members(const Membership& m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) out.push_back(i);
  return out;
}

inline double rectangle_sum(const ResidualMatrix& m, const Membership& rows,
                            const Membership& cols) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!rows[r]) continue;
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (cols[c]) s += m(r, c);
  }
  return s;
}

// Per-side events (label sets) and their correlation with the residual,
// E((X - E(X | join of fine)) * prod 1_{A_i}).
struct Witness {
  std::vector<std::vector<std::size_t>> events;
  double correlation = 0.0;
};

enum class OracleMode { exact, heuristic };

inline const char* to_string(OracleMode m) {
  return m == OracleMode::exact ? "exact" : "heuristic";
}

namespace detail {

struct Rectangle {
  Membership rows, cols;
  double value = 0.0;
};

// Larger |value| first; ties go to the lexicographically least (rows, cols).
inline bool better(const Rectangle& a, const Rectangle& b) {
  const double ma = std::abs(a.value), mb = std::abs(b.value);
  if (ma != mb) return ma > mb;
  if (a.rows != b.rows) return encoding_less(a.rows, b.rows);
  return encoding_less(a.cols, b.cols);
}

inline Witness to_witness(const ResidualMatrix& m, const Rectangle& r) {
  Witness w;
  w.events = {members(r.rows), members(r.cols)};
  w.correlation = rectangle_sum(m, r.rows, r.cols);
  return w;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Exact maximum of |sum over A1 x A2| over all subset pairs. Enumerates the
// subsets of the smaller side in Gray-code order; for each, the best partner
// is the set of positive (or negative) partial sums on the other side.
// Enumeration is split into fixed-size chunks, each re-summed from scratch, so
// results do not depend on the number of worker threads.
inline Witness max_rectangle_exact(const ResidualMatrix& m) {
  const bool enum_rows = m.rows() <= m.cols();
  const std::size_t small = enum_rows ? m.rows() : m.cols();
  const std::size_t large = enum_rows ? m.cols() : m.rows();
  if (small > kExactOracleCapacity)
    throw CapacityError("exact witness search: smaller side has " +
                        std::to_string(small) + " labels, capacity is " +
                        std::to_string(kExactOracleCapacity) +
                        "; use heuristic mode");
  auto at = [&](std::size_t s, std::size_t l) {
    return enum_rows ? m(s, l) : m(l, s);
  };
  auto assemble = [&](std::uint64_t mask, const std::vector<double>& sums,
                      int sign, double value) {
    detail::Rectangle r;
    Membership sm(small, 0), lm(large, 0);
    for (std::size_t s = 0; s < small; ++s) sm[s] = (mask >> s) & 1U;
    for (std::size_t l = 0; l < large; ++l)
      lm[l] = sign > 0 ? sums[l] > 0.0 : sums[l] < 0.0;
    r.rows = enum_rows ? std::move(sm) : std::move(lm);
    r.cols = enum_rows ? std::move(lm) : std::move(sm);
    r.value = value;
    return r;
  };

  const std::size_t chunk_bits = std::min<std::size_t>(small, 14);
  const std::uint64_t chunk_len = std::uint64_t{1} << chunk_bits;
  const std::size_t chunks = std::size_t{1} << (small - chunk_bits);
  std::vector<detail::Rectangle> best(chunks);

  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = std::uint64_t{c} * chunk_len;
    std::vector<double> sums(large, 0.0);
    std::uint64_t g = begin ^ (begin >> 1);
    for (std::size_t s = 0; s < small; ++s)
      if ((g >> s) & 1U)
        for (std::size_t l = 0; l < large; ++l) sums[l] += at(s, l);
    detail::Rectangle local = assemble(0, sums, 1, 0.0);
    local.rows.assign(m.rows(), 0);
    local.cols.assign(m.cols(), 0);
    for (std::uint64_t i = begin; i < begin + chunk_len; ++i) {
      if (i != begin) {
        const int bit = std::countr_zero(i);
        g ^= std::uint64_t{1} << bit;
        const bool added = (g >> bit) & 1U;
        for (std::size_t l = 0; l < large; ++l)
          sums[l] += added ? at(bit, l) : -at(bit, l);
      }
      double pos = 0.0, neg = 0.0;
      for (double v : sums) (v > 0.0 ? pos : neg) += v;
      const double mag = std::abs(local.value);
      if (pos >= mag) {
        auto cand = assemble(g, sums, 1, pos);
        if (detail::better(cand, local)) local = std::move(cand);
      }
      if (-neg >= std::abs(local.value)) {
        auto cand = assemble(g, sums, -1, neg);
        if (detail::better(cand, local)) local = std::move(cand);
      }
    }
    best[c] = std::move(local);
  });

  detail::Rectangle winner = std::move(best[0]);
  for (std::size_t c = 1; c < chunks; ++c)
    if (detail::better(best[c], winner)) winner = std::move(best[c]);
  return detail::to_witness(m, winner);
}

// Alternating maximization: fix one side, take the sign pattern of the
// partial sums on the other, repeat to a fixed point. Starts from `restarts`
// seeded random subsets plus the sign patterns of the top singular pair.
// The returned correlation is attained, hence a lower bound on the maximum.
inline Witness max_rectangle_heuristic(const ResidualMatrix& m,
                                       std::size_t restarts,
                                       std::uint64_t seed) {
  const std::size_t n1 = m.rows(), n2 = m.cols();

  auto climb = [&](Membership rows, int sign) {
    Membership cols(n2, 0);
    std::vector<double> col(n2), row(n1);
    for (int iter = 0; iter < 256; ++iter) {
      std::fill(col.begin(), col.end(), 0.0);
      for (std::size_t r = 0; r < n1; ++r)
        if (rows[r])
          for (std::size_t c = 0; c < n2; ++c) col[c] += m(r, c);
      for (std::size_t c = 0; c < n2; ++c) cols[c] = sign * col[c] > 0.0;
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t r = 0; r < n1; ++r)
        for (std::size_t c = 0; c < n2; ++c)
          if (cols[c]) row[r] += m(r, c);
      Membership next(n1, 0);
      for (std::size_t r = 0; r < n1; ++r) next[r] = sign * row[r] > 0.0;
      if (next == rows) break;
      rows = std::move(next);
    }
    detail::Rectangle out{std::move(rows), std::move(cols), 0.0};
    out.value = rectangle_sum(m, out.rows, out.cols);
    return out;
  };

  std::vector<Membership> starts;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(r + 1)));
    Membership rows(n1, 0);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n1; ++i) {
      if (i % 64 == 0) bits = rng();
      rows[i] = (bits >> (i % 64)) & 1U;
    }
    starts.push_back(std::move(rows));
  }

  // Top singular pair by power iteration; its sign patterns seed the search.
  std::vector<double> u(n1, 0.0), v(n2);
  for (std::size_t c = 0; c < n2; ++c) v[c] = 1.0 + 0.01 * static_cast<double>(c % 7);
  bool degenerate = false;
  for (int iter = 0; iter < 100 && !degenerate; ++iter) {
    double nu = 0.0, nv = 0.0;
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t r = 0; r < n1; ++r)
      for (std::size_t c = 0; c < n2; ++c) u[r] += m(r, c) * v[c];
    for (double x : u) nu += x * x;
    if (nu == 0.0) { degenerate = true; break; }
    for (double& x : u) x /= std::sqrt(nu);
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t r = 0; r < n1; ++r)
      for (std::size_t c = 0; c < n2; ++c) v[c] += m(r, c) * u[r];
    for (double x : v) nv += x * x;
    if (nv == 0.0) { degenerate = true; break; }
    for (double& x : v) x /= std::sqrt(nv);
  }
  if (!degenerate) {
    Membership up(n1, 0), un(n1, 0);
    for (std::size_t r = 0; r < n1; ++r) {
      up[r] = u[r] > 0.0;
      un[r] = u[r] < 0.0;
    }
    starts.push_back(std::move(up));
    starts.push_back(std::move(un));
    // Rows answering the positive / negative part of v.
    for (int s : {1, -1}) {
      Membership pos(n1, 0), neg(n1, 0);
      for (std::size_t r = 0; r < n1; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n2; ++c)
          if (s * v[c] > 0.0) acc += m(r, c);
        pos[r] = acc > 0.0;
        neg[r] = acc < 0.0;
      }
      starts.push_back(std::move(pos));
      starts.push_back(std::move(neg));
    }
  }
  starts.push_back(Membership(n1, 1));

  std::vector<detail::Rectangle> found(starts.size() * 2);
  parallel_for(found.size(), [&](std::size_t t) {
    found[t] = climb(starts[t / 2], t % 2 == 0 ? 1 : -1);
  });

  detail::Rectangle winner{Membership(n1, 0), Membership(n2, 0), 0.0};
  for (auto& f : found)
    if (detail::better(f, winner)) winner = std::move(f);
  return detail::to_witness(m, winner);
}

// Mass of D = x - E(x | join(fine)) aggregated over the side-0 x side-1 label
// grid of x's sample space.
inline ResidualMatrix residual_matrix(const RandomVariable& x,
                                      const std::vector<Partition>& fine) {
  const SpacePtr& space = x.space();
  if (space->side_count() != 2)
    throw StructuralError("witness search needs exactly two factor sides, got " +
                          std::to_string(space->side_count()));
  const RandomVariable d = x - conditional_expectation(x, join(fine));
  const FactorSide& s0 = space->side(0);
  const FactorSide& s1 = space->side(1);
  ResidualMatrix m(s0.label_count, s1.label_count);
  for (std::size_t k = 0; k < space->size(); ++k)
    m(s0.labels[k], s1.labels[k]) += space->weight(k) * d[k];
  return m;
}

inline Witness find_witness_exact(const RandomVariable& x,
                                  const std::vector<Partition>& fine) {
  if (x.space()->side_count() == 2) {
    const std::size_t small =
        std::min(x.space()->side(0).label_count, x.space()->side(1).label_count);
    if (small > kExactOracleCapacity)
      throw CapacityError("exact witness search: smaller side has " +
                          std::to_string(small) + " labels, capacity is " +
                          std::to_string(kExactOracleCapacity) +
                          "; use heuristic mode");
  }
  return max_rectangle_exact(residual_matrix(x, fine));
}

inline Witness find_witness_heuristic(const RandomVariable& x,
                                      const std::vector<Partition>& fine,
                                      std::size_t restarts, std::uint64_t seed) {
  return max_rectangle_heuristic(residual_matrix(x, fine), restarts, seed);
}

}  // namespace reglab
