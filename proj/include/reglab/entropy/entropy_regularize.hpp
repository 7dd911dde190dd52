#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "reglab/entropy/information.hpp"
#include "reglab/entropy/set_partitions.hpp"
#include "reglab/error.hpp"
#include "reglab/parallel.hpp"
#include "reglab/regularize/growth.hpp"

namespace reglab {

// Largest range of X_i the exhaustive minimizer accepts (Bell(6) = 203
// coarsenings per side).
inline constexpr std::size_t kEntropyAlphabetCapacity = 6;

// Ties in the minimization are broken toward the canonically first pair unless
// a later pair improves by more than this.
inline constexpr double kObjectiveTieTolerance = 1e-12;

struct EntropyStep {
  double growth;               // F(H(Z1,Z2))
  double coarse_entropy;       // H(Z1,Z2)
  double fine_entropy;         // H(Z'1,Z'2)
  double residual_coarse;      // H(Y|Z1,Z2)
  double residual_fine;        // H(Y|Z'1,Z'2)
  double objective;            // minimized objective at (Z'1,Z'2)
  double incumbent_objective;  // same objective at (Z1,Z2)
};

struct EntropyRegularizationResult {
  std::vector<DiscreteRV> Z;   // coarse pair
  std::vector<DiscreteRV> Zp;  // fine pair
  // Over the compact range of X_i: range[i][r] is the original symbol, and
  // coarse_blocks / fine_blocks give the block of every range element.
  std::array<std::vector<std::size_t>, 2> range;
  std::array<BlockLabels, 2> coarse_blocks, fine_blocks;
  std::size_t iterations = 0;  // returns from Step 2 to Step 1
  std::vector<double> objective_trace;
  std::vector<EntropyStep> steps;
};

namespace detail {

// Joint law of (X1, X2, Y) over compact ranges.
struct JointTable {
  std::size_t k1 = 0, k2 = 0, ky = 0;
  std::vector<double> p;  // index (a * k2 + b) * ky + y
};

inline std::vector<std::size_t> compact_range(const DiscreteRV& x,
                                              std::vector<std::size_t>& index) {
  std::vector<char> used(x.alphabet_size(), 0);
  for (std::size_t s : x.symbols()) used[s] = 1;
  std::vector<std::size_t> range;
  index.assign(x.alphabet_size(), SIZE_MAX);
  for (std::size_t s = 0; s < used.size(); ++s)
    if (used[s]) {
      index[s] = range.size();
      range.push_back(s);
    }
  return range;
}

struct Evaluation {
  double residual;  // H(Y | Z1, Z2)
  double entropy;   // H(Z1, Z2)
};

inline Evaluation evaluate(const JointTable& t, const BlockLabels& f1,
                           const BlockLabels& f2) {
  const std::size_t b1 = block_count(f1), b2 = block_count(f2);
  std::vector<double> zy(b1 * b2 * t.ky, 0.0), z(b1 * b2, 0.0);
  for (std::size_t a = 0; a < t.k1; ++a)
    for (std::size_t b = 0; b < t.k2; ++b) {
      const std::size_t cell = f1[a] * b2 + f2[b];
      for (std::size_t y = 0; y < t.ky; ++y) {
        const double p = t.p[(a * t.k2 + b) * t.ky + y];
        zy[cell * t.ky + y] += p;
        z[cell] += p;
      }
    }
  const double hz = entropy_of(z);
  return {entropy_of(zy) - hz, hz};
}

}  // namespace detail

// Entropy incrementation:
//   Step 0: Z1 = Z2 = constant.
//   Step 1: (Z'1, Z'2) minimizes H(Y|Z'1,Z'2) + H(Z'1,Z'2) / F(H(Z1,Z2)) over
//           all X_i -> Z'_i -> Z_i, i.e. all coarsenings of X_i refining Z_i.
//   Step 2: if H(Y|Z1,Z2) - H(Y|Z'1,Z'2) > epsilon, set Z = Z' and repeat.
inline EntropyRegularizationResult entropy_regularize(const DiscreteRV& x1,
                                                      const DiscreteRV& x2,
                                                      const DiscreteRV& y,
                                                      double epsilon, double m,
                                                      const GrowthFunction& growth) {
  require_same_base(x1, x2);
  require_same_base(x1, y);
  if (!(epsilon > 0.0)) throw InputError("entropy_regularize: epsilon must be positive");
  if (!(m >= 0.0)) throw InputError("entropy_regularize: m must be nonnegative");
  const double hy = entropy(y);
  if (hy > m + 1e-12)
    throw PreconditionError("entropy_regularize: H(Y) = " + std::to_string(hy) +
                            " exceeds m = " + std::to_string(m));

  EntropyRegularizationResult res;
  std::vector<std::size_t> idx1, idx2, idxy;
  res.range[0] = detail::compact_range(x1, idx1);
  res.range[1] = detail::compact_range(x2, idx2);
  const auto yrange = detail::compact_range(y, idxy);
  for (std::size_t i = 0; i < 2; ++i)
    if (res.range[i].size() > kEntropyAlphabetCapacity)
      throw CapacityError("entropy_regularize: X" + std::to_string(i + 1) + " takes " +
                          std::to_string(res.range[i].size()) +
                          " values, capacity is " +
                          std::to_string(kEntropyAlphabetCapacity));

  detail::JointTable t;
  t.k1 = res.range[0].size();
  t.k2 = res.range[1].size();
  t.ky = yrange.size();
  t.p.assign(t.k1 * t.k2 * t.ky, 0.0);
  const SpacePtr& base = x1.base();
  for (std::size_t k = 0; k < base->size(); ++k)
    t.p[(idx1[x1[k]] * t.k2 + idx2[x2[k]]) * t.ky + idxy[y[k]]] += base->weight(k);

  BlockLabels z1(t.k1, 0), z2(t.k2, 0);
  for (;;) {
    const auto incumbent = detail::evaluate(t, z1, z2);
    const double F = growth(incumbent.entropy);
    if (!(F > 0.0) || !std::isfinite(F))
      throw InputError("entropy_regularize: growth function must be positive and finite");
    const auto cand1 = refinements_of(z1);
    const auto cand2 = refinements_of(z2);

    // Best pair per row of candidates, then reduce rows in order.
    struct Best {
      double objective = std::numeric_limits<double>::infinity();
      std::size_t j = 0;
      detail::Evaluation eval{};
    };
    std::vector<Best> rows(cand1.size());
    parallel_for(cand1.size(), [&](std::size_t i) {
      Best b;
      for (std::size_t j = 0; j < cand2.size(); ++j) {
        const auto e = detail::evaluate(t, cand1[i], cand2[j]);
        const double obj = e.residual + e.entropy / F;
        if (obj < b.objective - kObjectiveTieTolerance) b = {obj, j, e};
      }
      rows[i] = b;
    });
    std::size_t bi = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].objective < rows[bi].objective - kObjectiveTieTolerance) bi = i;
    const Best& best = rows[bi];

    EntropyStep step{F,
                     incumbent.entropy,
                     best.eval.entropy,
                     incumbent.residual,
                     best.eval.residual,
                     best.objective,
                     incumbent.residual + incumbent.entropy / F};
    res.steps.push_back(step);
    res.objective_trace.push_back(best.objective);

    const BlockLabels& f1 = cand1[bi];
    const BlockLabels& f2 = cand2[best.j];
    if (incumbent.residual - best.eval.residual > epsilon) {
      z1 = f1;
      z2 = f2;
      ++res.iterations;
      continue;
    }
    res.coarse_blocks = {z1, z2};
    res.fine_blocks = {f1, f2};
    break;
  }

  auto lift = [&](const DiscreteRV& x, const std::vector<std::size_t>& index,
                  const BlockLabels& blocks) {
    std::vector<std::size_t> sym(x.size());
    for (std::size_t k = 0; k < sym.size(); ++k) sym[k] = blocks[index[x[k]]];
    return DiscreteRV(x.base(), std::move(sym));
  };
  res.Z = {lift(x1, idx1, res.coarse_blocks[0]), lift(x2, idx2, res.coarse_blocks[1])};
  res.Zp = {lift(x1, idx1, res.fine_blocks[0]), lift(x2, idx2, res.fine_blocks[1])};
  return res;
}

// Post-hoc check of the four conclusions on a finished run, computed from the
// DiscreteRV calculus rather than the minimizer's table.
struct EntropyCertificate {
  bool determinism = false;  // X_i -> Z'_i -> Z_i
  double coarse_entropy = 0.0;
  double fine_entropy = 0.0;
  double fine_entropy_bound = 0.0;  // H(Z) + m F(H(Z))
  double closeness = 0.0;           // I(Y : Z'1,Z'2 | Z1,Z2)
  double worst_optimality_slack = 0.0;  // max over W of I(Y:W|Z') - H(W)/F(H(Z))
  std::size_t competitors_checked = 0;
};

inline EntropyCertificate verify_entropy_regularization(
    const DiscreteRV& x1, const DiscreteRV& x2, const DiscreteRV& y,
    const EntropyRegularizationResult& res, double m, const GrowthFunction& growth) {
  EntropyCertificate c;
  c.determinism = determines(x1, res.Zp[0]) && determines(res.Zp[0], res.Z[0]) &&
                  determines(x2, res.Zp[1]) && determines(res.Zp[1], res.Z[1]);
  const DiscreteRV z = joint(res.Z[0], res.Z[1]);
  const DiscreteRV zp = joint(res.Zp[0], res.Zp[1]);
  c.coarse_entropy = entropy(z);
  c.fine_entropy = entropy(zp);
  const double F = growth(c.coarse_entropy);
  c.fine_entropy_bound = c.coarse_entropy + m * F;
  c.closeness = conditional_mutual_information(y, zp, z);

  std::vector<std::size_t> idx1, idx2;
  detail::compact_range(x1, idx1);
  detail::compact_range(x2, idx2);
  const auto w1s = all_set_partitions(res.range[0].size());
  const auto w2s = all_set_partitions(res.range[1].size());
  auto lift = [](const DiscreteRV& x, const std::vector<std::size_t>& index,
                 const BlockLabels& blocks) {
    std::vector<std::size_t> sym(x.size());
    for (std::size_t k = 0; k < sym.size(); ++k) sym[k] = blocks[index[x[k]]];
    return DiscreteRV(x.base(), std::move(sym));
  };
  c.worst_optimality_slack = -std::numeric_limits<double>::infinity();
  for (const auto& a : w1s) {
    const DiscreteRV w1 = lift(x1, idx1, a);
    for (const auto& b : w2s) {
      const DiscreteRV w = joint(w1, lift(x2, idx2, b));
      const double slack = conditional_mutual_information(y, w, zp) - entropy(w) / F;
      c.worst_optimality_slack = std::max(c.worst_optimality_slack, slack);
      ++c.competitors_checked;
    }
  }
  return c;
}

}  // namespace reglab
