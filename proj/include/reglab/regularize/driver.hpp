#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reglab/error.hpp"
#include "reglab/prob/partition.hpp"
#include "reglab/prob/random_variable.hpp"
#include "reglab/regularize/growth.hpp"
#include "reglab/regularize/witness.hpp"

namespace reglab {

// Slack on the "correlation exceeds 1/F(M)" comparison.
inline constexpr double kThresholdSlack = 1e-12;

struct RegularizationConfig {
  double epsilon = 0.1;
  double m = 0.0;
  GrowthFunction growth = GrowthFunction::linear();
  OracleMode oracle_mode = OracleMode::exact;
  std::size_t heuristic_restarts = 16;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw InputError("epsilon must lie in (0,1], got " + std::to_string(epsilon));
    if (!(m >= 0.0) || !std::isfinite(m))
      throw InputError("m must be a finite nonnegative number");
    if (heuristic_restarts == 0)
      throw InputError("heuristic_restarts must be positive");
  }
};

enum class Certificate { exact, heuristic };

inline const char* to_string(Certificate c) {
  return c == Certificate::exact ? "exact" : "heuristic";
}

struct HistoryEvent {
  enum class Kind { outer, refine, promote, halt };
  Kind kind;
  double energy;       // energy of the join of the fine partitions afterwards
  double M;
  double correlation;  // witness correlation driving the event, if any
};

inline const char* to_string(HistoryEvent::Kind k) {
  switch (k) {
    case HistoryEvent::Kind::outer: return "outer";
    case HistoryEvent::Kind::refine: return "refine";
    case HistoryEvent::Kind::promote: return "promote";
    case HistoryEvent::Kind::halt: return "halt";
  }
  return "?";
}

struct RegularizationResult {
  std::vector<Partition> coarse;
  std::vector<Partition> fine;
  double M = 0.0;
  std::size_t iterations_outer = 0;
  std::size_t iterations_inner_total = 0;
  std::vector<std::size_t> inner_per_pass;  // refinements in each outer pass
  std::vector<double> M_trace;              // M at every entry to Step 1
  Certificate certificate = Certificate::exact;
  double halting_correlation = 0.0;  // bound on |correlation| at halt
  double threshold = 0.0;            // 1/F(M) at halt
  std::vector<HistoryEvent> history;
};

// B''_i = B'_i v {A_i, complement}: one extra generator per side.
inline std::vector<Partition> refine_by_witness(const std::vector<Partition>& fine,
                                                const Witness& w) {
  if (fine.empty() || w.events.size() != fine.size())
    throw StructuralError("refine_by_witness: " + std::to_string(w.events.size()) +
                          " events for " + std::to_string(fine.size()) + " sides");
  const SpacePtr& space = fine.front().space();
  std::vector<Partition> out;
  out.reserve(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const FactorSide& fs = space->side(i);
    std::vector<std::size_t> inside(fs.label_count, 0);
    for (std::size_t l : w.events[i]) {
      if (l >= fs.label_count)
        throw InputError("refine_by_witness: label " + std::to_string(l) +
                         " not in side " + std::to_string(i));
      inside[l] = 1;
    }
    out.push_back(join(fine[i], Partition::from_side(space, i, inside, 1)));
  }
  return out;
}

// Upper bound on the final M: `passes` iterations of M -> M + F(M)^2/eps^2 + 1
// starting from m.
inline double complexity_ceiling(double m, double epsilon,
                                 const GrowthFunction& growth,
                                 std::size_t passes) {
  double M = m;
  for (std::size_t i = 0; i < passes && std::isfinite(M); ++i) {
    const double f = growth(M);
    M = M + f * f / (epsilon * epsilon) + 1.0;
  }
  return M;
}

inline std::size_t outer_pass_limit(double epsilon) {
  return static_cast<std::size_t>(std::floor(1.0 / (epsilon * epsilon) + 1e-12));
}

// Energy-increment double loop. `oracle(x, fine)` must return a witness whose
// |correlation| is maximal (exact certificate) or as large as it can find
// (heuristic certificate).
//
//   Step 0: every B_i = B'_i = trivial.
//   Step 1: M = max(m, max_i generator_count(B_i)).
//   Step 2: halt if no witness beats 1/F(M); else refine B' along it.
//   Step 3: if energy(v B'') <= energy(v B) + eps^2 keep refining B'
//           (back to Step 2); otherwise promote B = B' = B'' (back to Step 1).
template <class Oracle>
RegularizationResult regularize(const RandomVariable& x,
                                const RegularizationConfig& cfg,
                                Certificate oracle_certificate, Oracle&& oracle) {
  cfg.validate();
  const SpacePtr& space = x.space();
  if (space->side_count() < 2)
    throw StructuralError("regularize: sample space needs at least two factor sides");
  if (x.norm2() > 1.0 + 1e-12)
    throw PreconditionError("regularize: ||x||_2 = " + std::to_string(x.norm2()) +
                            " exceeds 1");

  const double eps2 = cfg.epsilon * cfg.epsilon;
  RegularizationResult res;
  for (std::size_t i = 0; i < space->side_count(); ++i)
    res.coarse.push_back(Partition::trivial(space, i));
  res.fine = res.coarse;

  for (;;) {
    // Step 1
    double M = cfg.m;
    for (const auto& b : res.coarse)
      M = std::max(M, static_cast<double>(b.generator_count()));
    res.M = M;
    res.M_trace.push_back(M);
    const double threshold = 1.0 / cfg.growth(M);
    const double coarse_energy = energy(x, join(res.coarse));
    res.history.push_back({HistoryEvent::Kind::outer, coarse_energy, M, 0.0});
    res.inner_per_pass.push_back(0);

    for (;;) {
      // Step 2. |E(D * prod 1_A)| <= E|D|, so a small residual certifies
      // accuracy without a search.
      const RandomVariable residual =
          x - conditional_expectation(x, join(res.fine));
      const double l1 = residual.norm1();
      Witness w;
      Certificate cert = Certificate::exact;
      if (l1 <= threshold + kThresholdSlack) {
        w.correlation = l1;
      } else {
        w = oracle(x, res.fine);
        cert = oracle_certificate;
      }
      if (!(std::abs(w.correlation) > threshold + kThresholdSlack)) {
        res.certificate = cert;
        res.halting_correlation = std::abs(w.correlation);
        res.threshold = threshold;
        res.history.push_back({HistoryEvent::Kind::halt,
                               energy(x, join(res.fine)), M, w.correlation});
        return res;
      }
      std::vector<Partition> refined = refine_by_witness(res.fine, w);
      const double refined_energy = energy(x, join(refined));
      ++res.inner_per_pass.back();
      ++res.iterations_inner_total;
      // Step 3
      if (refined_energy <= coarse_energy + eps2) {
        res.fine = std::move(refined);
        res.history.push_back(
            {HistoryEvent::Kind::refine, refined_energy, M, w.correlation});
        continue;
      }
      res.coarse = refined;
      res.fine = std::move(refined);
      ++res.iterations_outer;
      res.history.push_back(
          {HistoryEvent::Kind::promote, refined_energy, M, w.correlation});
      break;
    }
  }
}

// Built-in oracles; they handle the two-sided (bipartite) case.
inline RegularizationResult regularize(const RandomVariable& x,
                                       const RegularizationConfig& cfg) {
  if (x.space()->side_count() != 2)
    throw StructuralError(
        "regularize: built-in witness oracles need exactly two factor sides; "
        "pass a custom oracle for more");
  if (cfg.oracle_mode == OracleMode::exact)
    return regularize(x, cfg, Certificate::exact,
                      [](const RandomVariable& v, const std::vector<Partition>& f) {
                        return find_witness_exact(v, f);
                      });
  std::uint64_t call = 0;
  return regularize(x, cfg, Certificate::heuristic,
                    [&](const RandomVariable& v, const std::vector<Partition>& f) {
                      return find_witness_heuristic(v, f, cfg.heuristic_restarts,
                                                    cfg.seed + 0x632be59bd9b4e019ULL * call++);
                    });
}

}  // namespace reglab
