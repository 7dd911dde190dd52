#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reglab/error.hpp"
#include "reglab/graph/bipartite_graph.hpp"
#include "reglab/parallel.hpp"
#include "reglab/prob/partition.hpp"
#include "reglab/prob/random_variable.hpp"
#include "reglab/prob/sample_space.hpp"
#include "reglab/regularize/driver.hpp"
#include "reglab/regularize/witness.hpp"

namespace reglab {

struct ProductSpace {
  SpacePtr space;
  RandomVariable indicator;  // X = 1_E
};

// Omega = V1 x V2 under the uniform measure, the two projections as factor
// sides, and the edge indicator as the random variable.
inline ProductSpace build_product_space(const BipartiteGraph& g) {
  SpacePtr space = SampleSpace::uniform_product(g.n1(), g.n2());
  std::vector<double> x(g.n1() * g.n2(), 0.0);
  for (const auto& [u, v] : g.edges()) x[u * g.n2() + v] = 1.0;
  return {space, RandomVariable(space, std::move(x))};
}

// V_i = V_{i,0} u V_{i,1} u ... u V_{i,J}: J equal cells per side plus an
// exceptional set.
struct SzemerediPartition {
  std::size_t J = 0;
  double M_star = 0.0;
  std::array<std::size_t, 2> cell_size{};
  std::array<std::vector<std::vector<std::size_t>>, 2> cells;
  std::array<std::vector<std::size_t>, 2> exceptional;
  std::vector<std::vector<double>> densities;  // J x J
};

// Atom id of every vertex on `side`, from a side-measurable partition.
inline std::vector<std::size_t> vertex_atoms(const Partition& p, std::size_t side) {
  auto atoms = p.side_atoms(side);
  std::vector<std::size_t> out(atoms.size());
  for (std::size_t v = 0; v < atoms.size(); ++v) {
    if (!atoms[v]) throw StructuralError("vertex without outcomes");
    out[v] = *atoms[v];
  }
  return out;
}

// Cuts every coarse atom into consecutive runs of equal size (vertices in
// ascending order), keeping the first J runs per side. J is the nearest integer
// to 2^M* / epsilon with M* = max(min_complexity, exact complexity of the
// coarse partitions). The run length starts at floor(n_i / J) and shrinks only
// if the atoms cannot supply J runs of that length.
inline SzemerediPartition derive_vertex_partition(const BipartiteGraph& g,
                                                  const RegularizationResult& res,
                                                  double epsilon,
                                                  double min_complexity = 0.0) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw InputError("epsilon must lie in (0,1]");
  if (res.coarse.size() != 2)
    throw StructuralError("derive_vertex_partition: expected two coarse partitions");
  SzemerediPartition out;
  double m_star = min_complexity;
  for (const auto& c : res.coarse)
    m_star = std::max(m_star, static_cast<double>(c.exact_complexity()));
  out.M_star = m_star;
  const double j_real = std::exp2(m_star) / epsilon;
  if (!(j_real < 1e12))
    throw CapacityError("J = 2^" + std::to_string(m_star) + "/epsilon is too large");
  out.J = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(j_real)));
  const std::size_t J = out.J;
  const std::array<std::size_t, 2> n{g.n1(), g.n2()};

  for (std::size_t side = 0; side < 2; ++side) {
    if (n[side] < J)
      throw CapacityError("side " + std::to_string(side + 1) + " has " +
                          std::to_string(n[side]) + " vertices; J = " +
                          std::to_string(J) + " needs at least " +
                          std::to_string(J) + " per side");
    const auto atom = vertex_atoms(res.coarse[side], side);
    const std::size_t atom_count = res.coarse[side].atom_count();
    std::vector<std::vector<std::size_t>> groups(atom_count);
    for (std::size_t v = 0; v < n[side]; ++v) groups[atom[v]].push_back(v);

    std::size_t c = n[side] / J;
    auto runs = [&](std::size_t len) {
      std::size_t k = 0;
      for (const auto& grp : groups) k += grp.size() / len;
      return k;
    };
    while (c > 1 && runs(c) < J) --c;
    out.cell_size[side] = c;

    auto& cells = out.cells[side];
    auto& exc = out.exceptional[side];
    for (const auto& grp : groups) {
      std::size_t pos = 0;
      for (; pos + c <= grp.size(); pos += c) {
        if (cells.size() < J)
          cells.emplace_back(grp.begin() + pos, grp.begin() + pos + c);
        else
          exc.insert(exc.end(), grp.begin() + pos, grp.begin() + pos + c);
      }
      exc.insert(exc.end(), grp.begin() + pos, grp.end());
    }
    std::sort(exc.begin(), exc.end());
  }

  out.densities.assign(J, std::vector<double>(J, 0.0));
  const double area = static_cast<double>(out.cell_size[0] * out.cell_size[1]);
  for (std::size_t j1 = 0; j1 < J; ++j1)
    for (std::size_t j2 = 0; j2 < J; ++j2)
      out.densities[j1][j2] =
          static_cast<double>(g.count_edges(out.cells[0][j1], out.cells[1][j2])) / area;
  return out;
}

enum class PairStatus { regular, irregular, unchecked };

inline const char* to_string(PairStatus s) {
  switch (s) {
    case PairStatus::regular: return "regular";
    case PairStatus::irregular: return "irregular";
    case PairStatus::unchecked: return "unchecked";
  }
  return "?";
}

// Outcome of an epsilon-regularity query on one pair of vertex sets. The
// witness events hold vertex ids; `discrepancy` is the largest
// |e(A1,A2) - d|A1||A2|| found, divided by |cell1||cell2|.
struct PairVerdict {
  PairStatus status = PairStatus::unchecked;
  OracleMode mode = OracleMode::exact;
  double density = 0.0;
  double discrepancy = 0.0;
  std::optional<Witness> witness;
};

// Decides | |E n (A1 x A2)| - d|A1||A2| | <= epsilon |cell1||cell2| for all
// A1 in cell1, A2 in cell2, where d is the pair density.
inline PairVerdict check_pair_regularity(const BipartiteGraph& g,
                                         const std::vector<std::size_t>& cell1,
                                         const std::vector<std::size_t>& cell2,
                                         double epsilon, OracleMode mode,
                                         std::uint64_t seed,
                                         std::size_t restarts = 16) {
  if (cell1.empty() || cell2.empty())
    throw PreconditionError("check_pair_regularity: empty cell");
  PairVerdict verdict;
  verdict.mode = mode;
  const double area = static_cast<double>(cell1.size() * cell2.size());
  verdict.density = static_cast<double>(g.count_edges(cell1, cell2)) / area;
  if (mode == OracleMode::exact &&
      std::min(cell1.size(), cell2.size()) > kExactOracleCapacity) {
    verdict.status = PairStatus::unchecked;
    return verdict;
  }
  ResidualMatrix m(cell1.size(), cell2.size());
  for (std::size_t a = 0; a < cell1.size(); ++a)
    for (std::size_t b = 0; b < cell2.size(); ++b)
      m(a, b) = ((g.has_edge(cell1[a], cell2[b]) ? 1.0 : 0.0) - verdict.density) / area;
  Witness w = mode == OracleMode::exact ? max_rectangle_exact(m)
                                        : max_rectangle_heuristic(m, restarts, seed);
  verdict.discrepancy = std::abs(w.correlation);
  if (verdict.discrepancy > epsilon + kThresholdSlack) {
    verdict.status = PairStatus::irregular;
    for (auto& l : w.events[0]) l = cell1[l];
    for (auto& l : w.events[1]) l = cell2[l];
    verdict.witness = std::move(w);
  } else {
    verdict.status = PairStatus::regular;
  }
  return verdict;
}

enum class ReportCertificate { exact, heuristic, mixed };

inline const char* to_string(ReportCertificate c) {
  switch (c) {
    case ReportCertificate::exact: return "exact";
    case ReportCertificate::heuristic: return "heuristic";
    case ReportCertificate::mixed: return "mixed";
  }
  return "?";
}

struct PairRecord {
  std::size_t j1 = 0, j2 = 0;
  PairVerdict verdict;
  double proxy = 0.0;  // E(|E(1_E|fine) - E(1_E|coarse)|^2 1_{cell pair})
};

struct RegularityReport {
  double epsilon = 0.0;
  std::vector<PairRecord> pairs;  // row-major over (j1, j2)
  std::size_t irregular_pairs = 0;
  double irregular_fraction = 0.0;
  ReportCertificate certificate = ReportCertificate::exact;
  std::size_t proxy_failures = 0;  // pairs with proxy > epsilon^2 / J^2
  double exceptional_constant = 2.0;
  bool exceptional_within_bound = true;  // |V_{i,0}| <= C eps n_i, both sides
};

struct GraphPipelineOptions {
  double exceptional_constant = 2.0;
};

struct GraphRegularization {
  SzemerediPartition partition;
  RegularityReport report;
  RegularizationResult result;
  double driver_epsilon = 0.0;
};

// Regularizes 1_E on V1 x V2, derives the vertex partition and checks every
// cell pair (exactly where the cells fit the exact oracle, heuristically
// otherwise). With the paper-exp growth preset the driver runs at
// epsilon^(3/2) and F(M) = 2^(2M) / epsilon^3.
inline GraphRegularization regularize_graph(const BipartiteGraph& g,
                                            const RegularizationConfig& cfg,
                                            const GraphPipelineOptions& opts = {}) {
  cfg.validate();
  GraphRegularization out;
  RegularizationConfig driver_cfg = cfg;
  if (cfg.growth.kind() == GrowthFunction::Kind::paper_exponential) {
    driver_cfg.growth = GrowthFunction::paper_exponential(cfg.epsilon);
    driver_cfg.epsilon = std::pow(cfg.epsilon, 1.5);
  }
  out.driver_epsilon = driver_cfg.epsilon;

  const ProductSpace ps = build_product_space(g);
  out.result = regularize(ps.indicator, driver_cfg);
  out.partition = derive_vertex_partition(g, out.result, cfg.epsilon, cfg.m);
  const auto& P = out.partition;
  const std::size_t J = P.J;

  RegularityReport& rep = out.report;
  rep.epsilon = cfg.epsilon;
  rep.exceptional_constant = opts.exceptional_constant;
  const std::array<std::size_t, 2> n{g.n1(), g.n2()};
  for (std::size_t side = 0; side < 2; ++side)
    if (static_cast<double>(P.exceptional[side].size()) >
        opts.exceptional_constant * cfg.epsilon * static_cast<double>(n[side]))
      rep.exceptional_within_bound = false;

  const RandomVariable gap =
      conditional_expectation(ps.indicator, join(out.result.fine)) -
      conditional_expectation(ps.indicator, join(out.result.coarse));
  const double w = 1.0 / static_cast<double>(g.n1() * g.n2());
  const double proxy_threshold =
      cfg.epsilon * cfg.epsilon / static_cast<double>(J * J);

  rep.pairs.resize(J * J);
  parallel_for(J * J, [&](std::size_t idx) {
    PairRecord& rec = rep.pairs[idx];
    rec.j1 = idx / J;
    rec.j2 = idx % J;
    const auto& c1 = P.cells[0][rec.j1];
    const auto& c2 = P.cells[1][rec.j2];
    const std::uint64_t pair_seed = detail::splitmix64(cfg.seed ^ detail::splitmix64(idx));
    rec.verdict = check_pair_regularity(g, c1, c2, cfg.epsilon, OracleMode::exact,
                                        pair_seed, cfg.heuristic_restarts);
    if (rec.verdict.status == PairStatus::unchecked)
      rec.verdict = check_pair_regularity(g, c1, c2, cfg.epsilon,
                                          OracleMode::heuristic, pair_seed,
                                          cfg.heuristic_restarts);
    double s = 0.0;
    for (std::size_t u : c1)
      for (std::size_t v : c2) {
        const double d = gap[u * g.n2() + v];
        s += w * d * d;
      }
    rec.proxy = s;
  });

  bool any_exact = out.result.certificate == Certificate::exact;
  bool any_heuristic = !any_exact;
  for (const auto& rec : rep.pairs) {
    if (rec.verdict.status == PairStatus::irregular) ++rep.irregular_pairs;
    if (rec.proxy > proxy_threshold) ++rep.proxy_failures;
    (rec.verdict.mode == OracleMode::exact ? any_exact : any_heuristic) = true;
  }
  rep.irregular_fraction =
      static_cast<double>(rep.irregular_pairs) / static_cast<double>(J * J);
  rep.certificate = any_exact && any_heuristic ? ReportCertificate::mixed
                    : any_exact                ? ReportCertificate::exact
                                               : ReportCertificate::heuristic;
  return out;
}

}  // namespace reglab
