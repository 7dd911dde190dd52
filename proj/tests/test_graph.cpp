#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reglab/graph/bipartite_graph.hpp"
#include "reglab/graph/report.hpp"
#include "reglab/graph/szemeredi.hpp"

using namespace reglab;

namespace {

const std::string kFixtures = REGLAB_FIXTURE_DIR;

BipartiteGraph half_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return BipartiteGraph(n, n, e);
}

BipartiteGraph block_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < n / 2; ++u)
    for (std::size_t v = 0; v < n / 2; ++v) e.emplace_back(u, v);
  return BipartiteGraph(n, n, e);
}

RegularizationResult with_coarse(const SpacePtr& s, const std::vector<std::size_t>& side0,
                                 const std::vector<std::size_t>& side1) {
  RegularizationResult r;
  r.coarse = {Partition::from_side(s, 0, side0), Partition::from_side(s, 1, side1)};
  r.fine = r.coarse;
  return r;
}

void expect_partition_invariants(const BipartiteGraph& g, const RegularizationResult& res,
                                 const SzemerediPartition& P, double eps) {
  const std::size_t n[2] = {g.n1(), g.n2()};
  for (std::size_t side = 0; side < 2; ++side) {
    ASSERT_EQ(P.cells[side].size(), P.J);
    std::vector<int> seen(n[side], 0);
    const auto atoms = vertex_atoms(res.coarse[side], side);
    for (const auto& cell : P.cells[side]) {
      EXPECT_EQ(cell.size(), P.cell_size[side]);
      for (auto v : cell) {
        ++seen[v];
        EXPECT_EQ(atoms[v], atoms[cell.front()]) << "cell crosses a coarse atom";
      }
    }
    for (auto v : P.exceptional[side]) ++seen[v];
    for (auto c : seen) EXPECT_EQ(c, 1);
    const double J = static_cast<double>(P.J);
    EXPECT_LE(static_cast<double>(P.exceptional[side].size()),
              eps * n[side] + std::exp2(P.M_star) * n[side] / J + J);
  }
  // density consistency
  double inside = 0.0;
  for (std::size_t a = 0; a < P.J; ++a)
    for (std::size_t b = 0; b < P.J; ++b) {
      EXPECT_GE(P.densities[a][b], 0.0);
      EXPECT_LE(P.densities[a][b], 1.0);
      inside += P.densities[a][b] * static_cast<double>(P.cell_size[0] * P.cell_size[1]);
    }
  std::set<std::size_t> x0(P.exceptional[0].begin(), P.exceptional[0].end());
  std::set<std::size_t> x1(P.exceptional[1].begin(), P.exceptional[1].end());
  std::size_t touching = 0;
  for (const auto& [u, v] : g.edges()) touching += (x0.count(u) || x1.count(v)) ? 1 : 0;
  EXPECT_NEAR(inside + static_cast<double>(touching), static_cast<double>(g.edge_count()), 1e-9);
}

}  // namespace

// --- input ---------------------------------------------------------------------

TEST(GraphIO, EdgeListWithComments) {
  std::istringstream in("# header next\n3 2\n0 1 # first\n\n2 0\n");
  auto g = read_edge_list(in);
  EXPECT_EQ(g.n1(), 3u);
  EXPECT_EQ(g.n2(), 2u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.has_edge(2, 0));
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream back(out.str());
  EXPECT_EQ(read_edge_list(back).edges(), g.edges());
}

TEST(GraphIO, EdgeListErrors) {
  std::istringstream dup("2 2\n0 1\n0 1\n");
  EXPECT_THROW(read_edge_list(dup), InputError);
  std::istringstream range("2 2\n0 2\n");
  EXPECT_THROW(read_edge_list(range), InputError);
  std::istringstream junk("2 2\n0 x\n");
  EXPECT_THROW(read_edge_list(junk), InputError);
  std::istringstream empty("0 3\n");
  EXPECT_THROW(read_edge_list(empty), InputError);
  std::istringstream none("");
  EXPECT_THROW(read_edge_list(none), InputError);
}

TEST(GraphIO, Matrix) {
  std::istringstream in("2 3\n101\n010\n");
  auto g = read_matrix(in);
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 0}, {0, 2}, {1, 1}}));
  std::istringstream bad("2 3\n1a1\n010\n");
  EXPECT_THROW(read_matrix(bad), InputError);
  std::istringstream short_rows("2 3\n101\n");
  EXPECT_THROW(read_matrix(short_rows), InputError);
  std::istringstream wide("1 2\n101\n");
  EXPECT_THROW(read_matrix(wide), InputError);
}

TEST(GraphIO, FixturesAgree) {
  auto a = load_graph(kFixtures + "/half_graph_8x8.txt", GraphFormat::edgelist);
  auto b = load_graph(kFixtures + "/half_graph_8x8.mat", GraphFormat::matrix);
  EXPECT_EQ(a.edges(), b.edges());
  EXPECT_EQ(a.edges(), half_graph(8).edges());
  EXPECT_THROW(load_graph(kFixtures + "/missing.txt", GraphFormat::edgelist), InputError);
}

// --- product space ---------------------------------------------------------------

TEST(ProductSpace, Examples) {
  auto one = build_product_space(BipartiteGraph(1, 1, {{0, 0}}));
  EXPECT_EQ(one.space->size(), 1u);
  EXPECT_EQ(one.indicator[0], 1.0);

  auto empty = build_product_space(BipartiteGraph(3, 3, {}));
  EXPECT_EQ(empty.space->size(), 9u);
  EXPECT_EQ(empty.indicator.mean(), 0.0);
  EXPECT_EQ(empty.indicator.norm1(), 0.0);

  auto diag = build_product_space(BipartiteGraph(2, 2, {{0, 0}, {1, 1}}));
  EXPECT_DOUBLE_EQ(diag.indicator.mean(), 0.5);
  EXPECT_DOUBLE_EQ(diag.space->weight(3), 0.25);
  EXPECT_EQ(diag.space->side_count(), 2u);

  EXPECT_THROW(BipartiteGraph(0, 3, {}), InputError);
}

// --- vertex partition --------------------------------------------------------------

TEST(VertexPartition, TrivialCoarse) {
  BipartiteGraph g(7, 8, {{0, 0}, {6, 7}, {3, 3}});
  auto s = build_product_space(g).space;
  auto res = with_coarse(s, std::vector<std::size_t>(7, 0), std::vector<std::size_t>(8, 0));
  auto P = derive_vertex_partition(g, res, 0.5);
  EXPECT_EQ(P.J, 2u);
  EXPECT_EQ(P.cells[0], (std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3, 4, 5}}));
  EXPECT_EQ(P.exceptional[0], std::vector<std::size_t>{6});
  EXPECT_EQ(P.exceptional[1].size(), 0u);
  EXPECT_EQ(P.cell_size[1], 4u);
  expect_partition_invariants(g, res, P, 0.5);
}

TEST(VertexPartition, AlignedAtomsLeaveNoRemainder) {
  BipartiteGraph g(8, 8, {});
  auto s = build_product_space(g).space;
  auto res = with_coarse(s, {0, 0, 0, 0, 1, 1, 1, 1}, {0, 1, 0, 1, 0, 1, 0, 1});
  auto P = derive_vertex_partition(g, res, 0.5);
  EXPECT_EQ(P.J, 4u);
  EXPECT_TRUE(P.exceptional[0].empty());
  EXPECT_TRUE(P.exceptional[1].empty());
  EXPECT_EQ(P.cells[1][0], (std::vector<std::size_t>{0, 2}));
  expect_partition_invariants(g, res, P, 0.5);
}

TEST(VertexPartition, AtomOfSevenWithCellsOfThree) {
  BipartiteGraph g(13, 13, {{0, 0}, {6, 12}});
  auto s = build_product_space(g).space;
  std::vector<std::size_t> side0(13, 1);
  for (std::size_t v = 0; v < 7; ++v) side0[v] = 0;
  auto res = with_coarse(s, side0, std::vector<std::size_t>(13, 0));
  auto P = derive_vertex_partition(g, res, 0.5);
  EXPECT_EQ(P.J, 4u);
  EXPECT_EQ(P.cell_size[0], 3u);
  EXPECT_EQ(P.cells[0][0], (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(P.cells[0][1], (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(P.exceptional[0], std::vector<std::size_t>{6});
  expect_partition_invariants(g, res, P, 0.5);
}

TEST(VertexPartition, SurplusCellsDemoted) {
  BipartiteGraph g(6, 6, {});
  auto s = build_product_space(g).space;
  auto res = with_coarse(s, {0, 0, 0, 1, 1, 1}, std::vector<std::size_t>(6, 0));
  auto P = derive_vertex_partition(g, res, 0.5);  // J = 4, cells of 1, six runs
  EXPECT_EQ(P.J, 4u);
  EXPECT_EQ(P.cells[0], (std::vector<std::vector<std::size_t>>{{0}, {1}, {2}, {3}}));
  EXPECT_EQ(P.exceptional[0], (std::vector<std::size_t>{4, 5}));
  expect_partition_invariants(g, res, P, 0.5);
}

TEST(VertexPartition, MinComplexityRaisesJ) {
  BipartiteGraph g(16, 16, {});
  auto s = build_product_space(g).space;
  auto res = with_coarse(s, std::vector<std::size_t>(16, 0), std::vector<std::size_t>(16, 0));
  EXPECT_EQ(derive_vertex_partition(g, res, 0.5, 2.0).J, 8u);
}

TEST(VertexPartition, SideTooSmall) {
  BipartiteGraph g(3, 8, {});
  auto s = build_product_space(g).space;
  auto res = with_coarse(s, {0, 1, 2}, std::vector<std::size_t>(8, 0));
  EXPECT_THROW(derive_vertex_partition(g, res, 0.5), CapacityError);  // J = 8
}

// --- pair regularity ------------------------------------------------------------------

TEST(PairRegularity, CompletePairIsRegular) {
  std::vector<Edge> e;
  for (std::size_t u = 0; u < 5; ++u)
    for (std::size_t v = 0; v < 4; ++v) e.emplace_back(u, v);
  BipartiteGraph g(5, 4, e);
  for (double eps : {1e-6, 0.01, 0.5}) {
    auto v = check_pair_regularity(g, {0, 1, 2, 3, 4}, {0, 1, 2, 3}, eps, OracleMode::exact, 0);
    EXPECT_EQ(v.status, PairStatus::regular);
    EXPECT_EQ(v.density, 1.0);
    EXPECT_EQ(v.discrepancy, 0.0);
  }
}

TEST(PairRegularity, HalfGraphIrregular) {
  auto g = half_graph(8);
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6, 7};
  auto v = check_pair_regularity(g, all, all, 0.1, OracleMode::exact, 0);
  ASSERT_EQ(v.status, PairStatus::irregular);
  ASSERT_TRUE(v.witness.has_value());
  const auto& a1 = v.witness->events[0];
  const auto& a2 = v.witness->events[1];
  const double d = 28.0 / 64.0;
  const double dev = std::abs(static_cast<double>(g.count_edges(a1, a2)) -
                              d * static_cast<double>(a1.size() * a2.size()));
  EXPECT_GT(dev, 0.1 * 64);
  EXPECT_NEAR(dev / 64.0, v.discrepancy, 1e-12);
  auto has = [&](std::size_t a, std::size_t b) { return g.has_edge(a, b); };
  EXPECT_NEAR(v.discrepancy, oracle::brute_pair_discrepancy(all, all, has), 1e-12);
  // a triangular witness: a prefix of rows against a suffix of columns
  EXPECT_EQ(a1, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(a2, (std::vector<std::size_t>{3, 4, 5, 6, 7}));
}

TEST(PairRegularity, RandomSixBySixMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto g = random_bipartite(6, 6, 0.5, seed);
    std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
    auto has = [&](std::size_t a, std::size_t b) { return g.has_edge(a, b); };
    const double truth = oracle::brute_pair_discrepancy(all, all, has);
    for (double eps : {0.02, 0.05, 0.08, 0.12, 0.2}) {
      if (std::abs(truth - eps) < 1e-9) continue;
      auto v = check_pair_regularity(g, all, all, eps, OracleMode::exact, seed);
      EXPECT_EQ(v.status == PairStatus::irregular, truth > eps) << seed << " " << eps;
      EXPECT_NEAR(v.discrepancy, truth, 1e-12);
      auto h = check_pair_regularity(g, all, all, eps, OracleMode::heuristic, seed);
      EXPECT_LE(h.discrepancy, truth + 1e-12);
    }
  }
}

TEST(PairRegularity, SmallCellsAgreeWithEnumeration) {
  std::mt19937_64 rng(77);
  auto g = random_bipartite(10, 10, 0.4, 3);
  auto has = [&](std::size_t a, std::size_t b) { return g.has_edge(a, b); };
  for (int t = 0; t < 40; ++t) {
    std::vector<std::size_t> verts{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::shuffle(verts.begin(), verts.end(), rng);
    const std::size_t k1 = 1 + rng() % 6, k2 = 1 + rng() % (12 - k1 > 6 ? 6 : 12 - k1);
    std::vector<std::size_t> c1(verts.begin(), verts.begin() + k1);
    std::shuffle(verts.begin(), verts.end(), rng);
    std::vector<std::size_t> c2(verts.begin(), verts.begin() + k2);
    auto v = check_pair_regularity(g, c1, c2, 0.1, OracleMode::exact, 0);
    const double truth = oracle::brute_pair_discrepancy(c1, c2, has);
    EXPECT_NEAR(v.discrepancy, truth, 1e-12);
    if (std::abs(truth - 0.1) > 1e-9) {
      EXPECT_EQ(v.status == PairStatus::irregular, truth > 0.1);
    }
  }
}

TEST(PairRegularity, OverCapacityIsUnchecked) {
  std::vector<std::size_t> big(25);
  for (std::size_t i = 0; i < 25; ++i) big[i] = i;
  auto g = random_bipartite(25, 25, 0.5, 9);
  auto v = check_pair_regularity(g, big, big, 0.1, OracleMode::exact, 0);
  EXPECT_EQ(v.status, PairStatus::unchecked);
  EXPECT_THROW(check_pair_regularity(g, {}, big, 0.1, OracleMode::exact, 0), PreconditionError);
}

// --- pipeline -------------------------------------------------------------------------------

TEST(Pipeline, EmptyGraph) {
  BipartiteGraph g(8, 8, {});
  RegularizationConfig cfg;
  cfg.epsilon = 0.5;
  auto run = regularize_graph(g, cfg);
  EXPECT_EQ(run.partition.J, 2u);
  for (const auto& rec : run.report.pairs) {
    EXPECT_EQ(rec.verdict.status, PairStatus::regular);
    EXPECT_EQ(rec.verdict.density, 0.0);
  }
  EXPECT_EQ(run.report.irregular_fraction, 0.0);
  EXPECT_EQ(run.report.certificate, ReportCertificate::exact);
}

TEST(Pipeline, BlockGraph) {
  auto g = block_graph(40);  // J = 20 at epsilon 0.1
  RegularizationConfig cfg;
  cfg.epsilon = 0.1;
  cfg.growth = GrowthFunction::linear(10, 10);
  cfg.oracle_mode = OracleMode::heuristic;  // 40 labels per side
  auto run = regularize_graph(g, cfg);
  EXPECT_EQ(run.report.irregular_fraction, 0.0);
  for (const auto& row : run.partition.densities)
    for (double d : row) EXPECT_TRUE(d == 0.0 || d == 1.0);
  for (const auto& rec : run.report.pairs) EXPECT_EQ(rec.verdict.status, PairStatus::regular);
  EXPECT_EQ(run.partition.J, 20u);
  EXPECT_TRUE(run.report.exceptional_within_bound);
  // zero residual certifies the halt without a search
  EXPECT_EQ(run.result.certificate, Certificate::exact);
  expect_partition_invariants(g, run.result, run.partition, cfg.epsilon);
}

TEST(Pipeline, RandomSixteen) {
  auto g = load_graph(kFixtures + "/gnp_16x16.txt", GraphFormat::edgelist);
  auto has = [&](std::size_t a, std::size_t b) { return g.has_edge(a, b); };
  RegularizationConfig cfg;
  cfg.epsilon = 0.25;
  for (double m : {0.0, 2.0}) {
    cfg.m = m;
    auto run = regularize_graph(g, cfg);
    const auto& P = run.partition;
    expect_partition_invariants(g, run.result, P, cfg.epsilon);
    std::size_t checked = 0, irregular = 0;
    for (const auto& rec : run.report.pairs) {
      const auto& c1 = P.cells[0][rec.j1];
      const auto& c2 = P.cells[1][rec.j2];
      if (c1.size() + c2.size() > 12) continue;
      ++checked;
      const bool bad = oracle::brute_pair_discrepancy(c1, c2, has) > cfg.epsilon + 1e-12;
      EXPECT_EQ(rec.verdict.status == PairStatus::irregular, bad);
      irregular += bad;
    }
    ASSERT_GT(checked, 0u);
    EXPECT_LE(static_cast<double>(irregular) / static_cast<double>(checked), cfg.epsilon);
    EXPECT_LE(run.report.irregular_fraction, cfg.epsilon);
  }
}

TEST(Pipeline, PaperPresetRunsAtThreeHalves) {
  auto g = block_graph(16);
  RegularizationConfig cfg;
  cfg.epsilon = 0.25;
  cfg.growth = GrowthFunction::paper_exponential(0.25);
  auto run = regularize_graph(g, cfg);
  EXPECT_DOUBLE_EQ(run.driver_epsilon, 0.125);
  EXPECT_EQ(run.partition.J, 8u);
  EXPECT_EQ(run.report.irregular_fraction, 0.0);
  EXPECT_LE(run.report.proxy_failures, static_cast<std::size_t>(0.25 * 64));
}

TEST(Pipeline, PaperPresetTooSmallForRandomGraph) {
  auto g = load_graph(kFixtures + "/gnp_16x16.txt", GraphFormat::edgelist);
  RegularizationConfig cfg;
  cfg.epsilon = 0.25;
  cfg.growth = GrowthFunction::paper_exponential(0.25);
  EXPECT_THROW(regularize_graph(g, cfg), CapacityError);
}

TEST(Report, FieldOrderAndShape) {
  auto g = half_graph(8);
  RegularizationConfig cfg;
  cfg.epsilon = 0.5;
  cfg.growth = GrowthFunction::linear(4, 4);
  auto run = regularize_graph(g, cfg);
  Json j = report_json(run);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"epsilon", "J", "M", "certificate", "cells",
                                            "exceptional", "densities", "pairs",
                                            "irregular_fraction", "history", "proxy_failures",
                                            "exceptional_bound"}));
  EXPECT_EQ(j["pairs"].size(), run.partition.J * run.partition.J);
  EXPECT_EQ(j["pairs"][0]["j1"], 1);
  EXPECT_EQ(j["cells"].size(), 2u);
  EXPECT_EQ(j["history"].back()["event"], "halt");
}
