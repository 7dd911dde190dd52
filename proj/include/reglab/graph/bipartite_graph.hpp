#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reglab/error.hpp"

namespace reglab {

using Edge = std::pair<std::size_t, std::size_t>;

// (V1, V2, E) with V1 = [0, n1), V2 = [0, n2) and E a set of (u, v) pairs.
class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t n1, std::size_t n2, std::vector<Edge> edges)
      : n1_(n1), n2_(n2), adjacency_(n1 * n2, 0), edges_(std::move(edges)) {
    if (n1_ == 0 || n2_ == 0) throw InputError("bipartite graph: empty side");
    for (const auto& [u, v] : edges_) {
      if (u >= n1_ || v >= n2_)
        throw InputError("bipartite graph: edge (" + std::to_string(u) + ", " +
                         std::to_string(v) + ") out of range");
      char& slot = adjacency_[u * n2_ + v];
      if (slot)
        throw InputError("bipartite graph: duplicate edge (" + std::to_string(u) +
                         ", " + std::to_string(v) + ")");
      slot = 1;
    }
    std::sort(edges_.begin(), edges_.end());
  }

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(std::size_t u, std::size_t v) const { return adjacency_[u * n2_ + v] != 0; }

  std::size_t count_edges(const std::vector<std::size_t>& a1,
                          const std::vector<std::size_t>& a2) const {
    std::size_t n = 0;
    for (std::size_t u : a1)
      for (std::size_t v : a2) n += adjacency_[u * n2_ + v];
    return n;
  }

 private:
  std::size_t n1_, n2_;
  std::vector<char> adjacency_;
  std::vector<Edge> edges_;
};

namespace detail {

inline std::string strip_comment(std::string line) {
  if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  return line;
}

inline std::pair<std::size_t, std::size_t> parse_header(std::istream& in,
                                                        std::size_t& lineno) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(strip_comment(line));
    long long a, b;
    if (!(ls >> a)) continue;
    std::string extra;
    if (!(ls >> b) || (ls >> extra) || a <= 0 || b <= 0)
      throw InputError("line " + std::to_string(lineno) +
                       ": expected header 'n1 n2' with positive sizes");
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  }
  throw InputError("missing header 'n1 n2'");
}

}  // namespace detail

// First line `n1 n2`, then one `u v` pair per line (0-indexed); `#` starts a
// comment. Duplicate edges are rejected.
inline BipartiteGraph read_edge_list(std::istream& in) {
  std::size_t lineno = 0;
  const auto [n1, n2] = detail::parse_header(in, lineno);
  std::vector<Edge> edges;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(detail::strip_comment(line));
    long long u, v;
    if (!(ls >> u)) continue;
    std::string extra;
    if (!(ls >> v) || (ls >> extra) || u < 0 || v < 0)
      throw InputError("line " + std::to_string(lineno) + ": expected 'u v'");
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }
  return BipartiteGraph(n1, n2, std::move(edges));
}

// First line `n1 n2`, then n1 rows of n2 characters from {0,1}.
inline BipartiteGraph read_matrix(std::istream& in) {
  std::size_t lineno = 0;
  const auto [n1, n2] = detail::parse_header(in, lineno);
  std::vector<Edge> edges;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_comment(line);
    line.erase(std::remove_if(line.begin(), line.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               line.end());
    if (line.empty()) continue;
    if (row >= n1)
      throw InputError("line " + std::to_string(lineno) + ": more than " +
                       std::to_string(n1) + " rows");
    if (line.size() != n2)
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(n2) + " characters, got " +
                       std::to_string(line.size()));
    for (std::size_t v = 0; v < n2; ++v) {
      if (line[v] == '1')
        edges.emplace_back(row, v);
      else if (line[v] != '0')
        throw InputError("line " + std::to_string(lineno) + ": character '" +
                         std::string(1, line[v]) + "' is not 0 or 1");
    }
    ++row;
  }
  if (row != n1)
    throw InputError("expected " + std::to_string(n1) + " rows, got " +
                     std::to_string(row));
  return BipartiteGraph(n1, n2, std::move(edges));
}

enum class GraphFormat { edgelist, matrix };

inline BipartiteGraph load_graph(const std::string& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return format == GraphFormat::edgelist ? read_edge_list(in) : read_matrix(in);
}

inline void write_edge_list(std::ostream& out, const BipartiteGraph& g) {
  out << g.n1() << ' ' << g.n2() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

// Each of the n1*n2 pairs is an edge independently with probability p.
inline BipartiteGraph random_bipartite(std::size_t n1, std::size_t n2, double p,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n1; ++u)
    for (std::size_t v = 0; v < n2; ++v)
      if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) edges.emplace_back(u, v);
  return BipartiteGraph(n1, n2, std::move(edges));
}

}  // namespace reglab
