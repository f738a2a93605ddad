#pragma once

// Test-only helpers: graph builders and independent brute-force oracles.
// Everything here must stay independent of the implementation paths it
// checks (plain loops, set-based counting, no consumer/locator reuse).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "isle/csr_graph.hpp"
#include "isle/locator.hpp"
#include "isle/matrix.hpp"
#include "isle/sbm.hpp"

namespace testsupport {

using isle::CsrGraph;
using isle::Matrix;
using isle::NodeId;

inline double unit_draw(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline CsrGraph erdos_renyi(NodeId n, double p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (unit_draw(gen) < p) edges.emplace_back(u, v);
  return isle::build_csr(n, edges);
}

inline CsrGraph star_graph(NodeId leaves) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return isle::build_csr(leaves + 1, edges);
}

inline CsrGraph path_graph(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return isle::build_csr(n, edges);
}

inline CsrGraph complete_graph(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return isle::build_csr(n, edges);
}

// Triangle with explicit ids 0,1,2.
inline CsrGraph triangle_graph() { return complete_graph(3); }

// --- oracles -------------------------------------------------------------

// Naive ijk matrix product.
inline Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < a.cols; ++k) s += a.at(i, k) * b.at(k, j);
      c.at(i, j) = s;
    }
  return c;
}

// Direct binary-adjacency SpMM: out[u] = sum of xw rows of u's neighbors.
inline Matrix neighbor_sum_oracle(const CsrGraph& g, const Matrix& xw) {
  Matrix out(g.num_nodes, xw.cols);
  for (NodeId u = 0; u < g.num_nodes; ++u)
    for (NodeId v : g.neighbors(u))
      for (size_t c = 0; c < xw.cols; ++c) out.at(u, c) += xw.at(v, c);
  return out;
}

// Dense multi-layer evaluation with explicit normalized adjacency,
// independent of the library's reference_forward.
inline Matrix dense_gcn_oracle(const CsrGraph& g, const Matrix& x,
                               const std::vector<Matrix>& weights,
                               const std::vector<bool>& relu, bool sym_normalize) {
  const size_t n = g.num_nodes;
  std::vector<double> scale(n, 1.0);
  if (sym_normalize)
    for (NodeId u = 0; u < n; ++u) scale[u] = 1.0 / std::sqrt(g.degree(u) + 1.0);
  Matrix cur = x;
  for (size_t l = 0; l < weights.size(); ++l) {
    Matrix xw = matmul_oracle(cur, weights[l]);
    Matrix next(n, xw.cols);
    for (NodeId u = 0; u < n; ++u) {
      if (sym_normalize)
        for (size_t c = 0; c < xw.cols; ++c)
          next.at(u, c) += scale[u] * scale[u] * xw.at(u, c);
      for (NodeId v : g.neighbors(u)) {
        double a = sym_normalize ? scale[u] * scale[v] : 1.0;
        for (size_t c = 0; c < xw.cols; ++c) next.at(u, c) += a * xw.at(v, c);
      }
    }
    if (relu[l])
      for (auto& v : next.data) v = v > 0.0 ? v : 0.0;
    cur = std::move(next);
  }
  return cur;
}

// Set-based one-pass edge list counter (ingestion oracle).
struct EdgeFileStats {
  NodeId max_id_plus_one = 0;
  std::uint64_t undirected_edges = 0;
};
inline EdgeFileStats scan_edge_file(const std::string& path) {
  std::ifstream in(path);
  std::set<std::pair<NodeId, NodeId>> seen;
  long long max_id = -1, a, b;
  while (in >> a >> b) {
    max_id = std::max({max_id, a, b});
    if (a == b) continue;
    seen.insert({std::min(a, b), std::max(a, b)});
  }
  return {static_cast<NodeId>(max_id + 1), seen.size()};
}

struct UnionFind {
  std::vector<NodeId> parent;
  explicit UnionFind(NodeId n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  NodeId find(NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(NodeId a, NodeId b) { parent[find(a)] = find(b); }
};

// Mechanical region test in permuted coordinates: counts non-zeros that lie
// outside hub rows, hub columns, and island diagonal blocks. Zero means the
// space between the clusters is blank.
inline std::uint64_t coords_outside_region(const CsrGraph& g,
                                           const isle::IslandizationResult& result) {
  auto perm = isle::islandization_permutation(result);
  auto inv = perm.inverse();

  // Rebuild the block layout of the permutation: per position, whether it is
  // a hub position and which island block interval it belongs to.
  std::vector<bool> hub_pos(g.num_nodes, false);
  std::vector<std::int64_t> block_at(g.num_nodes, -1);
  {
    size_t pos = 0;
    std::int64_t block_id = 0;
    for (std::uint32_t r = 0; r < result.rounds.size(); ++r) {
      for (size_t i = 0; i < result.rounds[r].hubs.size(); ++i) hub_pos[pos++] = true;
      for (const auto& island : result.islands) {
        if (island.round != r) continue;
        for (size_t i = 0; i < island.nodes.size(); ++i) block_at[pos++] = block_id;
        ++block_id;
      }
    }
  }

  std::uint64_t outside = 0;
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    NodeId r = inv[u];
    for (NodeId v : g.neighbors(u)) {
      NodeId c = inv[v];
      if (hub_pos[r] || hub_pos[c]) continue;
      if (block_at[r] >= 0 && block_at[r] == block_at[c]) continue;
      ++outside;
    }
  }
  return outside;
}

// Builds an island value directly from graph structure (no locator).
inline isle::Island island_from_graph(const CsrGraph& g, std::vector<NodeId> nodes,
                                      std::vector<NodeId> hubs, std::uint32_t round = 0) {
  isle::Island island;
  island.nodes = std::move(nodes);
  island.hubs = std::move(hubs);
  island.round = round;
  const auto h = static_cast<std::uint32_t>(island.hubs.size());
  const auto n = static_cast<std::uint32_t>(island.nodes.size());
  island.bitmap = isle::BitMatrix(h + n, n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (i != j && g.has_edge(island.nodes[i], island.nodes[j])) island.bitmap.set(h + i, j);
  for (std::uint32_t r = 0; r < h; ++r)
    for (std::uint32_t j = 0; j < n; ++j)
      if (g.has_edge(island.hubs[r], island.nodes[j])) island.bitmap.set(r, j);
  return island;
}

// Deterministic stand-in benchmark graphs. The classic citation datasets
// are not redistributable here; these match their node counts and the
// hub/community shape the engine targets.
inline isle::SbmGraph benchmark_graph(const std::string& name) {
  isle::SbmSpec spec;
  spec.shuffle_ids = true;
  spec.hub_attach = 2;
  if (name == "cora") {
    spec.num_islands = 420;
    spec.island_size = 6;
    spec.num_hubs = 188;  // 420*6 + 188 = 2708
    spec.p_in = 0.5;
    spec.seed = 90001;
  } else if (name == "citeseer") {
    spec.num_islands = 520;
    spec.island_size = 6;
    spec.num_hubs = 207;  // 520*6 + 207 = 3327
    spec.p_in = 0.45;
    spec.seed = 90002;
  } else if (name == "pubmed") {
    spec.num_islands = 2740;
    spec.island_size = 7;
    spec.num_hubs = 537;  // 2740*7 + 537 = 19717
    spec.p_in = 0.4;
    spec.seed = 90003;
  } else {
    throw std::runtime_error("unknown benchmark graph " + name);
  }
  return isle::generate_sbm(spec);
}

}  // namespace testsupport
