#include "isle/csr_graph.hpp"

#include <algorithm>
#include <numeric>

#include "isle/errors.hpp"

namespace isle {

std::uint32_t CsrGraph::max_degree() const {
  std::uint32_t m = 0;
  for (auto d : degrees) m = std::max(m, d);
  return m;
}

bool CsrGraph::has_edge(NodeId u, NodeId v) const {
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> CsrGraph::undirected_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(nnz() / 2);
  for (NodeId u = 0; u < num_nodes; ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

CsrGraph build_csr(NodeId num_nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> dir;
  dir.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes)
      throw RangeError("edge endpoint out of range");
    if (u == v) continue;
    dir.emplace_back(u, v);
    dir.emplace_back(v, u);
  }
  std::sort(dir.begin(), dir.end());
  dir.erase(std::unique(dir.begin(), dir.end()), dir.end());

  CsrGraph g;
  g.num_nodes = num_nodes;
  g.row_ptr.assign(num_nodes + 1, 0);
  for (auto& [u, v] : dir) g.row_ptr[u + 1]++;
  for (NodeId u = 0; u < num_nodes; ++u) g.row_ptr[u + 1] += g.row_ptr[u];
  g.col_idx.reserve(dir.size());
  for (auto& [u, v] : dir) g.col_idx.push_back(v);
  g.degrees.resize(num_nodes);
  for (NodeId u = 0; u < num_nodes; ++u)
    g.degrees[u] = static_cast<std::uint32_t>(g.row_ptr[u + 1] - g.row_ptr[u]);
  return g;
}

void validate_csr(const CsrGraph& g) {
  if (g.row_ptr.size() != static_cast<size_t>(g.num_nodes) + 1)
    throw ContractViolation("row_ptr length mismatch");
  if (g.row_ptr.front() != 0 || g.row_ptr.back() != g.col_idx.size())
    throw ContractViolation("row_ptr endpoints mismatch");
  if (g.degrees.size() != g.num_nodes)
    throw ContractViolation("degree array length mismatch");
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (g.row_ptr[u] > g.row_ptr[u + 1])
      throw ContractViolation("row_ptr not monotone");
    if (g.degrees[u] != g.row_ptr[u + 1] - g.row_ptr[u])
      throw ContractViolation("degree mismatch at node " + std::to_string(u));
    auto row = g.neighbors(u);
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i] >= g.num_nodes)
        throw ContractViolation("col_idx out of range");
      if (row[i] == u)
        throw ContractViolation("self-loop at node " + std::to_string(u));
      if (i > 0 && row[i] <= row[i - 1])
        throw ContractViolation("col_idx not strictly increasing in row " + std::to_string(u));
      if (!g.has_edge(row[i], u))
        throw ContractViolation("asymmetric edge (" + std::to_string(u) + "," +
                                std::to_string(row[i]) + ")");
    }
  }
}

bool NodePermutation::valid_for(NodeId num_nodes) const {
  if (order.size() != num_nodes) return false;
  std::vector<bool> seen(num_nodes, false);
  for (NodeId id : order) {
    if (id >= num_nodes || seen[id]) return false;
    seen[id] = true;
  }
  return true;
}

std::vector<NodeId> NodePermutation::inverse() const {
  std::vector<NodeId> inv(order.size());
  for (NodeId i = 0; i < order.size(); ++i) inv[order[i]] = i;
  return inv;
}

NodePermutation identity_permutation(NodeId num_nodes) {
  NodePermutation p;
  p.order.resize(num_nodes);
  std::iota(p.order.begin(), p.order.end(), NodeId{0});
  return p;
}

}  // namespace isle
