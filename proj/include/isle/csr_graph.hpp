#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace isle {

using NodeId = std::uint32_t;

// Undirected, unweighted graph in compressed sparse row form. Each edge
// (u,v) is stored twice (row u and row v); self-loops and duplicates are
// rejected by the constructors.
struct CsrGraph {
  NodeId num_nodes = 0;
  std::vector<std::uint64_t> row_ptr;  // length num_nodes + 1
  std::vector<NodeId> col_idx;         // strictly increasing within each row
  std::vector<std::uint32_t> degrees;  // degrees[u] == row_ptr[u+1] - row_ptr[u]

  std::uint64_t nnz() const { return col_idx.size(); }           // directed entries
  std::uint64_t num_undirected_edges() const { return nnz() / 2; }
  std::uint32_t degree(NodeId u) const { return degrees[u]; }
  std::uint32_t max_degree() const;

  std::span<const NodeId> neighbors(NodeId u) const {
    return {col_idx.data() + row_ptr[u], col_idx.data() + row_ptr[u + 1]};
  }

  bool has_edge(NodeId u, NodeId v) const;

  // All undirected edges as (u,v) with u < v, row-major order.
  std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;
};

// Builds a CsrGraph from an undirected edge set. Input pairs may appear in
// either orientation and with duplicates; self-loops are dropped.
CsrGraph build_csr(NodeId num_nodes, std::span<const std::pair<NodeId, NodeId>> edges);

// Checks all structural invariants (sortedness, symmetry, degree array, no
// self-loops/duplicates). Throws ContractViolation on the first breach.
void validate_csr(const CsrGraph& g);

struct NodePermutation {
  std::vector<NodeId> order;  // order[new_index] = original node id

  bool valid_for(NodeId num_nodes) const;
  // inverse()[original id] = new index
  std::vector<NodeId> inverse() const;
};

NodePermutation identity_permutation(NodeId num_nodes);

}  // namespace isle
