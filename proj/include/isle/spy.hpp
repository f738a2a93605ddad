#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isle/csr_graph.hpp"

namespace isle {

// Non-zero coordinates of the permuted adjacency matrix: (r,c) present iff
// edge (order[r], order[c]) exists. Row-major, columns sorted within a row.
std::vector<std::pair<NodeId, NodeId>> permuted_coords(const CsrGraph& g,
                                                       const NodePermutation& perm);

// CSV with header "row,col", one permuted coordinate per line.
void emit_spy_csv(const CsrGraph& g, const NodePermutation& perm, const std::string& path);

// 8-bit binary PGM (P5), max-pooling downsample: a pixel is black if any
// non-zero falls into its bin. side caps the image edge; graphs smaller than
// side map one node per pixel.
void emit_spy_pgm(const CsrGraph& g, const NodePermutation& perm, const std::string& path,
                  std::uint32_t side = 1024);

}  // namespace isle
