#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isle/csr_graph.hpp"

namespace isle {

struct IngestOptions {
  bool one_indexed = false;           // ids in the file start at 1
  std::optional<NodeId> num_nodes;    // override node count (ids must fit)
  bool compact_ids = false;           // renumber sparse id spaces densely
};

// Loads a whitespace-separated "u v" edge list. The result is symmetrized,
// deduplicated and self-loop free; node count is max id + 1 unless
// overridden. With compact_ids the distinct ids are renumbered in sorted
// order and, when id_map is non-null, the original id of each dense node is
// recorded there.
CsrGraph load_edge_list(const std::string& path, const IngestOptions& opts = {},
                        std::vector<NodeId>* id_map = nullptr);

// Writes one "u v" line per undirected edge, u < v, ascending. Byte-stable
// for a given graph.
void write_edge_list(const CsrGraph& g, const std::string& path);

}  // namespace isle
