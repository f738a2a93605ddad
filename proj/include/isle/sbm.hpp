#pragma once

#include <cstdint>
#include <vector>

#include "isle/csr_graph.hpp"

namespace isle {

// Planted hub/block graph generator. Blocks get internal edges with
// probability p_in, every node of a block is wired to hub_attach hubs
// chosen per block from the seed, and hubs are connected in a sparse ring.
// Fully deterministic for fixed arguments.
struct SbmSpec {
  std::uint32_t num_islands = 1;
  std::uint32_t island_size = 1;
  std::uint32_t num_hubs = 0;
  double p_in = 1.0;
  std::uint32_t hub_attach = 1;  // ignored when num_hubs == 0
  std::uint64_t seed = 0;
  bool shuffle_ids = false;      // scatter node ids like a real-world id space
};

struct SbmGraph {
  CsrGraph graph;
  std::vector<NodeId> hubs;                 // planted hub ids
  std::vector<std::vector<NodeId>> blocks;  // planted block memberships
};

SbmGraph generate_sbm(const SbmSpec& spec);

}  // namespace isle
