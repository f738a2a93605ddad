#include "isle/sbm.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "isle/errors.hpp"

namespace isle {

namespace {

// Engine output mapped to [0,1); avoids distribution classes so results are
// identical across standard library implementations.
double unit_draw(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

SbmGraph generate_sbm(const SbmSpec& spec) {
  if (spec.num_islands == 0 || spec.island_size == 0)
    throw ConfigError("sbm: island count and size must be positive");
  if (spec.p_in < 0.0 || spec.p_in > 1.0)
    throw ConfigError("sbm: p_in must be in [0,1]");
  if (spec.num_hubs > 0 && spec.hub_attach > spec.num_hubs)
    throw ConfigError("sbm: hub_attach exceeds hub count");

  const NodeId h = spec.num_hubs;
  const NodeId n = h + spec.num_islands * spec.island_size;
  std::mt19937_64 gen(spec.seed);

  std::vector<NodeId> layout(n);
  std::iota(layout.begin(), layout.end(), NodeId{0});
  if (spec.shuffle_ids) {
    for (NodeId i = n; i > 1; --i)
      std::swap(layout[i - 1], layout[gen() % i]);
  }

  SbmGraph out;
  out.hubs.reserve(h);
  for (NodeId i = 0; i < h; ++i) out.hubs.push_back(layout[i]);

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::uint32_t b = 0; b < spec.num_islands; ++b) {
    const NodeId base = h + b * spec.island_size;
    std::vector<NodeId> block;
    block.reserve(spec.island_size);
    for (std::uint32_t i = 0; i < spec.island_size; ++i) block.push_back(layout[base + i]);

    for (std::uint32_t i = 0; i < spec.island_size; ++i)
      for (std::uint32_t j = i + 1; j < spec.island_size; ++j)
        if (unit_draw(gen) < spec.p_in) edges.emplace_back(block[i], block[j]);

    if (h > 0 && spec.hub_attach > 0) {
      // partial Fisher-Yates over hub indices picks hub_attach distinct hubs
      std::vector<NodeId> pick(h);
      std::iota(pick.begin(), pick.end(), NodeId{0});
      for (std::uint32_t i = 0; i < spec.hub_attach; ++i)
        std::swap(pick[i], pick[i + gen() % (h - i)]);
      for (std::uint32_t i = 0; i < spec.hub_attach; ++i)
        for (NodeId member : block) edges.emplace_back(out.hubs[pick[i]], member);
    }
    out.blocks.push_back(std::move(block));
  }

  if (h == 2) edges.emplace_back(out.hubs[0], out.hubs[1]);
  if (h > 2)
    for (NodeId i = 0; i < h; ++i) edges.emplace_back(out.hubs[i], out.hubs[(i + 1) % h]);

  out.graph = build_csr(n, edges);
  return out;
}

}  // namespace isle
