#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isle/bitmatrix.hpp"
#include "isle/csr_graph.hpp"

#include "json.hpp"

namespace isle {

// Threshold decay between rounds. th' = max(min(ceil(th*num/den), th-1), 1),
// i.e. strictly decreasing above 1 and fixed at 1.
struct DecayRule {
  std::uint32_t num = 1;
  std::uint32_t den = 2;
  std::uint32_t apply(std::uint32_t th) const;
};

enum class LocatorMode { DeterministicSequential, SeededParallel };

struct LocatorConfig {
  std::uint32_t th_init = 0;  // 0 = auto: ceil(max_degree / 2), at least 1
  DecayRule decay;
  std::uint32_t c_max = 64;   // max nodes per island
  std::uint32_t p1 = 1;       // hub-detection lanes
  std::uint32_t p2 = 1;       // BFS engines
  LocatorMode mode = LocatorMode::DeterministicSequential;
  std::uint64_t seed = 0;

  void validate() const;
};

// One island: a group of nodes whose only external neighbors are hubs.
// bitmap rows are [hubs..., nodes...], columns are nodes; a bit marks an
// edge between the row entity and the column node.
struct Island {
  std::vector<NodeId> nodes;  // BFS visit order; bitmap column order
  std::vector<NodeId> hubs;   // first-encounter order; bitmap leading rows
  BitMatrix bitmap;
  std::uint32_t round = 0;
};

struct RoundRecord {
  std::uint32_t threshold = 0;
  std::vector<NodeId> hubs;  // hubs found this round, ascending id
  std::uint32_t num_islands = 0;
  bool forced_decay = false;  // decay failed to progress; forced decrement
};

struct IslandizationResult {
  NodeId num_nodes = 0;
  std::vector<Island> islands;  // completion order
  std::vector<NodeId> hub_set;  // ascending
  std::vector<std::pair<NodeId, NodeId>> inter_hub_edges;  // u < v, discovery order
  std::vector<RoundRecord> rounds;
  std::uint64_t adjacency_reads = 0;  // adjacency-list words fetched while locating
};

// Shared visited set with atomic test-and-claim. A slot is free, owned by a
// running search (token), or permanently classified.
class ClaimTable {
 public:
  static constexpr std::uint32_t kFree = 0;
  static constexpr std::uint32_t kClassified = 0xffffffffu;

  explicit ClaimTable(size_t n);
  bool try_claim(NodeId u, std::uint32_t owner);
  std::uint32_t owner_of(NodeId u) const;
  void release(std::span<const NodeId> nodes);
  void mark_classified(NodeId u);
  // Frees every slot still held by a search token (round-barrier sweep).
  void release_all_owned();
  size_t count_owned(std::uint32_t owner) const;  // instrumentation

 private:
  std::vector<std::atomic<std::uint32_t>> slots_;
};

// Unclassified nodes with degree >= threshold, ascending id. Lane count
// only partitions the sweep; the result is order-independent.
std::vector<NodeId> detect_hubs(const CsrGraph& g, std::uint32_t threshold,
                                const std::vector<std::uint8_t>& classified,
                                std::uint32_t lanes = 1);

struct BfsTask {
  NodeId hub;
  NodeId start;
};

struct TaskAssignment {
  std::vector<BfsTask> tasks;
  std::vector<std::pair<NodeId, NodeId>> inter_hub;  // deduplicated, u < v
};

// For each new hub, neighbors that are hubs become inter-hub edges and the
// rest become BFS tasks. is_hub must already include the new hubs.
TaskAssignment assign_tasks(const CsrGraph& g, std::span<const NodeId> new_hubs,
                            const std::vector<std::uint8_t>& is_hub,
                            std::atomic<std::uint64_t>* adjacency_reads = nullptr);

enum class TpBfsStatus { Completed, AbortedOverlap, AbortedSize };

struct TpBfsOutcome {
  TpBfsStatus status;
  Island island;  // populated only for Completed
};

// Threshold-bounded BFS from task.start. Nodes with degree >= threshold are
// collected as hubs, not traversed. Claims are taken in `claims` under
// `owner`; Completed promotes them to classified, AbortedOverlap releases
// them immediately, and AbortedSize leaves them claimed so that sibling
// tasks into the same oversized region die cheaply -- the caller frees them
// at the round barrier via release_all_owned().
TpBfsOutcome tp_bfs(const CsrGraph& g, BfsTask task, std::uint32_t threshold,
                    std::uint32_t c_max, ClaimTable& claims, std::uint32_t owner,
                    std::atomic<std::uint64_t>* adjacency_reads = nullptr);

// Streaming hook: invoked as each island completes (round order).
struct IslandSink {
  virtual ~IslandSink() = default;
  virtual void on_island(const Island& island) = 0;
};

IslandizationResult islandize(const CsrGraph& g, const LocatorConfig& cfg,
                              IslandSink* sink = nullptr);

// Round-major order: hubs found in round r, then nodes of islands completed
// in round r (islands in completion order, nodes in BFS order).
NodePermutation islandization_permutation(const IslandizationResult& result);

// Partition / closure / edge-cover / bitmap consistency checks.
// Throws ContractViolation on the first breach. c_max == 0 skips size check.
void validate_islandization(const CsrGraph& g, const IslandizationResult& result,
                            std::uint32_t c_max = 0);

nlohmann::json islandization_to_json(const IslandizationResult& result);
IslandizationResult islandization_from_json(const nlohmann::json& j);

}  // namespace isle
