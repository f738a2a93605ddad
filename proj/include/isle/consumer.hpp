#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "isle/locator.hpp"
#include "isle/matrix.hpp"

#include "json.hpp"

namespace isle {

class MemoryModel;

enum class WindowPolicy {
  MinCost,         // cheaper of add/subtract, tie -> add
  PaperThreshold,  // add iff nnz < k/2
};

struct ConsumerConfig {
  std::uint32_t k = 2;  // pre-aggregation group size
  WindowPolicy policy = WindowPolicy::MinCost;
  std::uint32_t num_workers = 1;
  // Group-sum formation is normally charged for every group (hardware
  // computes them unconditionally). When false, only groups whose sum was
  // consumed by some window are charged — reporting analysis only.
  bool charge_unused_groups = true;

  void validate() const;
};

struct OpLedger {
  std::uint64_t baseline_adds = 0;    // one vector op per directed adjacency entry
  std::uint64_t actual_adds = 0;
  std::uint64_t actual_subs = 0;
  std::uint64_t preagg_formation_adds = 0;
  std::uint64_t combination_macs = 0;

  void merge(const OpLedger& o);
  double pruning_rate() const;  // 0 when baseline_adds == 0
  nlohmann::json to_json() const;
};

// Commutative per-hub partial-result accumulation. Mergeable across
// workers; entries appear on first touch.
class HubAccumulator {
 public:
  explicit HubAccumulator(size_t width) : width_(width) {}

  void accumulate(NodeId hub, std::span<const double> row);
  void subtract(NodeId hub, std::span<const double> row);
  void merge(const HubAccumulator& o);

  size_t width() const { return width_; }
  const std::vector<double>* row(NodeId hub) const;
  std::uint64_t contributions(NodeId hub) const;

 private:
  struct Entry {
    std::vector<double> row;
    std::uint64_t contributions = 0;
  };
  size_t width_;
  std::unordered_map<NodeId, Entry> entries_;

  Entry& entry(NodeId hub);
  friend Matrix finalize_hubs(const HubAccumulator&, std::span<const NodeId>);
};

// Dense X * W. Adds rows*in*out to combination_macs.
Matrix combine_rows(const Matrix& features, const Matrix& weights, OpLedger* ledger = nullptr);

// Sums of k consecutive rows (island column order); last group may be
// short. Formation cost: size-1 adds per group.
Matrix pre_aggregate(const Matrix& combined_rows, std::uint32_t k, OpLedger* ledger = nullptr);

// One scan-window decision, recorded for cost auditing.
struct WindowRecord {
  std::uint32_t dest;       // row in [hubs..., nodes...] order
  std::uint32_t col_start;
  std::uint32_t width;
  std::uint32_t nnz;
  std::uint32_t cost;       // vector ops charged
  bool used_group_sum;
};

// Aggregates one island: every island node and attached hub is a
// destination; 1xk windows over the island's column order decide between
// adding connected rows and subtracting non-connected rows from the group
// sum. Returns the output rows for island.nodes; hub partials go to
// hub_acc. combined/pre must be in island column order (hubs then nodes).
Matrix aggregate_island(const Island& island, const Matrix& combined, const Matrix& pre,
                        const ConsumerConfig& cfg, HubAccumulator& hub_acc, OpLedger& ledger,
                        std::vector<WindowRecord>* trace = nullptr);

// Push-style accumulation over the inter-hub edge map; no reuse attempted.
void aggregate_inter_hub(std::span<const std::pair<NodeId, NodeId>> edges, const Matrix& xw,
                         const std::vector<std::uint8_t>& is_hub, HubAccumulator& hub_acc,
                         OpLedger& ledger);

// Rows for `hubs` in the given order; zero rows for untouched hubs.
Matrix finalize_hubs(const HubAccumulator& hub_acc, std::span<const NodeId> hubs);

struct ConsumeResult {
  Matrix output;  // num_nodes x width, binary-adjacency A*(XW)
  OpLedger ledger;
};

// Incremental consumer: islands may be fed as they complete (streaming) or
// all at once; finish() runs the inter-hub tasks and hub finalize. Batch
// and streaming feeds in the same order produce identical bits.
class DecompositionConsumer {
 public:
  DecompositionConsumer(NodeId num_nodes, const Matrix& xw, const ConsumerConfig& cfg,
                        MemoryModel* mem = nullptr, std::vector<WindowRecord>* trace = nullptr,
                        bool charge_location = true);

  void consume(const Island& island);
  ConsumeResult finish(const IslandizationResult& islands);

 private:
  const Matrix& xw_;
  ConsumerConfig cfg_;
  MemoryModel* mem_;
  std::vector<WindowRecord>* trace_;
  bool charge_location_;
  Matrix output_;
  HubAccumulator hub_acc_;
  OpLedger ledger_;
  int r_a_ = -1, r_xw_island_ = -1, r_xw_hub_ = -1, r_xo_island_ = -1, r_xo_hub_ = -1;
};

// Full decomposition pass: all islands, inter-hub tasks, hub finalize.
// mem, when given, receives the island-strategy access trace (forces
// single-threaded processing); charge_location adds the locator's adjacency
// traffic to it. trace records window decisions.
ConsumeResult consume_decomposition(const IslandizationResult& islands, const Matrix& xw,
                                    const ConsumerConfig& cfg, MemoryModel* mem = nullptr,
                                    std::vector<WindowRecord>* trace = nullptr,
                                    bool charge_location = true);

}  // namespace isle
