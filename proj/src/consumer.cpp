#include "isle/consumer.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "isle/errors.hpp"
#include "isle/memory_model.hpp"

namespace isle {

void ConsumerConfig::validate() const {
  if (k < 2) throw ConfigError("consumer: k must be >= 2");
  if (num_workers < 1) throw ConfigError("consumer: num_workers must be >= 1");
}

void OpLedger::merge(const OpLedger& o) {
  baseline_adds += o.baseline_adds;
  actual_adds += o.actual_adds;
  actual_subs += o.actual_subs;
  preagg_formation_adds += o.preagg_formation_adds;
  combination_macs += o.combination_macs;
}

double OpLedger::pruning_rate() const {
  if (baseline_adds == 0) return 0.0;
  double spent = static_cast<double>(actual_adds + actual_subs + preagg_formation_adds);
  return 1.0 - spent / static_cast<double>(baseline_adds);
}

nlohmann::json OpLedger::to_json() const {
  return {{"baseline_adds", baseline_adds},
          {"actual_adds", actual_adds},
          {"actual_subs", actual_subs},
          {"preagg_formation_adds", preagg_formation_adds},
          {"pruning_rate", pruning_rate()},
          {"combination_macs", combination_macs}};
}

HubAccumulator::Entry& HubAccumulator::entry(NodeId hub) {
  auto [it, fresh] = entries_.try_emplace(hub);
  if (fresh) it->second.row.assign(width_, 0.0);
  return it->second;
}

void HubAccumulator::accumulate(NodeId hub, std::span<const double> row) {
  Entry& e = entry(hub);
  for (size_t i = 0; i < width_; ++i) e.row[i] += row[i];
  e.contributions++;
}

void HubAccumulator::subtract(NodeId hub, std::span<const double> row) {
  Entry& e = entry(hub);
  for (size_t i = 0; i < width_; ++i) e.row[i] -= row[i];
  e.contributions++;
}

void HubAccumulator::merge(const HubAccumulator& o) {
  for (const auto& [hub, oe] : o.entries_) {
    Entry& e = entry(hub);
    for (size_t i = 0; i < width_; ++i) e.row[i] += oe.row[i];
    e.contributions += oe.contributions;
  }
}

const std::vector<double>* HubAccumulator::row(NodeId hub) const {
  auto it = entries_.find(hub);
  return it == entries_.end() ? nullptr : &it->second.row;
}

std::uint64_t HubAccumulator::contributions(NodeId hub) const {
  auto it = entries_.find(hub);
  return it == entries_.end() ? 0 : it->second.contributions;
}

Matrix combine_rows(const Matrix& features, const Matrix& weights, OpLedger* ledger) {
  if (features.cols != weights.rows)
    throw ShapeError("combine: feature width != weight height");
  Matrix out(features.rows, weights.cols);
  for (size_t i = 0; i < features.rows; ++i) {
    const double* x = features.data.data() + i * features.cols;
    double* o = out.data.data() + i * out.cols;
    for (size_t kk = 0; kk < features.cols; ++kk) {
      const double xv = x[kk];
      const double* w = weights.data.data() + kk * weights.cols;
      for (size_t j = 0; j < weights.cols; ++j) o[j] += xv * w[j];
    }
  }
  if (ledger) ledger->combination_macs += features.rows * features.cols * weights.cols;
  return out;
}

Matrix pre_aggregate(const Matrix& combined_rows, std::uint32_t k, OpLedger* ledger) {
  if (k < 2) throw ConfigError("pre_aggregate: k must be >= 2");
  size_t total = combined_rows.rows;
  size_t groups = (total + k - 1) / k;
  Matrix sums(groups, combined_rows.cols);
  std::uint64_t formation = 0;
  for (size_t gidx = 0; gidx < groups; ++gidx) {
    size_t begin = gidx * k;
    size_t end = std::min<size_t>(begin + k, total);
    double* s = sums.data.data() + gidx * sums.cols;
    for (size_t r = begin; r < end; ++r) {
      const double* src = combined_rows.data.data() + r * combined_rows.cols;
      for (size_t c = 0; c < sums.cols; ++c) s[c] += src[c];
    }
    formation += end - begin - 1;
  }
  if (ledger) ledger->preagg_formation_adds += formation;
  return sums;
}

namespace {

// Scan-matrix bit for destination row i and source column j over the
// island's column order [hubs..., nodes...]. Hub-hub pairs are handled by
// inter-hub tasks and read as zero here.
inline bool effective_bit(const Island& island, std::uint32_t h, std::uint32_t i,
                          std::uint32_t j) {
  if (j < h) return i < h ? false : island.bitmap.get(j, i - h);
  return island.bitmap.get(i, j - h);
}

inline void add_into(std::span<double> acc, std::span<const double> row) {
  for (size_t c = 0; c < acc.size(); ++c) acc[c] += row[c];
}
inline void sub_from(std::span<double> acc, std::span<const double> row) {
  for (size_t c = 0; c < acc.size(); ++c) acc[c] -= row[c];
}

}  // namespace

Matrix aggregate_island(const Island& island, const Matrix& combined, const Matrix& pre,
                        const ConsumerConfig& cfg, HubAccumulator& hub_acc, OpLedger& ledger,
                        std::vector<WindowRecord>* trace) {
  cfg.validate();
  const std::uint32_t h = static_cast<std::uint32_t>(island.hubs.size());
  const std::uint32_t n = static_cast<std::uint32_t>(island.nodes.size());
  const std::uint32_t total = h + n;
  const std::uint32_t k = cfg.k;
  if (combined.rows != total)
    throw ShapeError("aggregate_island: combined rows != island column order");
  if (pre.rows != (total + k - 1) / k || pre.cols != combined.cols)
    throw ShapeError("aggregate_island: group sums inconsistent with k");

  Matrix out(n, combined.cols);
  std::vector<std::uint32_t> window_cols;
  std::vector<bool> group_used(pre.rows, false);

  for (std::uint32_t dest = 0; dest < total; ++dest) {
    std::span<double> acc = dest < h ? std::span<double>() : out.row(dest - h);
    std::vector<double> hub_row;
    if (dest < h) {
      hub_row.assign(combined.cols, 0.0);
      acc = hub_row;
    }
    bool touched = false;
    for (std::uint32_t start = 0; start < total; start += k) {
      const std::uint32_t width = std::min(k, total - start);
      window_cols.clear();
      for (std::uint32_t j = start; j < start + width; ++j)
        if (effective_bit(island, h, dest, j)) window_cols.push_back(j);
      const auto nnz = static_cast<std::uint32_t>(window_cols.size());
      ledger.baseline_adds += nnz;
      if (nnz == 0) continue;
      touched = true;

      const std::uint32_t add_cost = nnz;
      const std::uint32_t sub_cost = 1 + (width - nnz);
      bool use_adds;
      if (cfg.policy == WindowPolicy::MinCost) {
        use_adds = add_cost <= sub_cost;
      } else {
        use_adds = nnz * 2 < k;  // "less than k/2"
      }

      if (use_adds) {
        for (std::uint32_t j : window_cols) add_into(acc, combined.row(j));
        ledger.actual_adds += add_cost;
      } else {
        add_into(acc, pre.row(start / k));
        ledger.actual_adds += 1;
        group_used[start / k] = true;
        for (std::uint32_t j = start; j < start + width; ++j)
          if (!effective_bit(island, h, dest, j)) sub_from(acc, combined.row(j));
        ledger.actual_subs += width - nnz;
      }
      if (trace)
        trace->push_back({dest, start, width, nnz, use_adds ? add_cost : sub_cost, !use_adds});
    }
    if (dest < h && touched) hub_acc.accumulate(island.hubs[dest], hub_row);
  }

  if (!cfg.charge_unused_groups) {
    for (std::uint32_t gidx = 0; gidx < group_used.size(); ++gidx)
      if (group_used[gidx])
        ledger.preagg_formation_adds += std::min<std::uint32_t>(k, total - gidx * k) - 1;
  }
  return out;
}

void aggregate_inter_hub(std::span<const std::pair<NodeId, NodeId>> edges, const Matrix& xw,
                         const std::vector<std::uint8_t>& is_hub, HubAccumulator& hub_acc,
                         OpLedger& ledger) {
  for (auto [a, b] : edges) {
    if (!is_hub[a] || !is_hub[b])
      throw ContractViolation("aggregate_inter_hub: endpoint is not a hub");
    hub_acc.accumulate(a, xw.row(b));
    hub_acc.accumulate(b, xw.row(a));
    ledger.baseline_adds += 2;
    ledger.actual_adds += 2;
  }
}

Matrix finalize_hubs(const HubAccumulator& hub_acc, std::span<const NodeId> hubs) {
  Matrix out(hubs.size(), hub_acc.width());
  for (size_t i = 0; i < hubs.size(); ++i) {
    auto it = hub_acc.entries_.find(hubs[i]);
    if (it == hub_acc.entries_.end()) continue;  // untouched hub keeps its zero row
    std::copy(it->second.row.begin(), it->second.row.end(), out.row(i).begin());
  }
  return out;
}

namespace {

// Island-strategy access trace for one island task: the working set (node
// rows) streams in once; hub rows go through the hub-XW cache; node outputs
// stream out complete; hub partials update the partial-result region.
void emit_island_events(MemoryModel& mem, const Island& island, std::uint32_t row_words,
                        int r_xw_island, int r_xw_hub, int r_xo_island, int r_xo_hub) {
  for (NodeId hub : island.hubs) mem.read(r_xw_hub, MatrixTag::XW, hub, row_words);
  for (NodeId u : island.nodes) mem.read(r_xw_island, MatrixTag::XW, u, row_words);
  for (NodeId u : island.nodes) mem.write(r_xo_island, MatrixTag::Xo, u, row_words);
  for (NodeId hub : island.hubs) mem.update(r_xo_hub, MatrixTag::Xo, hub, row_words);
}

}  // namespace

namespace {

void consume_one_island(const Island& island, const Matrix& xw, const ConsumerConfig& cfg,
                        Matrix& output, HubAccumulator& hub_acc, OpLedger& ledger,
                        std::vector<WindowRecord>* trace) {
  const std::uint32_t h = static_cast<std::uint32_t>(island.hubs.size());
  const std::uint32_t n = static_cast<std::uint32_t>(island.nodes.size());
  Matrix local(h + n, xw.cols);
  for (std::uint32_t i = 0; i < h; ++i)
    std::copy(xw.row(island.hubs[i]).begin(), xw.row(island.hubs[i]).end(),
              local.row(i).begin());
  for (std::uint32_t i = 0; i < n; ++i)
    std::copy(xw.row(island.nodes[i]).begin(), xw.row(island.nodes[i]).end(),
              local.row(h + i).begin());
  Matrix sums = pre_aggregate(local, cfg.k, cfg.charge_unused_groups ? &ledger : nullptr);
  Matrix rows = aggregate_island(island, local, sums, cfg, hub_acc, ledger, trace);
  for (std::uint32_t i = 0; i < n; ++i)
    std::copy(rows.row(i).begin(), rows.row(i).end(), output.row(island.nodes[i]).begin());
}

}  // namespace

DecompositionConsumer::DecompositionConsumer(NodeId num_nodes, const Matrix& xw,
                                             const ConsumerConfig& cfg, MemoryModel* mem,
                                             std::vector<WindowRecord>* trace,
                                             bool charge_location)
    : xw_(xw),
      cfg_(cfg),
      mem_(mem),
      trace_(trace),
      charge_location_(charge_location),
      output_(num_nodes, xw.cols),
      hub_acc_(xw.cols) {
  cfg_.validate();
  if (xw.rows != num_nodes) throw ShapeError("consume: XW height != node count");
  if (mem_) {
    r_a_ = mem_->region_id("A_stream");
    r_xw_island_ = mem_->region_id("island_xw");
    r_xw_hub_ = mem_->region_id("hub_xw_cache");
    r_xo_island_ = mem_->region_id("island_xo");
    r_xo_hub_ = mem_->region_id("hub_partials");
  }
}

void DecompositionConsumer::consume(const Island& island) {
  consume_one_island(island, xw_, cfg_, output_, hub_acc_, ledger_, trace_);
  if (mem_)
    emit_island_events(*mem_, island, static_cast<std::uint32_t>(xw_.cols), r_xw_island_,
                       r_xw_hub_, r_xo_island_, r_xo_hub_);
}

ConsumeResult DecompositionConsumer::finish(const IslandizationResult& islands) {
  std::vector<std::uint8_t> is_hub(islands.num_nodes, 0);
  for (NodeId hb : islands.hub_set) is_hub[hb] = 1;
  aggregate_inter_hub(islands.inter_hub_edges, xw_, is_hub, hub_acc_, ledger_);

  if (mem_) {
    // adjacency traffic spent locating the decomposition
    if (charge_location_ && islands.adjacency_reads > 0)
      mem_->read(r_a_, MatrixTag::A, 0, static_cast<std::uint32_t>(islands.adjacency_reads));
    // push-outer order over the inter-hub edge map: each source hub row is
    // fetched once per batch of its outgoing updates
    std::vector<std::vector<NodeId>> by_source(islands.num_nodes);
    for (auto [a, b] : islands.inter_hub_edges) {
      by_source[a].push_back(b);
      by_source[b].push_back(a);
    }
    const auto row_words = static_cast<std::uint32_t>(xw_.cols);
    for (NodeId hb : islands.hub_set) {
      if (by_source[hb].empty()) continue;
      mem_->read(r_xw_hub_, MatrixTag::XW, hb, row_words);
      for (NodeId dst : by_source[hb]) mem_->update(r_xo_hub_, MatrixTag::Xo, dst, row_words);
    }
  }

  Matrix hub_rows = finalize_hubs(hub_acc_, islands.hub_set);
  for (size_t i = 0; i < islands.hub_set.size(); ++i)
    std::copy(hub_rows.row(i).begin(), hub_rows.row(i).end(),
              output_.row(islands.hub_set[i]).begin());
  if (mem_) mem_->flush();
  return {std::move(output_), ledger_};
}

ConsumeResult consume_decomposition(const IslandizationResult& islands, const Matrix& xw,
                                    const ConsumerConfig& cfg, MemoryModel* mem,
                                    std::vector<WindowRecord>* trace, bool charge_location) {
  cfg.validate();
  const bool parallel = cfg.num_workers > 1 && !mem && !trace && islands.islands.size() > 1;
  if (!parallel) {
    DecompositionConsumer consumer(islands.num_nodes, xw, cfg, mem, trace, charge_location);
    for (const auto& island : islands.islands) consumer.consume(island);
    return consumer.finish(islands);
  }

  if (xw.rows != islands.num_nodes) throw ShapeError("consume: XW height != node count");
  Matrix output(islands.num_nodes, xw.cols);
  std::vector<OpLedger> ledgers(cfg.num_workers);
  std::vector<HubAccumulator> accs(cfg.num_workers, HubAccumulator(xw.cols));
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (std::uint32_t w = 0; w < cfg.num_workers; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= islands.islands.size()) break;
        consume_one_island(islands.islands[i], xw, cfg, output, accs[w], ledgers[w], nullptr);
      }
    });
  }
  for (auto& t : pool) t.join();

  OpLedger ledger;
  HubAccumulator hub_acc(xw.cols);
  for (std::uint32_t w = 0; w < cfg.num_workers; ++w) {
    ledger.merge(ledgers[w]);
    hub_acc.merge(accs[w]);
  }
  std::vector<std::uint8_t> is_hub(islands.num_nodes, 0);
  for (NodeId hb : islands.hub_set) is_hub[hb] = 1;
  aggregate_inter_hub(islands.inter_hub_edges, xw, is_hub, hub_acc, ledger);
  Matrix hub_rows = finalize_hubs(hub_acc, islands.hub_set);
  for (size_t i = 0; i < islands.hub_set.size(); ++i)
    std::copy(hub_rows.row(i).begin(), hub_rows.row(i).end(),
              output.row(islands.hub_set[i]).begin());
  return {std::move(output), ledger};
}

}  // namespace isle
