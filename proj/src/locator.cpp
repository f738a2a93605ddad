#include "isle/locator.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "isle/errors.hpp"

namespace isle {

std::uint32_t DecayRule::apply(std::uint32_t th) const {
  if (th <= 1) return 1;
  std::uint64_t scaled = (std::uint64_t(th) * num + den - 1) / den;  // ceil
  scaled = std::min<std::uint64_t>(scaled, th - 1);
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(scaled, 1));
}

void LocatorConfig::validate() const {
  if (c_max < 1) throw ConfigError("locator: c_max must be >= 1");
  if (decay.den == 0 || decay.num == 0) throw ConfigError("locator: bad decay rule");
  if (decay.num >= decay.den) throw ConfigError("locator: decay must shrink the threshold");
  if (p1 < 1 || p2 < 1) throw ConfigError("locator: lane counts must be >= 1");
}

ClaimTable::ClaimTable(size_t n) : slots_(n) {
  for (auto& s : slots_) s.store(kFree, std::memory_order_relaxed);
}

bool ClaimTable::try_claim(NodeId u, std::uint32_t owner) {
  std::uint32_t expected = kFree;
  return slots_[u].compare_exchange_strong(expected, owner, std::memory_order_acq_rel);
}

std::uint32_t ClaimTable::owner_of(NodeId u) const {
  return slots_[u].load(std::memory_order_acquire);
}

void ClaimTable::release(std::span<const NodeId> nodes) {
  for (NodeId u : nodes) slots_[u].store(kFree, std::memory_order_release);
}

void ClaimTable::mark_classified(NodeId u) {
  slots_[u].store(kClassified, std::memory_order_release);
}

void ClaimTable::release_all_owned() {
  for (auto& s : slots_) {
    std::uint32_t v = s.load(std::memory_order_relaxed);
    if (v != kFree && v != kClassified) s.store(kFree, std::memory_order_relaxed);
  }
}

size_t ClaimTable::count_owned(std::uint32_t owner) const {
  size_t n = 0;
  for (auto& s : slots_)
    if (s.load(std::memory_order_relaxed) == owner) ++n;
  return n;
}

std::vector<NodeId> detect_hubs(const CsrGraph& g, std::uint32_t threshold,
                                const std::vector<std::uint8_t>& classified,
                                std::uint32_t lanes) {
  std::vector<NodeId> hubs;
  auto sweep = [&](NodeId lo, NodeId hi, std::vector<NodeId>& out) {
    for (NodeId u = lo; u < hi; ++u)
      if (!classified[u] && g.degree(u) >= threshold) out.push_back(u);
  };
  if (lanes <= 1 || g.num_nodes < 2048) {
    sweep(0, g.num_nodes, hubs);
    return hubs;
  }
  std::vector<std::vector<NodeId>> parts(lanes);
  std::vector<std::thread> threads;
  NodeId chunk = (g.num_nodes + lanes - 1) / lanes;
  for (std::uint32_t l = 0; l < lanes; ++l) {
    NodeId lo = l * chunk, hi = std::min<NodeId>(g.num_nodes, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi, l] { sweep(lo, hi, parts[l]); });
  }
  for (auto& t : threads) t.join();
  for (auto& p : parts) hubs.insert(hubs.end(), p.begin(), p.end());
  return hubs;
}

TaskAssignment assign_tasks(const CsrGraph& g, std::span<const NodeId> new_hubs,
                            const std::vector<std::uint8_t>& is_hub,
                            std::atomic<std::uint64_t>* adjacency_reads) {
  TaskAssignment out;
  std::set<std::pair<NodeId, NodeId>> seen;
  for (NodeId h : new_hubs) {
    if (adjacency_reads)
      adjacency_reads->fetch_add(g.degree(h), std::memory_order_relaxed);
    for (NodeId n : g.neighbors(h)) {
      if (is_hub[n]) {
        auto e = std::minmax(h, n);
        if (seen.insert({e.first, e.second}).second)
          out.inter_hub.emplace_back(e.first, e.second);
      } else {
        out.tasks.push_back({h, n});
      }
    }
  }
  return out;
}

TpBfsOutcome tp_bfs(const CsrGraph& g, BfsTask task, std::uint32_t threshold,
                    std::uint32_t c_max, ClaimTable& claims, std::uint32_t owner,
                    std::atomic<std::uint64_t>* adjacency_reads) {
  // Stale task: the start was claimed or classified by an earlier search.
  if (!claims.try_claim(task.start, owner))
    return {TpBfsStatus::AbortedOverlap, {}};

  std::vector<NodeId> visited{task.start};  // v_local, FIFO frontier
  std::vector<NodeId> hubs{task.hub};       // h_local
  std::unordered_set<NodeId> hub_seen{task.hub};

  size_t query = 0;
  while (query != visited.size()) {
    NodeId node = visited[query];
    if (adjacency_reads)
      adjacency_reads->fetch_add(g.degree(node), std::memory_order_relaxed);
    for (NodeId n : g.neighbors(node)) {
      if (g.degree(n) >= threshold) {
        if (hub_seen.insert(n).second) hubs.push_back(n);
        continue;
      }
      if (claims.owner_of(n) == owner) continue;  // locally visited
      if (!claims.try_claim(n, owner)) {
        claims.release(visited);
        return {TpBfsStatus::AbortedOverlap, {}};
      }
      visited.push_back(n);
      // The oversized region stays claimed until the round barrier; sibling
      // tasks walking into it abort on overlap instead of re-exploring it.
      if (visited.size() > c_max) return {TpBfsStatus::AbortedSize, {}};
    }
    ++query;
  }

  // Island complete: promote claims and assemble the bitmap.
  Island island;
  island.nodes = std::move(visited);
  island.hubs = std::move(hubs);
  const std::uint32_t h = static_cast<std::uint32_t>(island.hubs.size());
  const std::uint32_t n = static_cast<std::uint32_t>(island.nodes.size());
  std::unordered_map<NodeId, std::uint32_t> node_at, hub_at;
  for (std::uint32_t i = 0; i < n; ++i) node_at[island.nodes[i]] = i;
  for (std::uint32_t i = 0; i < h; ++i) hub_at[island.hubs[i]] = i;

  island.bitmap = BitMatrix(h + n, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (NodeId v : g.neighbors(island.nodes[i])) {
      if (auto it = node_at.find(v); it != node_at.end()) {
        island.bitmap.set(h + i, it->second);
      } else if (auto ht = hub_at.find(v); ht != hub_at.end()) {
        island.bitmap.set(ht->second, i);
      } else {
        claims.release(island.nodes);
        throw ContractViolation("tp_bfs: closure breach at node " + std::to_string(v));
      }
    }
  }
  for (NodeId u : island.nodes) claims.mark_classified(u);
  return {TpBfsStatus::Completed, std::move(island)};
}

namespace {

constexpr std::uint8_t kUnclassified = 0;
constexpr std::uint8_t kHub = 1;
constexpr std::uint8_t kIslandNode = 2;

std::uint32_t auto_th_init(const CsrGraph& g) {
  return std::max<std::uint32_t>(1, (g.max_degree() + 1) / 2);
}

}  // namespace

IslandizationResult islandize(const CsrGraph& g, const LocatorConfig& cfg, IslandSink* sink) {
  cfg.validate();
  IslandizationResult result;
  result.num_nodes = g.num_nodes;
  if (g.num_nodes == 0) return result;

  const bool parallel = cfg.mode == LocatorMode::SeededParallel && cfg.p2 > 1;
  std::uint32_t th = cfg.th_init ? cfg.th_init : auto_th_init(g);

  std::vector<std::uint8_t> classification(g.num_nodes, kUnclassified);
  ClaimTable claims(g.num_nodes);
  std::atomic<std::uint64_t> adjacency_reads{0};
  NodeId unclassified = g.num_nodes;
  std::mt19937_64 rng(cfg.seed);

  std::uint32_t round_idx = 0;
  bool forced_decay_pending = false;
  while (unclassified > 0) {
    RoundRecord record;
    record.threshold = th;
    record.forced_decay = forced_decay_pending;
    forced_decay_pending = false;

    record.hubs = detect_hubs(g, th, classification, parallel ? cfg.p1 : 1);
    for (NodeId h : record.hubs) {
      classification[h] = kHub;
      claims.mark_classified(h);
      --unclassified;
    }
    result.hub_set.insert(result.hub_set.end(), record.hubs.begin(), record.hubs.end());

    std::vector<std::uint8_t> is_hub(g.num_nodes, 0);
    for (NodeId h : result.hub_set) is_hub[h] = 1;
    auto assignment = assign_tasks(g, record.hubs, is_hub, &adjacency_reads);
    for (auto e : assignment.inter_hub) result.inter_hub_edges.push_back(e);

    auto& tasks = assignment.tasks;
    if (parallel && tasks.size() > 1) {
      for (size_t i = tasks.size(); i > 1; --i)
        std::swap(tasks[i - 1], tasks[rng() % i]);
    }

    std::vector<TpBfsOutcome> outcomes(tasks.size());
    if (parallel && tasks.size() > 1) {
      std::atomic<size_t> next{0};
      auto worker = [&] {
        for (;;) {
          size_t i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= tasks.size()) break;
          outcomes[i] = tp_bfs(g, tasks[i], th, cfg.c_max, claims,
                               static_cast<std::uint32_t>(i + 1), &adjacency_reads);
        }
      };
      std::vector<std::thread> pool;
      for (std::uint32_t w = 0; w < cfg.p2; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    } else {
      for (size_t i = 0; i < tasks.size(); ++i)
        outcomes[i] = tp_bfs(g, tasks[i], th, cfg.c_max, claims,
                             static_cast<std::uint32_t>(i + 1), &adjacency_reads);
    }

    for (auto& outcome : outcomes) {
      if (outcome.status != TpBfsStatus::Completed) continue;
      Island& island = outcome.island;
      island.round = round_idx;
      for (NodeId u : island.nodes) {
        classification[u] = kIslandNode;
        --unclassified;
      }
      for (NodeId h : island.hubs)
        if (classification[h] != kHub)
          throw ContractViolation("islandize: island hub not in hub set");
      record.num_islands++;
      if (sink) sink->on_island(island);
      result.islands.push_back(std::move(island));
    }

    if (th == 1 && unclassified > 0) {
      // Terminal round: everything with degree >= 1 became a hub above, so
      // only isolated nodes remain.
      for (NodeId u = 0; u < g.num_nodes; ++u) {
        if (classification[u] != kUnclassified) continue;
        if (g.degree(u) != 0)
          throw ContractViolation("islandize: non-isolated node unclassified at threshold 1");
        Island singleton;
        singleton.nodes = {u};
        singleton.bitmap = BitMatrix(1, 1);
        singleton.round = round_idx;
        classification[u] = kIslandNode;
        claims.mark_classified(u);
        --unclassified;
        record.num_islands++;
        if (sink) sink->on_island(singleton);
        result.islands.push_back(std::move(singleton));
      }
    }

    claims.release_all_owned();  // round barrier frees size-aborted regions
    result.rounds.push_back(std::move(record));
    ++round_idx;
    if (unclassified == 0) break;

    std::uint32_t next_th = cfg.decay.apply(th);
    if (next_th >= th) {  // decay stuck; force progress and record it
      next_th = th > 1 ? th - 1 : 1;
      forced_decay_pending = true;
    }
    th = next_th;
  }

  result.adjacency_reads = adjacency_reads.load();
  return result;
}

NodePermutation islandization_permutation(const IslandizationResult& result) {
  NodePermutation perm;
  perm.order.reserve(result.num_nodes);
  for (std::uint32_t r = 0; r < result.rounds.size(); ++r) {
    const auto& round = result.rounds[r];
    perm.order.insert(perm.order.end(), round.hubs.begin(), round.hubs.end());
    for (const auto& island : result.islands)
      if (island.round == r)
        perm.order.insert(perm.order.end(), island.nodes.begin(), island.nodes.end());
  }
  if (!perm.valid_for(result.num_nodes))
    throw ContractViolation("islandization_permutation: not a bijection");
  return perm;
}

void validate_islandization(const CsrGraph& g, const IslandizationResult& result,
                            std::uint32_t c_max) {
  if (result.num_nodes != g.num_nodes)
    throw ContractViolation("validate: node count mismatch");

  // Partition: every node is a hub or in exactly one island.
  std::vector<std::uint8_t> role(g.num_nodes, 0);
  for (NodeId h : result.hub_set) {
    if (role[h]) throw ContractViolation("validate: node classified twice");
    role[h] = 1;
  }
  for (const auto& island : result.islands) {
    if (island.nodes.empty()) throw ContractViolation("validate: empty island");
    if (c_max && island.nodes.size() > c_max)
      throw ContractViolation("validate: island exceeds c_max");
    for (NodeId u : island.nodes) {
      if (role[u]) throw ContractViolation("validate: node classified twice");
      role[u] = 2;
    }
  }
  for (NodeId u = 0; u < g.num_nodes; ++u)
    if (!role[u]) throw ContractViolation("validate: unclassified node " + std::to_string(u));

  // Closure + bitmap consistency; count covered edges as we go.
  std::uint64_t covered = 0;
  for (const auto& island : result.islands) {
    const std::uint32_t h = static_cast<std::uint32_t>(island.hubs.size());
    const std::uint32_t n = static_cast<std::uint32_t>(island.nodes.size());
    if (island.bitmap.rows() != h + n || island.bitmap.cols() != n)
      throw ContractViolation("validate: bitmap shape mismatch");
    std::unordered_map<NodeId, std::uint32_t> node_at;
    std::unordered_set<NodeId> hub_of;
    for (std::uint32_t i = 0; i < n; ++i) node_at[island.nodes[i]] = i;
    for (NodeId hb : island.hubs) {
      if (role[hb] != 1) throw ContractViolation("validate: island hub is not a hub");
      hub_of.insert(hb);
    }
    std::uint64_t bits = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      NodeId u = island.nodes[i];
      for (NodeId v : g.neighbors(u)) {
        if (auto it = node_at.find(v); it != node_at.end()) {
          if (!island.bitmap.get(h + i, it->second))
            throw ContractViolation("validate: missing island-island bit");
          ++bits;
        } else if (hub_of.count(v)) {
          if (!island.bitmap.get(static_cast<std::uint32_t>(
                                     std::find(island.hubs.begin(), island.hubs.end(), v) -
                                     island.hubs.begin()),
                                 i))
            throw ContractViolation("validate: missing hub-island bit");
          ++bits;
        } else {
          throw ContractViolation("validate: closure breach, node " + std::to_string(u) +
                                  " neighbors " + std::to_string(v));
        }
      }
    }
    // bits counted island-island edges twice and hub-island edges once per
    // direction; bitmap popcount counts them once each.
    std::uint64_t hub_bits = 0;
    for (std::uint32_t r = 0; r < h; ++r) hub_bits += island.bitmap.row_popcount(r);
    std::uint64_t node_bits = island.bitmap.popcount() - hub_bits;
    if (bits != node_bits + hub_bits)
      throw ContractViolation("validate: bitmap has bits not in graph");
    covered += hub_bits + node_bits / 2;
  }

  std::set<std::pair<NodeId, NodeId>> ih(result.inter_hub_edges.begin(),
                                         result.inter_hub_edges.end());
  if (ih.size() != result.inter_hub_edges.size())
    throw ContractViolation("validate: duplicate inter-hub edge");
  for (auto [u, v] : ih) {
    if (u >= v) throw ContractViolation("validate: inter-hub pair not ordered");
    if (role[u] != 1 || role[v] != 1)
      throw ContractViolation("validate: inter-hub endpoint not a hub");
    if (!g.has_edge(u, v)) throw ContractViolation("validate: inter-hub edge not in graph");
  }
  for (NodeId u : result.hub_set)
    for (NodeId v : g.neighbors(u))
      if (u < v && role[v] == 1 && !ih.count({u, v}))
        throw ContractViolation("validate: hub-hub edge missing from inter-hub list");

  if (covered + ih.size() != g.num_undirected_edges())
    throw ContractViolation("validate: edge cover mismatch");
}

nlohmann::json islandization_to_json(const IslandizationResult& result) {
  nlohmann::json j;
  j["num_nodes"] = result.num_nodes;
  j["hubs"] = result.hub_set;
  j["adjacency_reads"] = result.adjacency_reads;
  auto islands = nlohmann::json::array();
  for (const auto& island : result.islands) {
    nlohmann::json ji;
    ji["round"] = island.round;
    ji["nodes"] = island.nodes;
    ji["hubs"] = island.hubs;
    ji["bitmap_rle"] = island.bitmap.to_rle();
    islands.push_back(std::move(ji));
  }
  j["islands"] = std::move(islands);
  auto edges = nlohmann::json::array();
  for (auto [u, v] : result.inter_hub_edges) edges.push_back({u, v});
  j["inter_hub_edges"] = std::move(edges);
  auto rounds = nlohmann::json::array();
  for (const auto& r : result.rounds) {
    nlohmann::json jr;
    jr["threshold"] = r.threshold;
    jr["num_hubs"] = r.hubs.size();
    jr["num_islands"] = r.num_islands;
    jr["hub_ids"] = r.hubs;
    if (r.forced_decay) jr["forced_decay"] = true;
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

IslandizationResult islandization_from_json(const nlohmann::json& j) {
  IslandizationResult result;
  result.num_nodes = j.at("num_nodes").get<NodeId>();
  result.hub_set = j.at("hubs").get<std::vector<NodeId>>();
  result.adjacency_reads = j.at("adjacency_reads").get<std::uint64_t>();
  for (const auto& ji : j.at("islands")) {
    Island island;
    island.round = ji.at("round").get<std::uint32_t>();
    island.nodes = ji.at("nodes").get<std::vector<NodeId>>();
    island.hubs = ji.at("hubs").get<std::vector<NodeId>>();
    island.bitmap = BitMatrix::from_rle(
        static_cast<std::uint32_t>(island.hubs.size() + island.nodes.size()),
        static_cast<std::uint32_t>(island.nodes.size()),
        ji.at("bitmap_rle").get<std::vector<std::uint64_t>>());
    result.islands.push_back(std::move(island));
  }
  for (const auto& je : j.at("inter_hub_edges"))
    result.inter_hub_edges.emplace_back(je.at(0).get<NodeId>(), je.at(1).get<NodeId>());
  for (const auto& jr : j.at("rounds")) {
    RoundRecord r;
    r.threshold = jr.at("threshold").get<std::uint32_t>();
    r.hubs = jr.at("hub_ids").get<std::vector<NodeId>>();
    r.num_islands = jr.at("num_islands").get<std::uint32_t>();
    r.forced_decay = jr.value("forced_decay", false);
    result.rounds.push_back(std::move(r));
  }
  return result;
}

}  // namespace isle
