// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion prints the measured values next to the expected
// ones so regressions are readable from the log.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "isle/baseline.hpp"
#include "isle/consumer.hpp"
#include "isle/gcn.hpp"
#include "isle/locator.hpp"
#include "isle/matrix.hpp"
#include "isle/sbm.hpp"
#include "support.hpp"

using namespace isle;
namespace ts = testsupport;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Checker {
  std::ostringstream log;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << "\n    FAILED: " << what;
    }
  }
  void note(const std::string& what) { log << "\n    " << what; }
};

void report(int id, const std::string& title, double seconds, double budget, Checker& c) {
  bool in_budget = budget <= 0.0 || seconds < budget;
  if (!in_budget) {
    c.ok = false;
    c.log << "\n    FAILED: runtime " << seconds << "s exceeds budget " << budget << "s";
  }
  std::printf("[%s] criterion %d: %s (%.2fs)%s\n", c.ok ? "PASS" : "FAIL", id, title.c_str(),
              seconds, c.log.str().c_str());
  std::fflush(stdout);
  if (!c.ok) ++g_failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<LayerSpec> two_layers(size_t d0, size_t d1, size_t d2, Normalization norm,
                                  std::uint64_t seed) {
  std::vector<LayerSpec> specs(2);
  specs[0].weight = seeded_uniform(d0, d1, seed);
  specs[0].activation = Activation::Relu;
  specs[0].normalize = norm;
  specs[1].weight = seeded_uniform(d1, d2, seed + 1);
  specs[1].activation = Activation::None;
  specs[1].normalize = norm;
  return specs;
}

CsrGraph with_isolated_nodes(const CsrGraph& g, NodeId extra) {
  auto edges = g.undirected_edges();
  return build_csr(g.num_nodes + extra, edges);
}

// ---------------------------------------------------------------------------

void criterion_1() {
  auto t0 = Clock::now();
  Checker c;

  // two nodes sharing four neighbors; column order makes the groups
  // {shared-4},{pair} with k = 4
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId b : {4, 5})
    for (NodeId d : {0, 1, 2, 3}) edges.emplace_back(b, d);
  auto g = build_csr(6, edges);
  auto island = ts::island_from_graph(g, {0, 1, 2, 3, 4, 5}, {});
  auto xw = seeded_integers(6, 8, 3, -5, 5);

  ConsumerConfig cfg;
  cfg.k = 4;
  OpLedger ledger;
  auto pre = pre_aggregate(xw, cfg.k, &ledger);
  HubAccumulator acc(8);
  auto out = aggregate_island(island, xw, pre, cfg, acc, ledger);

  std::uint64_t total = ledger.actual_adds + ledger.actual_subs + ledger.preagg_formation_adds;
  c.expect(ledger.baseline_adds == 16, "baseline vector ops == 16");
  c.expect(total == 10, "reuse vector ops == 10, got " + std::to_string(total));
  c.expect(ledger.pruning_rate() == 0.375, "pruning rate == 0.375 exact");
  auto want = ts::neighbor_sum_oracle(g, xw);
  c.expect(out.data == want.data, "pruned outputs equal direct accumulation");
  c.note("baseline=16 reuse=10 pruning=37.5%");

  report(1, "shared-neighbor island arithmetic (16 -> 10 vector ops)",
         std::chrono::duration<double>(Clock::now() - t0).count(), 1.0, c);
}

bool losslessness_sweep(Checker& c, LocatorMode mode) {
  int graphs_checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    NodeId n = static_cast<NodeId>(20 + (seed * 13) % 181);  // 20..200
    double density = 0.01 + 0.015 * (seed % 8);
    auto g = ts::erdos_renyi(n, density, 7000 + seed);
    auto x = seeded_uniform(n, 6, seed);
    auto norm = seed % 2 ? Normalization::Sym : Normalization::None;
    auto specs = two_layers(6, 5, 3, norm, seed + 1);
    auto ref = reference_forward(g, x, specs);

    for (std::uint32_t k : {2u, 4u, 8u}) {
      for (auto policy : {WindowPolicy::MinCost, WindowPolicy::PaperThreshold}) {
        InferenceConfig cfg;
        cfg.locator.mode = mode;
        cfg.locator.p1 = cfg.locator.p2 = mode == LocatorMode::SeededParallel ? 8 : 1;
        cfg.locator.seed = seed;
        cfg.consumer.k = k;
        cfg.consumer.policy = policy;
        cfg.consumer.num_workers = mode == LocatorMode::SeededParallel ? 8 : 1;
        auto result = run_inference(g, x, specs, cfg);
        double diff = max_relative_diff(result.output, ref);
        if (diff >= 1e-10) {
          c.expect(false, "graph seed " + std::to_string(seed) + " k " + std::to_string(k) +
                              " rel diff " + sci(diff));
          return false;
        }
      }
    }
    ++graphs_checked;
  }
  c.note("random graphs checked: " + std::to_string(graphs_checked) +
         " x {2,4,8} x {min-cost,paper}");

  auto bench = ts::benchmark_graph("cora");
  auto x = seeded_uniform(bench.graph.num_nodes, 1433, 99);
  auto specs = two_layers(1433, 16, 7, Normalization::Sym, 100);
  auto ref = reference_forward(bench.graph, x, specs);
  InferenceConfig cfg;
  cfg.locator.mode = mode;
  cfg.locator.p1 = cfg.locator.p2 = mode == LocatorMode::SeededParallel ? 8 : 1;
  cfg.consumer.num_workers = mode == LocatorMode::SeededParallel ? 8 : 1;
  auto result = run_inference(bench.graph, x, specs, cfg);
  double diff = max_relative_diff(result.output, ref);
  c.expect(diff < 1e-6, "2708-node benchmark rel diff " + sci(diff) + " < 1e-6");
  c.note("benchmark 1433->16->7 rel diff " + sci(diff));
  return true;
}

void criterion_2() {
  auto t0 = Clock::now();
  Checker c;
  losslessness_sweep(c, LocatorMode::DeterministicSequential);
  report(2, "losslessness of pruned aggregation vs dense reference",
         std::chrono::duration<double>(Clock::now() - t0).count(), 120.0, c);
}

bool structural_invariants(Checker& c, LocatorMode mode, std::uint64_t seed_salt) {
  auto check_graph = [&](const CsrGraph& g, const std::string& name, LocatorConfig cfg) {
    cfg.mode = mode;
    if (mode == LocatorMode::SeededParallel) {
      cfg.p1 = 4;
      cfg.p2 = 8;
      cfg.seed = seed_salt;
    }
    auto result = islandize(g, cfg);
    try {
      validate_islandization(g, result, cfg.c_max);
    } catch (const std::exception& e) {
      c.expect(false, name + ": " + e.what());
      return;
    }
    auto outside = ts::coords_outside_region(g, result);
    c.expect(outside == 0,
             name + ": " + std::to_string(outside) + " non-zeros outside hub rows/cols + blocks");
  };

  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto g = ts::erdos_renyi(40 + 30 * (seed % 5), 0.01 + 0.04 * (seed % 4), 300 + seed);
    check_graph(g, "random-" + std::to_string(seed), LocatorConfig{});
    LocatorConfig tight;
    tight.c_max = 8;
    check_graph(g, "random-tight-" + std::to_string(seed), tight);
  }
  check_graph(generate_sbm({.num_islands = 12, .island_size = 9, .num_hubs = 5, .p_in = 0.7,
                            .hub_attach = 2, .seed = 17, .shuffle_ids = true}).graph,
              "sbm", LocatorConfig{});
  check_graph(ts::star_graph(24), "star", LocatorConfig{});
  check_graph(ts::path_graph(50), "path", LocatorConfig{});
  check_graph(ts::complete_graph(20), "complete", LocatorConfig{});
  check_graph(with_isolated_nodes(ts::erdos_renyi(50, 0.05, 7), 9), "isolated", LocatorConfig{});
  for (const char* name : {"cora", "citeseer", "pubmed"})
    check_graph(ts::benchmark_graph(name).graph, name, LocatorConfig{});
  return c.ok;
}

void criterion_3() {
  auto t0 = Clock::now();
  Checker c;
  structural_invariants(c, LocatorMode::DeterministicSequential, 0);
  c.note("partition/closure/cover validated; region test blank outside clusters");
  report(3, "decomposition invariants and blank-region test",
         std::chrono::duration<double>(Clock::now() - t0).count(), 60.0, c);
}

void criterion_4() {
  auto t0 = Clock::now();
  Checker c;
  auto sbm = generate_sbm({.num_islands = 4, .island_size = 6, .num_hubs = 2, .p_in = 1.0,
                           .hub_attach = 2, .seed = 11, .shuffle_ids = true});
  // block-node degree 7, hub degree 25; threshold strictly between
  LocatorConfig cfg;
  cfg.th_init = 12;
  auto result = islandize(sbm.graph, cfg);
  validate_islandization(sbm.graph, result, cfg.c_max);

  std::set<NodeId> got_hubs(result.hub_set.begin(), result.hub_set.end());
  std::set<NodeId> want_hubs(sbm.hubs.begin(), sbm.hubs.end());
  c.expect(got_hubs == want_hubs, "hub set equals planted hubs");

  std::set<std::set<NodeId>> got, want;
  for (const auto& island : result.islands) got.insert({island.nodes.begin(), island.nodes.end()});
  for (const auto& block : sbm.blocks) want.insert({block.begin(), block.end()});
  c.expect(got == want, "islands equal planted blocks exactly");
  c.note("2 hubs + 4 blocks of 6 recovered at threshold 12");
  report(4, "planted hub/block recovery",
         std::chrono::duration<double>(Clock::now() - t0).count(), 0.0, c);
}

void criterion_5() {
  auto t0 = Clock::now();
  Checker c;
  for (const char* name : {"cora", "citeseer", "pubmed"}) {
    auto bench = ts::benchmark_graph(name);
    LocatorConfig lcfg;
    auto islands = islandize(bench.graph, lcfg);
    auto xw = seeded_uniform(bench.graph.num_nodes, 16, 5);
    for (std::uint32_t k : {2u, 4u}) {
      ConsumerConfig ccfg;
      ccfg.k = k;
      ccfg.policy = WindowPolicy::MinCost;
      std::vector<WindowRecord> trace;
      auto result = consume_decomposition(islands, xw, ccfg, nullptr, &trace);
      double rate = result.ledger.pruning_rate();
      c.expect(rate > 0.0, std::string(name) + " k=" + std::to_string(k) +
                               " pruning rate > 0, got " + std::to_string(rate));

      // sampled windows match the exhaustive per-window minimum
      size_t stride = trace.size() > 1000 ? trace.size() / 1000 : 1;
      size_t bad = 0, sampled = 0;
      for (size_t i = 0; i < trace.size() && sampled < 1000; i += stride, ++sampled) {
        const auto& w = trace[i];
        std::uint32_t best = std::min(w.nnz, 1 + w.width - w.nnz);
        if (w.nnz == 0 || w.cost != best) ++bad;
      }
      c.expect(bad == 0, std::string(name) + " k=" + std::to_string(k) +
                             " sampled window costs equal exhaustive minimum");
      std::ostringstream line;
      line << name << " k=" << k << ": pruning " << rate * 100.0 << "%";
      c.note(line.str());
    }
  }
  c.note("reference value: ~38% average pruning (reported, not asserted)");
  report(5, "pruning-rate reporting with per-window cost audit",
         std::chrono::duration<double>(Clock::now() - t0).count(), 0.0, c);
}

void criterion_6() {
  auto t0 = Clock::now();
  Checker c;
  auto run_case = [&](const CsrGraph& g, const std::string& name) {
    const size_t L = 16;
    auto xw = seeded_uniform(g.num_nodes, L, 9);
    std::uint64_t buffer = g.num_nodes * L / 16;  // one sixteenth of XW

    LocatorConfig lcfg;
    auto islands = islandize(g, lcfg);
    auto mem_island = make_strategy_model(Strategy::Island, buffer);
    run_baseline(g, xw, Strategy::Island, &mem_island, &islands);
    auto mem_pull = make_strategy_model(Strategy::PullRowWise, buffer);
    run_baseline(g, xw, Strategy::PullRowWise, &mem_pull);
    auto mem_push = make_strategy_model(Strategy::PushOuterProduct, buffer);
    run_baseline(g, xw, Strategy::PushOuterProduct, &mem_push);

    c.expect(mem_island.reads_words() < mem_pull.reads_words(),
             name + ": island reads < pull-row reads");
    c.expect(mem_island.reads_words() < mem_push.reads_words(),
             name + ": island reads < push-outer reads");

    std::uint64_t island_nodes = 0;
    for (const auto& island : islands.islands) island_nodes += island.nodes.size();
    const auto& stream = mem_island.region_stats(mem_island.region_id("island_xw"));
    c.expect(stream.read_events == island_nodes,
             name + ": island-node XW read misses == island node count");
    std::ostringstream line;
    line << name << ": island " << mem_island.reads_words() << " < pull-row "
         << mem_pull.reads_words() << ", push-outer " << mem_push.reads_words()
         << " (buffer " << buffer << "w)";
    c.note(line.str());
  };
  run_case(ts::benchmark_graph("cora").graph, "cora");
  run_case(generate_sbm({.num_islands = 32, .island_size = 32, .num_hubs = 8, .p_in = 0.6,
                         .hub_attach = 2, .seed = 29, .shuffle_ids = true}).graph,
           "sbm-32x32");
  report(6, "off-chip reads: island beats pull/push, island rows fetched once",
         std::chrono::duration<double>(Clock::now() - t0).count(), 60.0, c);
}

void criterion_7() {
  auto t0 = Clock::now();
  Checker c;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = ts::erdos_renyi(60 + 20 * seed, 0.04 + 0.02 * seed, 600 + seed);
    auto xw = seeded_integers(g.num_nodes, 5, seed, -7, 7);
    auto want = ts::neighbor_sum_oracle(g, xw);
    LocatorConfig lcfg;
    auto islands = islandize(g, lcfg);
    for (Strategy s : {Strategy::PullRowWise, Strategy::PullInnerProduct,
                       Strategy::PushColumnWise, Strategy::PushOuterProduct, Strategy::Island}) {
      auto out = run_baseline(g, xw, s, nullptr, &islands);
      c.expect(out.data == want.data, std::string("seed ") + std::to_string(seed) + " " +
                                          strategy_name(s) + " output identical");
    }
  }
  c.note("5 strategies x 5 integer-feature graphs, exact equality");
  report(7, "execution strategy output equivalence",
         std::chrono::duration<double>(Clock::now() - t0).count(), 0.0, c);
}

void criterion_8() {
  auto t0 = Clock::now();
  Checker c;

  auto bench = ts::benchmark_graph("citeseer");
  LocatorConfig cfg;
  auto first = islandization_to_json(islandize(bench.graph, cfg)).dump();
  for (int run = 1; run < 5; ++run) {
    auto again = islandization_to_json(islandize(bench.graph, cfg)).dump();
    if (again != first) {
      c.expect(false, "sequential run " + std::to_string(run) + " differs");
      break;
    }
  }
  c.note("5 sequential runs bit-identical");

  for (std::uint64_t run = 0; run < 3; ++run) {
    Checker inner;
    structural_invariants(inner, LocatorMode::SeededParallel, run * 31 + 1);
    c.expect(inner.ok, "parallel invariants run " + std::to_string(run) + inner.log.str());
  }
  Checker loss;
  bool ok = losslessness_sweep(loss, LocatorMode::SeededParallel);
  c.expect(ok && loss.ok, "parallel losslessness sweep" + loss.log.str());
  c.note("parallel mode (8 workers): criteria 2-3 assertions re-run");
  report(8, "sequential determinism and parallel validity",
         std::chrono::duration<double>(Clock::now() - t0).count(), 0.0, c);
}

void criterion_9() {
  auto t0 = Clock::now();
  Checker c;
  auto bench = ts::benchmark_graph("cora");
  const auto& g = bench.graph;
  auto x = seeded_uniform(g.num_nodes, 1433, 4);
  auto specs = two_layers(1433, 16, 7, Normalization::Sym, 5);
  InferenceConfig cfg;
  auto result = run_inference(g, x, specs, cfg);

  std::uint64_t want_macs = std::uint64_t(g.num_nodes) * 1433 * 16 +
                            std::uint64_t(g.num_nodes) * 16 * 7;
  c.expect(result.report.total.combination_macs == want_macs,
           "combination_macs == sum of N*d_l*d_{l+1}");
  std::uint64_t want_adds = 2 * g.nnz();  // adjacency structure, both layers
  c.expect(result.report.total.baseline_adds == want_adds,
           "baseline_adds == per-layer adjacency nnz, got " +
               std::to_string(result.report.total.baseline_adds) + " want " +
               std::to_string(want_adds));
  c.expect(result.report.self_adds == 2ull * g.num_nodes,
           "self-loop adds == N per layer (sym normalization)");
  std::ostringstream line;
  line << "aggregation share " << result.report.aggregation_share * 100.0
       << "% (reference value: ~23% dataset average; not asserted)";
  c.note(line.str());
  report(9, "op-count identities and aggregation-share report",
         std::chrono::duration<double>(Clock::now() - t0).count(), 0.0, c);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("================\n%s (%d failure%s)\n", g_failures ? "FAILURE" : "SUCCESS",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures ? 1 : 0;
}
