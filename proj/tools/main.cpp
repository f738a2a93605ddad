#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "isle/baseline.hpp"
#include "isle/edge_list.hpp"
#include "isle/errors.hpp"
#include "isle/gcn.hpp"
#include "isle/locator.hpp"
#include "isle/matrix.hpp"
#include "isle/sbm.hpp"
#include "isle/spy.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("ISLANDIZE_LOG");
  return env ? std::atoi(env) : 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[isle] " << msg << "\n";
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw isle::IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw isle::IoError("write failed: " + path);
}

struct GraphArgs {
  std::string input;
  bool one_indexed = false;
  std::uint32_t num_nodes = 0;
  bool compact_ids = false;

  isle::CsrGraph load() const {
    isle::IngestOptions opts;
    opts.one_indexed = one_indexed;
    if (num_nodes > 0) opts.num_nodes = num_nodes;
    opts.compact_ids = compact_ids;
    auto g = isle::load_edge_list(input, opts);
    log_info("loaded " + input + ": " + std::to_string(g.num_nodes) + " nodes, " +
             std::to_string(g.num_undirected_edges()) + " edges");
    return g;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "edge list file")->required();
    cmd->add_flag("--one-indexed", one_indexed, "ids in the file start at 1");
    cmd->add_option("--num-nodes", num_nodes, "override node count");
    cmd->add_flag("--compact-ids", compact_ids, "renumber sparse id spaces");
  }
};

struct LocatorArgs {
  std::uint32_t th_init = 0;
  std::uint32_t c_max = 64;
  bool decay_halve = false;
  std::uint32_t decay_num = 1, decay_den = 2;
  std::string mode = "seq";
  std::uint64_t seed = 0;
  std::uint32_t threads = 1;

  isle::LocatorConfig config() const {
    isle::LocatorConfig cfg;
    cfg.th_init = th_init;
    cfg.c_max = c_max;
    cfg.decay = decay_halve ? isle::DecayRule{1, 2} : isle::DecayRule{decay_num, decay_den};
    if (mode == "seq") {
      cfg.mode = isle::LocatorMode::DeterministicSequential;
    } else if (mode == "par") {
      cfg.mode = isle::LocatorMode::SeededParallel;
    } else {
      throw isle::ConfigError("mode must be seq or par");
    }
    cfg.p1 = threads;
    cfg.p2 = threads;
    cfg.seed = seed;
    return cfg;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--th-init", th_init, "initial hub threshold (0 = half the max degree)");
    cmd->add_option("--c-max", c_max, "max island size");
    cmd->add_flag("--decay-halve", decay_halve, "halve the threshold each round (default)");
    cmd->add_option("--decay-num", decay_num, "decay ratio numerator");
    cmd->add_option("--decay-den", decay_den, "decay ratio denominator");
    cmd->add_option("--mode", mode, "seq | par")->check(CLI::IsMember({"seq", "par"}));
    cmd->add_option("--seed", seed, "seed for par mode task order");
    cmd->add_option("--threads", threads, "worker count in par mode");
  }
};

std::vector<size_t> parse_dims(const std::string& text) {
  std::vector<size_t> dims;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    dims.push_back(static_cast<size_t>(std::stoull(tok)));
  if (dims.size() < 2) throw isle::ConfigError("--layers needs at least two dims");
  return dims;
}

int cmd_gen(const std::string& sbm, std::uint32_t hubs, double p_in, std::uint32_t hub_attach,
            std::uint64_t seed, bool shuffle, const std::string& out,
            const std::string& meta_path) {
  auto x = sbm.find('x');
  if (x == std::string::npos) throw isle::ConfigError("--sbm expects ISLANDSxSIZE, e.g. 4x6");
  isle::SbmSpec spec;
  spec.num_islands = static_cast<std::uint32_t>(std::stoul(sbm.substr(0, x)));
  spec.island_size = static_cast<std::uint32_t>(std::stoul(sbm.substr(x + 1)));
  spec.num_hubs = hubs;
  spec.p_in = p_in;
  spec.hub_attach = hub_attach;
  spec.seed = seed;
  spec.shuffle_ids = shuffle;
  auto g = isle::generate_sbm(spec);
  isle::write_edge_list(g.graph, out);
  std::cout << "wrote " << out << ": " << g.graph.num_nodes << " nodes, "
            << g.graph.num_undirected_edges() << " edges\n";
  if (!meta_path.empty()) {
    nlohmann::json meta;
    meta["hubs"] = g.hubs;
    meta["blocks"] = g.blocks;
    write_json(meta, meta_path);
  }
  return 0;
}

int cmd_islandize(const GraphArgs& gargs, const LocatorArgs& largs, const std::string& out,
                  const std::string& spy_pgm, const std::string& spy_csv, std::uint32_t side) {
  auto g = gargs.load();
  auto cfg = largs.config();
  auto result = isle::islandize(g, cfg);
  isle::validate_islandization(g, result, cfg.c_max);
  if (!out.empty()) {
    auto j = isle::islandization_to_json(result);
    j["timestamp"] = utc_timestamp();
    write_json(j, out);
  }
  if (!spy_pgm.empty() || !spy_csv.empty()) {
    auto perm = isle::islandization_permutation(result);
    if (!spy_pgm.empty()) isle::emit_spy_pgm(g, perm, spy_pgm, side);
    if (!spy_csv.empty()) isle::emit_spy_csv(g, perm, spy_csv);
  }
  std::cout << "islandized " << g.num_nodes << " nodes: " << result.hub_set.size() << " hubs, "
            << result.islands.size() << " islands, " << result.inter_hub_edges.size()
            << " inter-hub edges, " << result.rounds.size() << " rounds\n";
  return 0;
}

int cmd_infer(const GraphArgs& gargs, const LocatorArgs& largs, const std::string& layers,
              const std::string& normalize, std::uint32_t k, const std::string& policy,
              const std::string& weights, std::uint64_t weight_seed,
              const std::string& features, std::uint64_t feature_seed, bool streaming,
              std::uint32_t workers, std::uint64_t buffer_words, const std::string& report) {
  auto g = gargs.load();
  auto dims = parse_dims(layers);

  std::vector<isle::LayerSpec> specs;
  std::vector<std::string> weight_files;
  if (!weights.empty()) {
    std::stringstream ss(weights);
    std::string tok;
    while (std::getline(ss, tok, ',')) weight_files.push_back(tok);
    if (weight_files.size() != dims.size() - 1)
      throw isle::ConfigError("--weights needs one file per layer");
  }
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    isle::LayerSpec spec;
    spec.weight = weight_files.empty()
                      ? isle::seeded_uniform(dims[l], dims[l + 1], weight_seed + l)
                      : isle::load_matrix(weight_files[l], dims[l], dims[l + 1]);
    spec.activation = l + 2 < dims.size() ? isle::Activation::Relu : isle::Activation::None;
    if (normalize == "sym") {
      spec.normalize = isle::Normalization::Sym;
    } else if (normalize == "none") {
      spec.normalize = isle::Normalization::None;
    } else {
      throw isle::ConfigError("--normalize must be sym or none");
    }
    specs.push_back(std::move(spec));
  }

  isle::Matrix x = features.empty() ? isle::seeded_uniform(g.num_nodes, dims[0], feature_seed)
                                    : isle::load_matrix(features, g.num_nodes, dims[0]);

  isle::InferenceConfig cfg;
  cfg.locator = largs.config();
  cfg.consumer.k = k;
  cfg.consumer.num_workers = workers;
  if (policy == "min-cost") {
    cfg.consumer.policy = isle::WindowPolicy::MinCost;
  } else if (policy == "paper") {
    cfg.consumer.policy = isle::WindowPolicy::PaperThreshold;
  } else {
    throw isle::ConfigError("--policy must be min-cost or paper");
  }
  cfg.streaming = streaming;
  cfg.buffer_words = buffer_words;

  auto result = isle::run_inference(g, x, specs, cfg);
  auto& ledger = result.report.total;
  std::cout << "inference done: " << specs.size() << " layers, pruning_rate "
            << ledger.pruning_rate() << ", aggregation_share " << result.report.aggregation_share
            << "\n";
  if (!report.empty()) {
    auto j = result.report.to_json();
    j["timestamp"] = utc_timestamp();
    j["num_nodes"] = g.num_nodes;
    j["hubs"] = result.islands.hub_set.size();
    j["islands"] = result.islands.islands.size();
    write_json(j, report);
  }
  return 0;
}

int cmd_count(const GraphArgs& gargs, const LocatorArgs& largs, const std::string& strategy,
              std::uint64_t buffer_words, size_t dim, std::uint32_t k, std::uint64_t seed,
              const std::string& out) {
  auto s = isle::strategy_from_name(strategy);
  if (!s) throw isle::ConfigError("unknown strategy: " + strategy);
  auto g = gargs.load();
  auto xw = isle::seeded_uniform(g.num_nodes, dim, seed);
  auto mem = isle::make_strategy_model(*s, buffer_words);

  std::unique_ptr<isle::IslandizationResult> islands;
  isle::ConsumerConfig ccfg;
  ccfg.k = k;
  if (*s == isle::Strategy::Island) {
    islands = std::make_unique<isle::IslandizationResult>(isle::islandize(g, largs.config()));
    isle::validate_islandization(g, *islands);
  }
  isle::OpLedger ledger;
  isle::run_baseline(g, xw, *s, &mem, islands.get(), &ccfg, &ledger);

  auto j = mem.report(strategy);
  j["ledger"] = ledger.to_json();
  j["dim"] = dim;
  std::cout << strategy << ": reads_words " << mem.reads_words() << ", writes_words "
            << mem.writes_words() << "\n";
  if (!out.empty()) {
    j["timestamp"] = utc_timestamp();
    write_json(j, out);
  }
  return 0;
}

int cmd_spy(const GraphArgs& gargs, const std::string& result_path, const std::string& pgm,
            const std::string& csv, std::uint32_t side) {
  auto g = gargs.load();
  isle::NodePermutation perm;
  if (result_path.empty()) {
    perm = isle::identity_permutation(g.num_nodes);
  } else {
    std::ifstream in(result_path);
    if (!in) throw isle::IoError("cannot open " + result_path);
    nlohmann::json j;
    in >> j;
    auto result = isle::islandization_from_json(j);
    perm = isle::islandization_permutation(result);
  }
  if (!pgm.empty()) isle::emit_spy_pgm(g, perm, pgm, side);
  if (!csv.empty()) isle::emit_spy_csv(g, perm, csv);
  std::cout << "spy written\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hub/island graph restructuring and GCN inference toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a planted hub/block graph");
  std::string gen_sbm, gen_out, gen_meta;
  std::uint32_t gen_hubs = 0, gen_attach = 1;
  double gen_pin = 1.0;
  std::uint64_t gen_seed = 0;
  bool gen_shuffle = false;
  gen->add_option("--sbm", gen_sbm, "ISLANDSxSIZE, e.g. 4x6")->required();
  gen->add_option("--hubs", gen_hubs, "hub count");
  gen->add_option("--p-in", gen_pin, "intra-block edge probability");
  gen->add_option("--hub-attach", gen_attach, "hubs wired to each block");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--shuffle-ids", gen_shuffle, "scatter node ids");
  gen->add_option("--out", gen_out, "edge list output")->required();
  gen->add_option("--meta", gen_meta, "planted structure JSON output");

  // islandize
  auto* isl = app.add_subcommand("islandize", "restructure a graph into hubs and islands");
  GraphArgs isl_graph;
  LocatorArgs isl_locator;
  std::string isl_out, isl_spy, isl_spy_csv;
  std::uint32_t isl_side = 1024;
  isl_graph.attach(isl);
  isl_locator.attach(isl);
  isl->add_option("--out", isl_out, "result JSON");
  isl->add_option("--spy", isl_spy, "permuted spy PGM");
  isl->add_option("--spy-csv", isl_spy_csv, "permuted spy CSV");
  isl->add_option("--side", isl_side, "spy image side length");

  // infer
  auto* inf = app.add_subcommand("infer", "multi-layer GCN inference over islands");
  GraphArgs inf_graph;
  LocatorArgs inf_locator;
  std::string inf_layers, inf_normalize = "sym", inf_policy = "min-cost";
  std::string inf_weights, inf_features, inf_report;
  std::uint32_t inf_k = 2, inf_workers = 1;
  std::uint64_t inf_wseed = 7, inf_fseed = 11, inf_buffer = 0;
  bool inf_streaming = false;
  inf_graph.attach(inf);
  inf_locator.attach(inf);
  inf->add_option("--layers", inf_layers, "comma dims, e.g. 1433,16,7")->required();
  inf->add_option("--normalize", inf_normalize, "sym | none");
  inf->add_option("--k", inf_k, "pre-aggregation group size");
  inf->add_option("--policy", inf_policy, "min-cost | paper");
  inf->add_option("--weights", inf_weights, "comma-separated weight files (csv or .bin)");
  inf->add_option("--weight-seed", inf_wseed, "seed for random weights");
  inf->add_option("--features", inf_features, "feature matrix file");
  inf->add_option("--feature-seed", inf_fseed, "seed for random features");
  inf->add_flag("--streaming", inf_streaming, "overlap location and consumption");
  inf->add_option("--workers", inf_workers, "consumer worker threads");
  inf->add_option("--buffer-words", inf_buffer, "enable off-chip counting at this capacity");
  inf->add_option("--report", inf_report, "cost report JSON");

  // count
  auto* cnt = app.add_subcommand("count", "off-chip access counting per strategy");
  GraphArgs cnt_graph;
  LocatorArgs cnt_locator;
  std::string cnt_strategy, cnt_out;
  std::uint64_t cnt_buffer = 1u << 20, cnt_seed = 7;
  size_t cnt_dim = 16;
  std::uint32_t cnt_k = 2;
  cnt_graph.attach(cnt);
  cnt_locator.attach(cnt);
  cnt->add_option("--strategy", cnt_strategy,
                  "pull-row | pull-inner | push-col | push-outer | island")
      ->required();
  cnt->add_option("--buffer-words", cnt_buffer, "on-chip buffer capacity in words");
  cnt->add_option("--dim", cnt_dim, "combined feature width");
  cnt->add_option("--k", cnt_k, "pre-aggregation group size (island)");
  cnt->add_option("--xw-seed", cnt_seed, "seed for the synthetic XW matrix");
  cnt->add_option("--out", cnt_out, "report JSON");

  // spy
  auto* spy = app.add_subcommand("spy", "emit permuted adjacency spy plots");
  GraphArgs spy_graph;
  std::string spy_result, spy_pgm, spy_csv;
  std::uint32_t spy_side = 1024;
  spy_graph.attach(spy);
  spy->add_option("--result", spy_result, "islandization result JSON (identity if omitted)");
  spy->add_option("--pgm", spy_pgm, "PGM output");
  spy->add_option("--csv", spy_csv, "CSV output");
  spy->add_option("--side", spy_side, "image side length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_sbm, gen_hubs, gen_pin, gen_attach, gen_seed, gen_shuffle, gen_out,
                     gen_meta);
    if (isl->parsed())
      return cmd_islandize(isl_graph, isl_locator, isl_out, isl_spy, isl_spy_csv, isl_side);
    if (inf->parsed())
      return cmd_infer(inf_graph, inf_locator, inf_layers, inf_normalize, inf_k, inf_policy,
                       inf_weights, inf_wseed, inf_features, inf_fseed, inf_streaming,
                       inf_workers, inf_buffer, inf_report);
    if (cnt->parsed())
      return cmd_count(cnt_graph, cnt_locator, cnt_strategy, cnt_buffer, cnt_dim, cnt_k,
                       cnt_seed, cnt_out);
    if (spy->parsed()) return cmd_spy(spy_graph, spy_result, spy_pgm, spy_csv, spy_side);
  } catch (const isle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const isle::ContractViolation& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const isle::CapacityError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {  // parse/range/io on input data
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
