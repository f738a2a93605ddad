#include "isle/gcn.hpp"

#include <cmath>
#include <memory>

#include "isle/baseline.hpp"
#include "isle/errors.hpp"
#include "isle/memory_model.hpp"

namespace isle {

namespace {

constexpr NodeId kMaxDenseNodes = 4096;

void apply_activation(Matrix& m, Activation act) {
  if (act == Activation::None) return;
  for (auto& v : m.data) v = v > 0.0 ? v : 0.0;
}

std::vector<double> inv_sqrt_degree_plus_one(const CsrGraph& g) {
  std::vector<double> s(g.num_nodes);
  for (NodeId u = 0; u < g.num_nodes; ++u)
    s[u] = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) + 1.0);
  return s;
}

}  // namespace

Matrix layer_forward(const CsrGraph& g, const IslandizationResult& islands, const Matrix& x,
                     const LayerSpec& spec, const ConsumerConfig& cfg, OpLedger* ledger,
                     std::uint64_t* self_adds, MemoryModel* mem, bool charge_location) {
  if (islands.num_nodes != g.num_nodes)
    throw ContractViolation("layer_forward: decomposition belongs to a different graph");
  if (x.rows != g.num_nodes) throw ShapeError("layer_forward: feature height != num_nodes");

  OpLedger local;
  Matrix xw = combine_rows(x, spec.weight, &local);

  Matrix out;
  if (spec.normalize == Normalization::Sym) {
    auto scale = inv_sqrt_degree_plus_one(g);
    for (NodeId u = 0; u < g.num_nodes; ++u)
      for (double& v : xw.row(u)) v *= scale[u];
    auto consumed = consume_decomposition(islands, xw, cfg, mem, nullptr, charge_location);
    local.merge(consumed.ledger);
    out = std::move(consumed.output);
    for (NodeId u = 0; u < g.num_nodes; ++u) {
      auto self = xw.row(u);
      auto row = out.row(u);
      for (size_t c = 0; c < row.size(); ++c) row[c] = (row[c] + self[c]) * scale[u];
    }
    if (self_adds) *self_adds += g.num_nodes;
  } else {
    auto consumed = consume_decomposition(islands, xw, cfg, mem, nullptr, charge_location);
    local.merge(consumed.ledger);
    out = std::move(consumed.output);
  }
  apply_activation(out, spec.activation);
  if (ledger) ledger->merge(local);
  return out;
}

Matrix reference_forward(const CsrGraph& g, const Matrix& x, std::span<const LayerSpec> specs) {
  if (g.num_nodes > kMaxDenseNodes)
    throw CapacityError("reference_forward: graph too large for the dense form");
  if (x.rows != g.num_nodes) throw ShapeError("reference_forward: feature height mismatch");

  const size_t n = g.num_nodes;
  Matrix current = x;
  auto scale = inv_sqrt_degree_plus_one(g);

  for (const auto& spec : specs) {
    Matrix xw = combine_rows(current, spec.weight);
    Matrix dense(n, n);
    for (NodeId u = 0; u < n; ++u) {
      if (spec.normalize == Normalization::Sym) {
        dense.at(u, u) = scale[u] * scale[u];
        for (NodeId v : g.neighbors(u)) dense.at(u, v) = scale[u] * scale[v];
      } else {
        for (NodeId v : g.neighbors(u)) dense.at(u, v) = 1.0;
      }
    }
    Matrix next(n, xw.cols);
    for (size_t i = 0; i < n; ++i)
      for (size_t kk = 0; kk < n; ++kk) {
        double a = dense.at(i, kk);
        if (a == 0.0) continue;
        for (size_t c = 0; c < xw.cols; ++c) next.at(i, c) += a * xw.at(kk, c);
      }
    apply_activation(next, spec.activation);
    current = std::move(next);
  }
  return current;
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json j;
  j["total"] = total.to_json();
  j["self_adds"] = self_adds;
  j["aggregation_share"] = aggregation_share;
  auto layers = nlohmann::json::array();
  for (const auto& l : per_layer) layers.push_back(l.to_json());
  j["per_layer"] = std::move(layers);
  if (!memory_reports.empty()) {
    auto mems = nlohmann::json::array();
    for (const auto& m : memory_reports) mems.push_back(m);
    j["memory"] = std::move(mems);
  }
  return j;
}

InferenceResult run_inference(const CsrGraph& g, const Matrix& x,
                              std::span<const LayerSpec> specs, const InferenceConfig& cfg) {
  InferenceResult result;
  // dimension chain check up front
  size_t dim = x.cols;
  for (const auto& spec : specs) {
    if (spec.weight.rows != dim) throw ShapeError("run_inference: weight chain mismatch");
    dim = spec.weight.cols;
  }

  CostReport report;
  Matrix current;

  if (cfg.streaming && !specs.empty()) {
    // First layer overlaps location and consumption: XW is ready before the
    // locator runs, islands are aggregated as they complete.
    const auto& spec = specs[0];
    OpLedger layer_ledger;
    Matrix xw = combine_rows(x, spec.weight, &layer_ledger);
    std::vector<double> scale;
    if (spec.normalize == Normalization::Sym) {
      scale = inv_sqrt_degree_plus_one(g);
      for (NodeId u = 0; u < g.num_nodes; ++u)
        for (double& v : xw.row(u)) v *= scale[u];
    }
    ConsumerConfig ccfg = cfg.consumer;
    ccfg.num_workers = 1;
    std::unique_ptr<MemoryModel> mem;
    if (cfg.buffer_words)
      mem = std::make_unique<MemoryModel>(
          make_strategy_model(Strategy::Island, cfg.buffer_words));
    DecompositionConsumer consumer(g.num_nodes, xw, ccfg, mem.get());
    struct Sink : IslandSink {
      DecompositionConsumer* c;
      void on_island(const Island& island) override { c->consume(island); }
    } sink;
    sink.c = &consumer;
    result.islands = islandize(g, cfg.locator, &sink);
    auto consumed = consumer.finish(result.islands);
    layer_ledger.merge(consumed.ledger);
    current = std::move(consumed.output);
    if (spec.normalize == Normalization::Sym) {
      for (NodeId u = 0; u < g.num_nodes; ++u) {
        auto self = xw.row(u);
        auto row = current.row(u);
        for (size_t c = 0; c < row.size(); ++c) row[c] = (row[c] + self[c]) * scale[u];
      }
      report.self_adds += g.num_nodes;
    }
    apply_activation(current, spec.activation);
    if (mem) report.memory_reports.push_back(mem->report("island"));
    report.per_layer.push_back(layer_ledger);
    report.total.merge(layer_ledger);
  } else {
    result.islands = islandize(g, cfg.locator);
    current = x;
  }

  for (size_t l = cfg.streaming && !specs.empty() ? 1 : 0; l < specs.size(); ++l) {
    OpLedger layer_ledger;
    std::unique_ptr<MemoryModel> mem;
    if (cfg.buffer_words)
      mem = std::make_unique<MemoryModel>(
          make_strategy_model(Strategy::Island, cfg.buffer_words));
    current = layer_forward(g, result.islands, current, specs[l], cfg.consumer, &layer_ledger,
                            &report.self_adds, mem.get(), /*charge_location=*/l == 0);
    if (mem) report.memory_reports.push_back(mem->report("island"));
    report.per_layer.push_back(layer_ledger);
    report.total.merge(layer_ledger);
  }

  // share of aggregation in total scalar work, baseline (pre-pruning) terms
  double agg_ops = 0.0, comb_ops = static_cast<double>(report.total.combination_macs);
  for (size_t l = 0; l < specs.size(); ++l) {
    double out_dim = static_cast<double>(specs[l].weight.cols);
    double vec_ops = static_cast<double>(report.per_layer[l].baseline_adds);
    if (specs[l].normalize == Normalization::Sym) vec_ops += static_cast<double>(g.num_nodes);
    agg_ops += vec_ops * out_dim;
  }
  report.aggregation_share =
      agg_ops + comb_ops > 0.0 ? agg_ops / (agg_ops + comb_ops) : 0.0;
  result.report = std::move(report);
  result.output = std::move(current);
  return result;
}

}  // namespace isle
