#pragma once

#include <span>
#include <vector>

#include "isle/consumer.hpp"
#include "isle/csr_graph.hpp"
#include "isle/locator.hpp"
#include "isle/matrix.hpp"

#include "json.hpp"

namespace isle {

enum class Activation { None, Relu };
enum class Normalization { None, Sym };  // Sym: D^{-1/2} (A+I) D^{-1/2}

struct LayerSpec {
  Matrix weight;  // in_dim x out_dim
  Activation activation = Activation::Relu;
  Normalization normalize = Normalization::Sym;
};

struct CostReport {
  OpLedger total;
  std::vector<OpLedger> per_layer;
  std::uint64_t self_adds = 0;  // analytic self-loop contributions (sym mode)
  // baseline aggregation scalar ops / (aggregation + combination scalar ops)
  double aggregation_share = 0.0;
  std::vector<nlohmann::json> memory_reports;  // per layer, when counting enabled

  nlohmann::json to_json() const;
};

// One combination-first layer over an existing decomposition. With sym
// normalization the XW rows are pre-scaled by 1/sqrt(deg+1), aggregated on
// binary adjacency, the node's own scaled row is added analytically (no
// self-loops stored), and the sums are post-scaled.
Matrix layer_forward(const CsrGraph& g, const IslandizationResult& islands, const Matrix& x,
                     const LayerSpec& spec, const ConsumerConfig& cfg,
                     OpLedger* ledger = nullptr, std::uint64_t* self_adds = nullptr,
                     MemoryModel* mem = nullptr, bool charge_location = true);

// Dense evaluation of the layer chain; the desk-scale reference.
Matrix reference_forward(const CsrGraph& g, const Matrix& x, std::span<const LayerSpec> specs);

struct InferenceConfig {
  LocatorConfig locator{};
  ConsumerConfig consumer{};
  bool streaming = false;          // feed islands to the consumer as located
  std::uint64_t buffer_words = 0;  // >0 enables off-chip access counting
};

struct InferenceResult {
  Matrix output;
  CostReport report;
  IslandizationResult islands;
};

// Locates islands once and reuses the decomposition across all layers.
InferenceResult run_inference(const CsrGraph& g, const Matrix& x,
                              std::span<const LayerSpec> specs, const InferenceConfig& cfg);

}  // namespace isle
