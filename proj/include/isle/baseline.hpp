#pragma once

#include <optional>
#include <string>

#include "isle/consumer.hpp"
#include "isle/csr_graph.hpp"
#include "isle/matrix.hpp"
#include "isle/memory_model.hpp"

namespace isle {

enum class Strategy {
  PullRowWise,
  PullInnerProduct,
  PushColumnWise,
  PushOuterProduct,
  Island,
};

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

// Buffer carved into the regions each strategy uses. PULL/PUSH split the
// feature and result halves; Island dedicates half to the hub-XW cache, a
// quarter to hub partial results, and reserves the rest as the per-island
// working buffer whose traffic is the compulsory stream.
MemoryModel make_strategy_model(Strategy s, std::uint64_t buffer_capacity_words);

// Computes A*(XW) with the variant's loop order, feeding the corresponding
// access trace through mem (when given). Island requires the decomposition.
Matrix run_baseline(const CsrGraph& g, const Matrix& xw, Strategy s, MemoryModel* mem = nullptr,
                    const IslandizationResult* islands = nullptr,
                    const ConsumerConfig* consumer_cfg = nullptr, OpLedger* ledger = nullptr);

}  // namespace isle
