#include "isle/baseline.hpp"

#include "isle/errors.hpp"

namespace isle {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::PullRowWise: return "pull-row";
    case Strategy::PullInnerProduct: return "pull-inner";
    case Strategy::PushColumnWise: return "push-col";
    case Strategy::PushOuterProduct: return "push-outer";
    case Strategy::Island: return "island";
  }
  return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::PullRowWise, Strategy::PullInnerProduct,
                     Strategy::PushColumnWise, Strategy::PushOuterProduct, Strategy::Island})
    if (name == strategy_name(s)) return s;
  return std::nullopt;
}

MemoryModel make_strategy_model(Strategy s, std::uint64_t cap) {
  MemoryModel m;
  m.add_stream_region("A_stream");
  if (s == Strategy::Island) {
    m.add_lru_region("hub_xw_cache", cap / 2);
    m.add_lru_region("hub_partials", cap / 4);
    m.add_stream_region("island_xw");
    m.add_stream_region("island_xo");
    m.add_lru_region("working_reserve", cap - cap / 2 - cap / 4);
  } else {
    m.add_lru_region("xw", cap / 2);
    m.add_lru_region("xo", cap - cap / 2);
  }
  return m;
}

namespace {

// Element-granular block ids for the channel-wise variants.
inline std::uint64_t elem_block(std::uint64_t row, std::uint64_t col, std::uint64_t cols) {
  return row * cols + col;
}

Matrix pull_row_wise(const CsrGraph& g, const Matrix& xw, MemoryModel* mem) {
  const auto L = static_cast<std::uint32_t>(xw.cols);
  int r_a = mem ? mem->region_id("A_stream") : -1;
  int r_xw = mem ? mem->region_id("xw") : -1;
  int r_xo = mem ? mem->region_id("xo") : -1;
  Matrix out(g.num_nodes, xw.cols);
  std::vector<double> acc(xw.cols);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    if (mem && g.degree(i)) mem->read(r_a, MatrixTag::A, i, g.degree(i));
    std::fill(acc.begin(), acc.end(), 0.0);
    for (NodeId j : g.neighbors(i)) {
      if (mem) mem->read(r_xw, MatrixTag::XW, j, L);
      auto row = xw.row(j);
      for (size_t c = 0; c < acc.size(); ++c) acc[c] += row[c];
    }
    std::copy(acc.begin(), acc.end(), out.row(i).begin());
    if (mem) mem->write(r_xo, MatrixTag::Xo, i, L);
  }
  return out;
}

Matrix pull_inner_product(const CsrGraph& g, const Matrix& xw, MemoryModel* mem) {
  int r_a = mem ? mem->region_id("A_stream") : -1;
  int r_xw = mem ? mem->region_id("xw") : -1;
  int r_xo = mem ? mem->region_id("xo") : -1;
  Matrix out(g.num_nodes, xw.cols);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    if (mem && g.degree(i)) mem->read(r_a, MatrixTag::A, i, g.degree(i));
    for (size_t c = 0; c < xw.cols; ++c) {
      double sum = 0.0;
      for (NodeId j : g.neighbors(i)) {
        if (mem) mem->read(r_xw, MatrixTag::XW, elem_block(j, c, xw.cols), 1);
        sum += xw.at(j, c);
      }
      out.at(i, c) = sum;
      if (mem) mem->write(r_xo, MatrixTag::Xo, elem_block(i, c, xw.cols), 1);
    }
  }
  return out;
}

Matrix push_column_wise(const CsrGraph& g, const Matrix& xw, MemoryModel* mem) {
  int r_a = mem ? mem->region_id("A_stream") : -1;
  int r_xw = mem ? mem->region_id("xw") : -1;
  int r_xo = mem ? mem->region_id("xo") : -1;
  Matrix out(g.num_nodes, xw.cols);
  for (size_t c = 0; c < xw.cols; ++c) {
    for (NodeId j = 0; j < g.num_nodes; ++j) {
      if (g.degree(j) == 0) continue;
      if (mem) {
        mem->read(r_a, MatrixTag::A, j, g.degree(j));  // A re-streamed per channel
        mem->read(r_xw, MatrixTag::XW, elem_block(j, c, xw.cols), 1);
      }
      double v = xw.at(j, c);
      for (NodeId i : g.neighbors(j)) {
        out.at(i, c) += v;
        if (mem) mem->update(r_xo, MatrixTag::Xo, elem_block(i, c, xw.cols), 1);
      }
    }
  }
  return out;
}

Matrix push_outer_product(const CsrGraph& g, const Matrix& xw, MemoryModel* mem) {
  const auto L = static_cast<std::uint32_t>(xw.cols);
  int r_a = mem ? mem->region_id("A_stream") : -1;
  int r_xw = mem ? mem->region_id("xw") : -1;
  int r_xo = mem ? mem->region_id("xo") : -1;
  Matrix out(g.num_nodes, xw.cols);
  for (NodeId j = 0; j < g.num_nodes; ++j) {
    if (g.degree(j) == 0) continue;
    if (mem) mem->read(r_a, MatrixTag::A, j, g.degree(j));
    auto row = xw.row(j);
    for (NodeId i : g.neighbors(j)) {
      if (mem) mem->read(r_xw, MatrixTag::XW, j, L);  // consecutive uses hit
      auto dst = out.row(i);
      for (size_t c = 0; c < dst.size(); ++c) dst[c] += row[c];
      if (mem) mem->update(r_xo, MatrixTag::Xo, i, L);
    }
  }
  return out;
}

}  // namespace

Matrix run_baseline(const CsrGraph& g, const Matrix& xw, Strategy s, MemoryModel* mem,
                    const IslandizationResult* islands, const ConsumerConfig* consumer_cfg,
                    OpLedger* ledger) {
  if (xw.rows != g.num_nodes) throw ShapeError("run_baseline: XW height != num_nodes");
  Matrix out;
  switch (s) {
    case Strategy::PullRowWise: out = pull_row_wise(g, xw, mem); break;
    case Strategy::PullInnerProduct: out = pull_inner_product(g, xw, mem); break;
    case Strategy::PushColumnWise: out = push_column_wise(g, xw, mem); break;
    case Strategy::PushOuterProduct: out = push_outer_product(g, xw, mem); break;
    case Strategy::Island: {
      if (!islands) throw ContractViolation("run_baseline: island strategy needs a decomposition");
      ConsumerConfig cfg = consumer_cfg ? *consumer_cfg : ConsumerConfig{};
      auto consumed = consume_decomposition(*islands, xw, cfg, mem);
      if (ledger) ledger->merge(consumed.ledger);
      return consumed.output;
    }
  }
  if (ledger) ledger->baseline_adds += g.nnz();
  if (mem) mem->flush();
  return out;
}

}  // namespace isle
