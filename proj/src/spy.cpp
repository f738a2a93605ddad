#include "isle/spy.hpp"

#include <algorithm>
#include <fstream>

#include "isle/errors.hpp"

namespace isle {

std::vector<std::pair<NodeId, NodeId>> permuted_coords(const CsrGraph& g,
                                                       const NodePermutation& perm) {
  if (!perm.valid_for(g.num_nodes)) throw ContractViolation("invalid permutation for graph");
  auto inv = perm.inverse();
  std::vector<std::pair<NodeId, NodeId>> coords;
  coords.reserve(g.nnz());
  for (NodeId r = 0; r < g.num_nodes; ++r) {
    NodeId u = perm.order[r];
    size_t begin = coords.size();
    for (NodeId v : g.neighbors(u)) coords.emplace_back(r, inv[v]);
    std::sort(coords.begin() + begin, coords.end());
  }
  return coords;
}

void emit_spy_csv(const CsrGraph& g, const NodePermutation& perm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write spy csv: " + path);
  out << "row,col\n";
  for (auto [r, c] : permuted_coords(g, perm)) out << r << ',' << c << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void emit_spy_pgm(const CsrGraph& g, const NodePermutation& perm, const std::string& path,
                  std::uint32_t side) {
  if (!perm.valid_for(g.num_nodes)) throw ContractViolation("invalid permutation for graph");
  std::uint32_t dim = std::max<std::uint32_t>(1, std::min<std::uint32_t>(side, g.num_nodes));
  std::vector<std::uint8_t> img(size_t(dim) * dim, 255);
  if (g.num_nodes > 0) {
    auto inv = perm.inverse();
    for (NodeId u = 0; u < g.num_nodes; ++u) {
      std::uint64_t r = std::uint64_t(inv[u]) * dim / g.num_nodes;
      for (NodeId v : g.neighbors(u)) {
        std::uint64_t c = std::uint64_t(inv[v]) * dim / g.num_nodes;
        img[r * dim + c] = 0;
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write spy pgm: " + path);
  out << "P5\n" << dim << ' ' << dim << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace isle
