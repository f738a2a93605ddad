#include "isle/edge_list.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "isle/errors.hpp"

namespace isle {

namespace {

bool parse_id(const std::string& tok, long long& out) {
  if (tok.empty()) return false;
  size_t pos = 0;
  try {
    out = std::stoll(tok, &pos);
  } catch (...) {
    return false;
  }
  return pos == tok.size();
}

}  // namespace

CsrGraph load_edge_list(const std::string& path, const IngestOptions& opts,
                        std::vector<NodeId>* id_map) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list: " + path);

  std::vector<std::pair<NodeId, NodeId>> edges;
  long long max_id = -1;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string ta, tb, extra;
    ls >> ta >> tb;
    if (ls >> extra)
      throw ParseError("line " + std::to_string(line_no) + ": expected two ids, got more");
    long long a, b;
    if (tb.empty() || !parse_id(ta, a) || !parse_id(tb, b))
      throw ParseError("line " + std::to_string(line_no) + ": malformed edge '" + line + "'");
    if (opts.one_indexed) {
      if (a < 1 || b < 1)
        throw RangeError("line " + std::to_string(line_no) + ": id < 1 in one-indexed input");
      --a;
      --b;
    }
    if (a < 0 || b < 0)
      throw RangeError("line " + std::to_string(line_no) + ": negative node id");
    if (opts.num_nodes && (a >= *opts.num_nodes || b >= *opts.num_nodes))
      throw RangeError("line " + std::to_string(line_no) + ": id >= declared node count");
    max_id = std::max({max_id, a, b});
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }

  if (opts.compact_ids) {
    std::vector<NodeId> ids;
    ids.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      ids.push_back(u);
      ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<NodeId> dense(max_id + 1);
    for (NodeId i = 0; i < ids.size(); ++i) dense[ids[i]] = i;
    for (auto& [u, v] : edges) {
      u = dense[u];
      v = dense[v];
    }
    if (id_map) *id_map = ids;
    return build_csr(static_cast<NodeId>(ids.size()), edges);
  }

  NodeId n = opts.num_nodes ? *opts.num_nodes : static_cast<NodeId>(max_id + 1);
  if (id_map) {
    id_map->resize(n);
    for (NodeId i = 0; i < n; ++i) (*id_map)[i] = i;
  }
  return build_csr(n, edges);
}

void write_edge_list(const CsrGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write edge list: " + path);
  for (auto [u, v] : g.undirected_edges()) out << u << ' ' << v << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace isle
