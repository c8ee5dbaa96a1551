#include "cne/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace cne {

const char* to_string(FlipDirection d) {
  return d == FlipDirection::Deletion ? "del" : "add";
}

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges,
                        std::vector<std::string> labels) {
  Graph g;
  g.n_ = n;
  for (auto& e : edges) {
    if (e.u == e.v) throw std::invalid_argument("self-loop in edge list");
    if (e.u >= n || e.v >= n) throw std::invalid_argument("edge endpoint >= n");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge in edge list");
  g.edges_ = std::move(edges);

  g.adjacency_.assign(n * n, 0);
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : g.edges_) {
    g.adjacency_[static_cast<std::size_t>(e.u) * n + e.v] = 1;
    g.adjacency_[static_cast<std::size_t>(e.v) * n + e.u] = 1;
    ++degree[e.u];
    ++degree[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.neighbors_[cursor[e.u]++] = e.v;
    g.neighbors_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i)
    std::sort(g.neighbors_.begin() + g.offsets_[i], g.neighbors_.begin() + g.offsets_[i + 1]);

  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  } else if (labels.size() != n) {
    throw std::invalid_argument("label count does not match node count");
  }
  g.labels_ = std::move(labels);
  return g;
}

double Graph::density() const {
  const auto pairs = num_pairs();
  return pairs == 0 ? 0.0 : static_cast<double>(edges_.size()) / static_cast<double>(pairs);
}

long Graph::find_label(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<long>(it - labels_.begin());
}

namespace {

bool parse_integer(const std::string& s, long long& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_fields(const std::string& line, bool comma) {
  std::vector<std::string> fields;
  if (comma) {
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
  } else {
    std::istringstream ss(line);
    std::string field;
    while (ss >> field) fields.push_back(field);
  }
  return fields;
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in, EdgeListFormat format) {
  std::vector<std::pair<std::string, std::string>> raw;
  LoadReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;
    const bool comma = format == EdgeListFormat::Comma ||
                       (format == EdgeListFormat::Auto && line.find(',') != std::string::npos);
    auto fields = split_fields(line, comma);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
      throw ParseError("line " + std::to_string(lineno) + ": expected two node labels, got '" +
                           line + "'",
                       lineno);
    raw.emplace_back(std::move(fields[0]), std::move(fields[1]));
  }
  report.lines = lineno;
  if (raw.empty()) throw ParseError("edge list contains no edges", lineno);

  std::vector<std::string> labels;
  for (const auto& [a, b] : raw) {
    labels.push_back(a);
    labels.push_back(b);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
    long long v;
    return parse_integer(s, v);
  });
  if (numeric) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      long long x = 0, y = 0;
      parse_integer(a, x);
      parse_integer(b, y);
      return x != y ? x < y : a < b;
    });
  }
  std::unordered_map<std::string, NodeId> index;
  index.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], static_cast<NodeId>(i));

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [a, b] : raw) {
    NodeId u = index.at(a), v = index.at(b);
    if (u == v) {
      ++report.self_loops_dropped;
      continue;
    }
    if (u > v) std::swap(u, v);
    edges.push_back({u, v});
  }
  std::sort(edges.begin(), edges.end());
  const auto before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  report.duplicates_dropped = before - edges.size();
  if (edges.empty()) throw ParseError("edge list contains no edges", lineno);

  const auto n = labels.size();
  return {Graph::from_edges(n, std::move(edges), std::move(labels)), report};
}

LoadedGraph load_edge_list_file(const std::string& path, EdgeListFormat format) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open graph file: " + path);
  return load_edge_list(in, format);
}

void save_edge_list(std::ostream& out, const Graph& g) {
  for (const auto& e : g.edges()) out << g.label(e.u) << ' ' << g.label(e.v) << '\n';
}

std::vector<int> load_communities(std::istream& in, const Graph& g) {
  std::unordered_map<std::string, NodeId> index;
  for (NodeId i = 0; i < g.num_nodes(); ++i) index.emplace(g.label(i), i);
  std::vector<int> community(g.num_nodes(), -1);
  std::unordered_map<std::string, long long> named;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    auto fields = split_fields(line, line.find(',') != std::string::npos);
    if (fields.size() < 2)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'label community'", lineno);
    const auto it = index.find(fields[0]);
    if (it == index.end()) continue;
    long long c = 0;
    if (!parse_integer(fields[1], c)) {
      // Symbolic classes ("l", "n", "c") get ids in order of first appearance.
      const auto [pos, fresh] = named.try_emplace(fields[1], static_cast<long long>(named.size()));
      c = pos->second;
    }
    community[it->second] = static_cast<int>(c);
  }
  return community;
}

std::vector<int> load_communities_file(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open community file: " + path);
  return load_communities(in, g);
}

std::vector<int> connected_components(const Graph& g) {
  const auto n = g.num_nodes();
  std::vector<int> comp(n, -1);
  int next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

Graph largest_connected_component(const Graph& g) {
  const auto comp = connected_components(g);
  if (comp.empty()) return g;
  const int count = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> size(count, 0);
  for (int c : comp) ++size[c];
  // Components are numbered in order of their smallest node, so the first
  // maximum is the tie-break winner.
  const int best = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());

  std::vector<NodeId> remap(g.num_nodes(), 0);
  std::vector<std::string> labels;
  NodeId next = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (comp[i] == best) {
      remap[i] = next++;
      labels.push_back(g.label(i));
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges())
    if (comp[e.u] == best) edges.push_back({remap[e.u], remap[e.v]});
  return Graph::from_edges(next, std::move(edges), std::move(labels));
}

EdgeFlip make_flip(const Graph& g, NodeId i, NodeId j) {
  if (i == j) throw InvalidFlip("edge flip needs two distinct nodes");
  if (i >= g.num_nodes() || j >= g.num_nodes()) throw InvalidFlip("edge flip node out of range");
  if (i > j) std::swap(i, j);
  return {i, j, g.has_edge(i, j) ? FlipDirection::Deletion : FlipDirection::Addition};
}

Graph flip_edge(const Graph& g, const EdgeFlip& f) {
  if (f.i == f.j) throw InvalidFlip("edge flip needs two distinct nodes");
  if (f.i >= g.num_nodes() || f.j >= g.num_nodes()) throw InvalidFlip("edge flip node out of range");
  const Edge target{std::min(f.i, f.j), std::max(f.i, f.j)};
  std::vector<Edge> edges = g.edges();
  const auto it = std::lower_bound(edges.begin(), edges.end(), target);
  if (it != edges.end() && *it == target)
    edges.erase(it);
  else
    edges.insert(it, target);
  return Graph::from_edges(g.num_nodes(), std::move(edges), g.labels());
}

bool is_bridge(const Graph& g, const EdgeFlip& f) {
  if (f.direction != FlipDirection::Deletion || !g.has_edge(f.i, f.j))
    throw ContractViolation("is_bridge requires a deletion of an existing edge");
  // (i, j) is a bridge iff j is unreachable from i once the edge is removed.
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<NodeId> stack{f.i};
  seen[f.i] = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : g.neighbors(u)) {
      if ((u == f.i && v == f.j) || (u == f.j && v == f.i)) continue;
      if (v == f.j) return false;
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return true;
}

std::vector<Edge> find_bridges(const Graph& g) {
  const auto n = g.num_nodes();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> disc(n, kUnvisited), low(n, 0);
  std::vector<Edge> bridges;
  std::size_t timer = 0;

  struct Frame {
    NodeId node;
    NodeId parent;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (disc[root] != kUnvisited) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, root, 0});
    while (!stack.empty()) {
      auto& fr = stack.back();
      const auto nbrs = g.neighbors(fr.node);
      if (fr.next < nbrs.size()) {
        const auto v = nbrs[fr.next++];
        // Simple graph: skipping the parent id skips exactly the tree edge.
        if (v == fr.parent) continue;
        if (disc[v] == kUnvisited) {
          disc[v] = low[v] = timer++;
          stack.push_back({v, fr.node, 0});
        } else {
          low[fr.node] = std::min(low[fr.node], disc[v]);
        }
      } else {
        const auto u = fr.node;
        const auto p = fr.parent;
        stack.pop_back();
        if (!stack.empty()) {
          low[p] = std::min(low[p], low[u]);
          if (low[u] > disc[p]) bridges.push_back({std::min(u, p), std::max(u, p)});
        }
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

}  // namespace cne
