#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cne {

using NodeId = std::uint32_t;

/// Unordered node pair stored canonically with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class FlipDirection : std::uint8_t { Deletion, Addition };

const char* to_string(FlipDirection d);

/// A single toggle of a_ij in a reference graph. i < j always.
struct EdgeFlip {
  NodeId i = 0;
  NodeId j = 0;
  FlipDirection direction = FlipDirection::Addition;

  friend bool operator==(const EdgeFlip&, const EdgeFlip&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A file could not be opened, read or written. what() names the path.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidFlip : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Undirected simple graph on nodes 0..n-1.
///
/// Immutable after construction; perturbations return new values. The dense
/// adjacency (n*n bytes) backs the pairwise kernels, the edge list and
/// neighbor lists back traversal. Original node labels are kept in a side
/// map so outputs can report both the contiguous ids and the input labels.
class Graph {
 public:
  Graph() = default;

  /// Builds from canonical or non-canonical pairs. Self-loops and duplicates
  /// are rejected here; the loader filters them before calling this.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges,
                          std::vector<std::string> labels = {});

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_pairs() const { return n_ < 2 ? 0 : n_ * (n_ - 1) / 2; }
  double density() const;

  bool has_edge(NodeId i, NodeId j) const {
    return adjacency_[static_cast<std::size_t>(i) * n_ + j] != 0;
  }
  std::uint8_t adjacency(NodeId i, NodeId j) const {
    return adjacency_[static_cast<std::size_t>(i) * n_ + j];
  }
  std::span<const std::uint8_t> adjacency_row(NodeId i) const {
    return {adjacency_.data() + static_cast<std::size_t>(i) * n_, n_};
  }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  /// Sorted canonical edge list.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& label(NodeId i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Node id for an original label, or -1 if absent.
  long find_label(const std::string& label) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<std::string> labels_;
};

enum class EdgeListFormat { Auto, Whitespace, Comma };

struct LoadReport {
  std::size_t lines = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t self_loops_dropped = 0;
};

struct LoadedGraph {
  Graph graph;
  LoadReport report;
};

/// Parses "u v" or "u,v" lines; '#' and '%' start comment lines. Extra
/// columns after the pair (weights, timestamps) are ignored. Directed inputs
/// are symmetrized: any arc becomes an undirected edge.
LoadedGraph load_edge_list(std::istream& in,
                           EdgeListFormat format = EdgeListFormat::Auto);
LoadedGraph load_edge_list_file(const std::string& path,
                                EdgeListFormat format = EdgeListFormat::Auto);

/// Writes one "label_u label_v" line per edge.
void save_edge_list(std::ostream& out, const Graph& g);

/// Per-node community id read from "label community" lines, keyed by the
/// graph's original labels. Nodes missing from the file get -1.
std::vector<int> load_communities(std::istream& in, const Graph& g);
std::vector<int> load_communities_file(const std::string& path,
                                       const Graph& g);

std::vector<int> connected_components(const Graph& g);

/// Induced subgraph on the largest component; ties go to the component
/// holding the smallest node id. Relabeled contiguously in id order.
Graph largest_connected_component(const Graph& g);

/// Canonicalizes (i, j) and derives the direction from g.
EdgeFlip make_flip(const Graph& g, NodeId i, NodeId j);

Graph flip_edge(const Graph& g, const EdgeFlip& f);

/// True iff deleting f increases the component count. f must be a deletion.
bool is_bridge(const Graph& g, const EdgeFlip& f);

/// All bridges, via one DFS low-link pass. Sorted canonically.
std::vector<Edge> find_bridges(const Graph& g);

}  // namespace cne
