#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dwmf/matrix.hpp"

namespace dwmf {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Unweighted graph over dense node ids 0..n-1.
///
/// Undirected graphs store each edge once, in input order, and count it
/// toward the degree of both endpoints. Directed graphs count out-degree.
/// Self-loops, duplicate edges and out-of-range endpoints are rejected at
/// construction, so every Graph value satisfies those invariants.
class Graph {
 public:
  Graph(std::size_t n, std::vector<Edge> edges, bool directed);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::size_t degree(NodeId i) const { return offsets_.at(i + 1) - offsets_.at(i); }
  std::vector<std::size_t> degrees() const;

  /// Out-neighbors of i (both directions for undirected graphs), in edge order.
  std::span<const NodeId> neighbors(NodeId i) const {
    return {adjacency_.data() + offsets_.at(i), degree(i)};
  }

  /// Sum of degrees: 2|E| undirected, |E| directed.
  std::size_t degree_sum() const noexcept { return adjacency_.size(); }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  bool directed_;
  // CSR adjacency
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

/// Parses a whitespace-separated "u v" edge list. Lines starting with '#'
/// are comments, except that a "# nodes: N" comment raises the node count to
/// at least N (this is what write_edge_list emits, so isolated trailing nodes
/// survive a round trip). Otherwise n = 1 + max node id.
Graph parse_edge_list(std::istream& in, bool directed);
Graph parse_edge_list(const std::string& text, bool directed);
Graph read_edge_list(const std::string& path, bool directed);

void write_edge_list(std::ostream& out, const Graph& g);
std::string to_edge_list(const Graph& g);

/// A_ij = 1/d_i on edges. Throws ValidationError naming the first
/// zero-degree node.
Matrix transition_matrix(const Graph& g);

struct ConnectivityReport {
  bool connected = false;
  // weakly-connected components for undirected graphs, strongly-connected
  // components for directed graphs
  std::size_t components = 0;
};

ConnectivityReport check_connectivity(const Graph& g);

/// Throws ValidationError unless the graph is (strongly) connected.
void require_connected(const Graph& g);

/// Stationary distribution of the undamped random walk.
///
/// Undirected graphs use the closed form d_i / 2|E|. Directed graphs iterate
/// x <- x (I + A) / 2, a running average of successive walk iterates that
/// converges geometrically even for periodic chains, until consecutive
/// iterates differ by less than `tolerance` in max norm.
Vector stationary_distribution(const Graph& g, double tolerance = 1e-12,
                               std::size_t max_iterations = 1'000'000);

}  // namespace dwmf
