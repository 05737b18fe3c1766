#include "dwmf/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "dwmf/error.hpp"

namespace dwmf {

namespace {

std::uint64_t edge_key(NodeId u, NodeId v, bool directed) {
  if (!directed && u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits a line into whitespace-separated tokens.
std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool parse_uint(std::string_view token, std::uint64_t& value) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

// "# nodes: N" header written by write_edge_list.
bool parse_node_header(std::string_view comment, std::uint64_t& n) {
  auto tokens = tokenize(comment.substr(1));
  return tokens.size() == 2 && tokens[0] == "nodes:" && parse_uint(tokens[1], n);
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges, bool directed)
    : n_(n), edges_(std::move(edges)), directed_(directed) {
  if (n_ == 0) throw ValidationError("graph must have at least one node");
  if (n_ > std::numeric_limits<NodeId>::max()) throw ValidationError("graph too large");

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  std::vector<std::size_t> deg(n_, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    if (u >= n_ || v >= n_) {
      throw ValidationError("edge " + std::to_string(e) + " (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") references a node >= n = " +
                            std::to_string(n_));
    }
    if (u == v) throw ValidationError("self-loop on node " + std::to_string(u));
    if (!seen.insert(edge_key(u, v, directed_)).second) {
      throw ValidationError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) +
                            ")");
    }
    ++deg[u];
    if (!directed_) ++deg[v];
  }

  offsets_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n_]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges_) {
    adjacency_[cursor[u]++] = v;
    if (!directed_) adjacency_[cursor[v]++] = u;
  }
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = offsets_[i + 1] - offsets_[i];
  return out;
}

Graph parse_edge_list(std::istream& in, bool directed) {
  std::vector<Edge> edges;
  std::uint64_t declared_nodes = 0;
  std::uint64_t max_id = 0;
  bool any_edge = false;
  std::unordered_set<std::uint64_t> seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    std::size_t first = 0;
    while (first < view.size() && is_space(view[first])) ++first;
    view.remove_prefix(first);
    if (view.empty()) continue;
    if (view.front() == '#') {
      std::uint64_t n = 0;
      if (parse_node_header(view, n)) declared_nodes = std::max(declared_nodes, n);
      continue;
    }

    auto tokens = tokenize(view);
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (tokens.size() != 2 || !parse_uint(tokens[0], u) || !parse_uint(tokens[1], v)) {
      throw ParseError("expected \"u v\" with non-negative integer ids, got \"" + line + "\"",
                       line_no);
    }
    if (u >= std::numeric_limits<NodeId>::max() || v >= std::numeric_limits<NodeId>::max()) {
      throw ParseError("node id out of range", line_no);
    }
    const auto nu = static_cast<NodeId>(u);
    const auto nv = static_cast<NodeId>(v);
    if (nu == nv) throw ParseError("self-loop on node " + std::to_string(u), line_no);
    if (!seen.insert(edge_key(nu, nv, directed)).second) {
      throw ParseError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")",
                       line_no);
    }
    edges.push_back({nu, nv});
    max_id = std::max({max_id, u, v});
    any_edge = true;
  }

  const std::uint64_t n = std::max(declared_nodes, any_edge ? max_id + 1 : 0);
  if (n == 0) throw ParseError("edge list contains no edges", 0);
  return Graph(static_cast<std::size_t>(n), std::move(edges), directed);
}

Graph parse_edge_list(const std::string& text, bool directed) {
  std::istringstream in(text);
  return parse_edge_list(in, directed);
}

Graph read_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list \"" + path + "\"");
  return parse_edge_list(in, directed);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes: " << g.num_nodes() << '\n';
  out << "# directed: " << (g.directed() ? "true" : "false") << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

Matrix transition_matrix(const Graph& g) {
  const std::size_t n = g.num_nodes();
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t d = g.degree(i);
    if (d == 0) {
      throw ValidationError("node " + std::to_string(i) +
                            " has no outgoing edges; the random walk is undefined there");
    }
    const double p = 1.0 / static_cast<double>(d);
    for (NodeId j : g.neighbors(i)) a(i, j) = p;
  }
  return a;
}

namespace {

std::size_t count_undirected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = n;
  for (const auto& [u, v] : g.edges()) {
    const NodeId ru = find(u);
    const NodeId rv = find(v);
    if (ru != rv) {
      parent[ru] = rv;
      --components;
    }
  }
  return components;
}

// Iterative Tarjan.
std::size_t count_strong_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::size_t next_index = 0;
  std::size_t components = 0;

  struct Frame {
    NodeId node;
    std::size_t next_child;
  };
  std::vector<Frame> call;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      auto& frame = call.back();
      const auto nbrs = g.neighbors(frame.node);
      if (frame.next_child < nbrs.size()) {
        const NodeId w = nbrs[frame.next_child++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[frame.node] = std::min(low[frame.node], index[w]);
        }
        continue;
      }
      const NodeId v = frame.node;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().node] = std::min(low[call.back().node], low[v]);
      }
      if (low[v] == index[v]) {
        NodeId w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
        } while (w != v);
        ++components;
      }
    }
  }
  return components;
}

}  // namespace

ConnectivityReport check_connectivity(const Graph& g) {
  ConnectivityReport report;
  report.components =
      g.directed() ? count_strong_components(g) : count_undirected_components(g);
  report.connected = report.components == 1;
  return report;
}

void require_connected(const Graph& g) {
  const auto report = check_connectivity(g);
  if (!report.connected) {
    throw ValidationError(std::string("graph is not ") +
                          (g.directed() ? "strongly connected" : "connected") + " (" +
                          std::to_string(report.components) +
                          " components); the random walk has no unique stationary law");
  }
}

Vector stationary_distribution(const Graph& g, double tolerance, std::size_t max_iterations) {
  require_connected(g);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());

  if (!g.directed()) {
    Vector pi(n);
    const double total = static_cast<double>(g.degree_sum());
    for (Eigen::Index i = 0; i < n; ++i) {
      pi(i) = static_cast<double>(g.degree(static_cast<NodeId>(i))) / total;
    }
    return pi;
  }

  const Matrix a = transition_matrix(g);
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::RowVectorXd next(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    next.noalias() = x * a;
    next = 0.5 * (next + x);
    next /= next.sum();
    const double delta = (next - x).cwiseAbs().maxCoeff();
    x.swap(next);
    if (delta < tolerance) return x.transpose();
  }
  throw ConvergenceError("stationary distribution did not converge within " +
                         std::to_string(max_iterations) + " iterations");
}

}  // namespace dwmf
