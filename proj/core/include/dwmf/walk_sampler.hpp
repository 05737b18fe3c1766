#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dwmf/graph.hpp"
#include "dwmf/matrix.hpp"

namespace dwmf {

enum class StartMode { stationary, fixed, uniform };

std::string to_string(StartMode mode);
StartMode start_mode_from_string(const std::string& name);

struct SamplerConfig {
  std::size_t window = 5;         // t
  std::size_t centers = 1000;     // L, walk positions used as centers
  std::uint64_t seed = 0;
  StartMode start_mode = StartMode::stationary;
  NodeId start_node = 0;          // only read when start_mode == fixed
  std::size_t burn_in = 0;        // steps discarded before the first center
  std::size_t workers = 1;

  /// Stationary start with no burn-in for undirected graphs; uniform start
  /// with 1000 burn-in steps for directed graphs.
  static SamplerConfig defaults_for(const Graph& g);

  /// Throws ArgumentError when window, centers or workers is zero.
  void validate() const;
};

struct Walk {
  std::vector<NodeId> nodes;
  std::uint64_t seed = 0;
};

/// Co-occurrence counts of the multiset D of node-context pairs.
/// Marginals are recomputed from the pair map at construction, so
/// sum_c #(v,c) = #(v), sum_v #(v,c) = #(c) and sum #(v) = |D| always hold.
class CooccurrenceCounts {
 public:
  using Key = std::pair<NodeId, NodeId>;
  using PairMap = std::map<Key, std::uint64_t>;

  explicit CooccurrenceCounts(std::size_t n = 0, PairMap pairs = {});

  std::size_t num_nodes() const noexcept { return n_; }
  const PairMap& pairs() const noexcept { return pairs_; }
  std::uint64_t count(NodeId v, NodeId c) const;
  std::uint64_t node_count(NodeId v) const { return node_counts_.at(v); }
  std::uint64_t context_count(NodeId c) const { return context_counts_.at(c); }
  const std::vector<std::uint64_t>& node_counts() const noexcept { return node_counts_; }
  const std::vector<std::uint64_t>& context_counts() const noexcept { return context_counts_; }
  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }

  bool is_symmetric() const;

  /// Dense n x n matrix of raw counts.
  Matrix dense() const;

  CooccurrenceCounts& operator+=(const CooccurrenceCounts& other);

  friend bool operator==(const CooccurrenceCounts& a, const CooccurrenceCounts& b) {
    return a.n_ == b.n_ && a.pairs_ == b.pairs_;
  }

 private:
  std::size_t n_;
  PairMap pairs_;
  std::vector<std::uint64_t> node_counts_;
  std::vector<std::uint64_t> context_counts_;
  std::uint64_t total_ = 0;
};

/// One walk of burn_in + centers + window nodes. Each step moves to a
/// uniformly random out-neighbor.
Walk generate_walk(const Graph& g, const SamplerConfig& cfg);

/// Windowed pair emission over centers i in [burn_in, burn_in + centers):
/// (RW_i, RW_j) for j in [i+1, i+window], plus (RW_j, RW_i) unless
/// `directed`. Positions past the last center only serve as right context.
CooccurrenceCounts extract_pairs(const Walk& walk, std::size_t num_nodes, std::size_t window,
                                 bool directed, std::size_t burn_in, std::size_t centers);

/// generate_walk + extract_pairs. With several workers the centers are split
/// into contiguous shares, worker w walks with seed worker_seed(cfg.seed, w),
/// and the per-worker counts are summed. Emission follows g.directed().
CooccurrenceCounts sample_counts(const Graph& g, const SamplerConfig& cfg);

/// Row-normalized counts #(v,c)/#(v). Rows of nodes that were never observed
/// are NaN and flagged in `observed`.
struct EmpiricalConditional {
  Matrix values;
  std::vector<bool> observed;
};

EmpiricalConditional empirical_conditional(const CooccurrenceCounts& counts);

/// #(v)/|D|. Throws ValidationError on empty counts.
Vector empirical_frequency(const CooccurrenceCounts& counts);

}  // namespace dwmf
