#include "dwmf/walk_sampler.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>
#include <unordered_map>

#include "dwmf/error.hpp"
#include "dwmf/rng.hpp"

namespace dwmf {

std::string to_string(StartMode mode) {
  switch (mode) {
    case StartMode::stationary:
      return "stationary";
    case StartMode::fixed:
      return "fixed";
    case StartMode::uniform:
      return "uniform";
  }
  return "unknown";
}

StartMode start_mode_from_string(const std::string& name) {
  if (name == "stationary") return StartMode::stationary;
  if (name == "fixed") return StartMode::fixed;
  if (name == "uniform") return StartMode::uniform;
  throw ArgumentError("unknown start mode \"" + name + "\"");
}

SamplerConfig SamplerConfig::defaults_for(const Graph& g) {
  SamplerConfig cfg;
  if (g.directed()) {
    cfg.start_mode = StartMode::uniform;
    cfg.burn_in = 1000;
  }
  return cfg;
}

void SamplerConfig::validate() const {
  if (window == 0) throw ArgumentError("window must be >= 1");
  if (centers == 0) throw ArgumentError("number of centers must be >= 1");
  if (workers == 0) throw ArgumentError("workers must be >= 1");
}

CooccurrenceCounts::CooccurrenceCounts(std::size_t n, PairMap pairs)
    : n_(n), pairs_(std::move(pairs)), node_counts_(n, 0), context_counts_(n, 0) {
  for (auto it = pairs_.begin(); it != pairs_.end();) {
    const auto [v, c] = it->first;
    if (v >= n_ || c >= n_) {
      throw ValidationError("count entry (" + std::to_string(v) + ", " + std::to_string(c) +
                            ") references a node >= n = " + std::to_string(n_));
    }
    if (it->second == 0) {
      it = pairs_.erase(it);
      continue;
    }
    node_counts_[v] += it->second;
    context_counts_[c] += it->second;
    total_ += it->second;
    ++it;
  }
}

std::uint64_t CooccurrenceCounts::count(NodeId v, NodeId c) const {
  const auto it = pairs_.find({v, c});
  return it == pairs_.end() ? 0 : it->second;
}

bool CooccurrenceCounts::is_symmetric() const {
  return std::all_of(pairs_.begin(), pairs_.end(), [this](const auto& entry) {
    return count(entry.first.second, entry.first.first) == entry.second;
  });
}

Matrix CooccurrenceCounts::dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [key, value] : pairs_) out(key.first, key.second) = static_cast<double>(value);
  return out;
}

CooccurrenceCounts& CooccurrenceCounts::operator+=(const CooccurrenceCounts& other) {
  if (other.n_ != n_) throw ValidationError("cannot merge counts over different node sets");
  for (const auto& [key, value] : other.pairs_) {
    pairs_[key] += value;
    node_counts_[key.first] += value;
    context_counts_[key.second] += value;
    total_ += value;
  }
  return *this;
}

namespace {

NodeId draw_start(const Graph& g, const SamplerConfig& cfg, Rng& rng) {
  const std::size_t n = g.num_nodes();
  switch (cfg.start_mode) {
    case StartMode::fixed:
      if (cfg.start_node >= n) {
        throw ArgumentError("start node " + std::to_string(cfg.start_node) +
                            " is out of range for a graph with " + std::to_string(n) + " nodes");
      }
      return cfg.start_node;
    case StartMode::uniform:
      return static_cast<NodeId>(rng.below(n));
    case StartMode::stationary:
      break;
  }
  if (!g.directed()) {
    // Proportional to degree: pick a uniform endpoint among all 2|E| slots.
    const auto slot = rng.below(g.degree_sum());
    const auto& edge = g.edges()[slot / 2];
    return slot % 2 == 0 ? edge.u : edge.v;
  }
  const Vector pi = stationary_distribution(g);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    cumulative += pi(i);
    if (u < cumulative) return static_cast<NodeId>(i);
  }
  return static_cast<NodeId>(pi.size() - 1);
}

Walk walk_with_seed(const Graph& g, const SamplerConfig& cfg, std::size_t centers,
                    std::uint64_t seed) {
  Rng rng(seed);
  Walk walk;
  walk.seed = seed;
  const std::size_t length = cfg.burn_in + centers + cfg.window;
  walk.nodes.reserve(length);
  NodeId current = draw_start(g, cfg, rng);
  walk.nodes.push_back(current);
  while (walk.nodes.size() < length) {
    const auto nbrs = g.neighbors(current);
    current = nbrs[rng.below(nbrs.size())];
    walk.nodes.push_back(current);
  }
  return walk;
}

}  // namespace

Walk generate_walk(const Graph& g, const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.start_mode == StartMode::fixed && cfg.start_node >= g.num_nodes()) {
    throw ArgumentError("start node " + std::to_string(cfg.start_node) +
                        " is out of range for a graph with " + std::to_string(g.num_nodes()) +
                        " nodes");
  }
  require_connected(g);
  return walk_with_seed(g, cfg, cfg.centers, cfg.seed);
}

CooccurrenceCounts extract_pairs(const Walk& walk, std::size_t num_nodes, std::size_t window,
                                 bool directed, std::size_t burn_in, std::size_t centers) {
  if (window == 0) throw ArgumentError("window must be >= 1");
  const std::size_t needed = burn_in + centers + window;
  if (walk.nodes.size() < needed) {
    throw ArgumentError("walk of length " + std::to_string(walk.nodes.size()) +
                        " is too short for burn_in + centers + window = " +
                        std::to_string(needed));
  }
  const auto& rw = walk.nodes;
  for (std::size_t i = burn_in; i < needed; ++i) {
    if (rw[i] >= num_nodes) throw ValidationError("walk visits a node >= n");
  }

  // Accumulate densely for small graphs, hashed otherwise.
  CooccurrenceCounts::PairMap pairs;
  if (num_nodes <= 512) {
    std::vector<std::uint64_t> dense(num_nodes * num_nodes, 0);
    for (std::size_t i = burn_in; i < burn_in + centers; ++i) {
      const std::size_t v = rw[i];
      for (std::size_t j = i + 1; j <= i + window; ++j) {
        const std::size_t c = rw[j];
        ++dense[v * num_nodes + c];
        if (!directed) ++dense[c * num_nodes + v];
      }
    }
    for (std::size_t idx = 0; idx < dense.size(); ++idx) {
      if (dense[idx] != 0) {
        pairs.emplace_hint(pairs.end(),
                           CooccurrenceCounts::Key{static_cast<NodeId>(idx / num_nodes),
                                                   static_cast<NodeId>(idx % num_nodes)},
                           dense[idx]);
      }
    }
  } else {
    std::unordered_map<std::uint64_t, std::uint64_t> hashed;
    auto key = [](NodeId a, NodeId b) { return (static_cast<std::uint64_t>(a) << 32) | b; };
    for (std::size_t i = burn_in; i < burn_in + centers; ++i) {
      for (std::size_t j = i + 1; j <= i + window; ++j) {
        ++hashed[key(rw[i], rw[j])];
        if (!directed) ++hashed[key(rw[j], rw[i])];
      }
    }
    for (const auto& [k, value] : hashed) {
      pairs.emplace(CooccurrenceCounts::Key{static_cast<NodeId>(k >> 32),
                                            static_cast<NodeId>(k & 0xFFFFFFFFULL)},
                    value);
    }
  }
  return CooccurrenceCounts(num_nodes, std::move(pairs));
}

CooccurrenceCounts sample_counts(const Graph& g, const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.start_mode == StartMode::fixed && cfg.start_node >= g.num_nodes()) {
    throw ArgumentError("start node " + std::to_string(cfg.start_node) +
                        " is out of range for a graph with " + std::to_string(g.num_nodes()) +
                        " nodes");
  }
  require_connected(g);

  const std::size_t workers = std::min(cfg.workers, cfg.centers);
  std::vector<CooccurrenceCounts> partial(workers);
  auto run = [&](std::size_t w) {
    const std::size_t share = cfg.centers / workers + (w < cfg.centers % workers ? 1 : 0);
    const Walk walk = walk_with_seed(g, cfg, share, worker_seed(cfg.seed, w));
    partial[w] = extract_pairs(walk, g.num_nodes(), cfg.window, g.directed(), cfg.burn_in, share);
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          run(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    threads.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  CooccurrenceCounts merged(g.num_nodes());
  for (const auto& part : partial) merged += part;
  return merged;
}

EmpiricalConditional empirical_conditional(const CooccurrenceCounts& counts) {
  const auto n = static_cast<Eigen::Index>(counts.num_nodes());
  EmpiricalConditional out{Matrix::Zero(n, n), std::vector<bool>(counts.num_nodes(), false)};
  for (Eigen::Index v = 0; v < n; ++v) {
    if (counts.node_count(static_cast<NodeId>(v)) > 0) {
      out.observed[static_cast<std::size_t>(v)] = true;
    } else {
      out.values.row(v).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  for (const auto& [key, value] : counts.pairs()) {
    out.values(key.first, key.second) =
        static_cast<double>(value) / static_cast<double>(counts.node_count(key.first));
  }
  return out;
}

Vector empirical_frequency(const CooccurrenceCounts& counts) {
  if (counts.empty()) throw ValidationError("co-occurrence counts are empty (|D| = 0)");
  const auto n = static_cast<Eigen::Index>(counts.num_nodes());
  Vector freq(n);
  const auto total = static_cast<double>(counts.total());
  for (Eigen::Index v = 0; v < n; ++v) {
    freq(v) = static_cast<double>(counts.node_count(static_cast<NodeId>(v))) / total;
  }
  return freq;
}

}  // namespace dwmf
