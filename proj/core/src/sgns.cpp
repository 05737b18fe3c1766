#include "dwmf/sgns.hpp"

#include <algorithm>
#include <cmath>

#include "dwmf/error.hpp"
#include "dwmf/rng.hpp"

namespace dwmf {

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sgns_pair_objective(double x, double positive, double negative_weight) {
  return positive * log_sigmoid(x) + negative_weight * log_sigmoid(-x);
}

double sgns_pair_optimum(double positive, double negative_weight) {
  if (!(positive > 0.0) || !(negative_weight > 0.0)) {
    throw ArgumentError("per-pair optimum needs positive and negative weights > 0");
  }
  return std::log(positive) - std::log(negative_weight);
}

Vector noise_distribution(const CooccurrenceCounts& counts) {
  if (counts.empty()) throw ValidationError("co-occurrence counts are empty (|D| = 0)");
  const auto n = static_cast<Eigen::Index>(counts.num_nodes());
  Vector p(n);
  const auto total = static_cast<double>(counts.total());
  for (Eigen::Index c = 0; c < n; ++c) {
    p(c) = static_cast<double>(counts.context_count(static_cast<NodeId>(c))) / total;
  }
  return p;
}

namespace {

void check_shapes(const CooccurrenceCounts& counts, const EmbeddingPair& pair) {
  const auto n = static_cast<Eigen::Index>(counts.num_nodes());
  if (pair.node.rows() != n || pair.context.rows() != n) {
    throw ArgumentError("embeddings have " + std::to_string(pair.node.rows()) + " / " +
                        std::to_string(pair.context.rows()) + " rows but counts cover " +
                        std::to_string(n) + " nodes");
  }
  if (pair.node.cols() != pair.context.cols()) {
    throw ArgumentError("node and context embeddings have different dimensions");
  }
}

// k #(v) #(c) / |D| for every (v, c).
Matrix negative_weights(const CooccurrenceCounts& counts, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(counts.num_nodes());
  Vector node(n);
  Vector context(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    node(i) = static_cast<double>(counts.node_count(static_cast<NodeId>(i)));
    context(i) = static_cast<double>(counts.context_count(static_cast<NodeId>(i)));
  }
  return (static_cast<double>(k) / static_cast<double>(counts.total())) * node *
         context.transpose();
}

}  // namespace

double sgns_objective(const CooccurrenceCounts& counts, const EmbeddingPair& pair,
                      std::size_t k) {
  check_shapes(counts, pair);
  if (counts.empty()) return 0.0;
  const Matrix x = dot_matrix(pair);
  const Matrix positive = counts.dense();
  const Matrix negative = negative_weights(counts, k);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      total += sgns_pair_objective(x(i, j), positive(i, j), negative(i, j));
    }
  }
  return total;
}

EmbeddingPair sgns_gradient(const CooccurrenceCounts& counts, const EmbeddingPair& pair,
                            std::size_t k) {
  check_shapes(counts, pair);
  const Matrix x = dot_matrix(pair);
  const Matrix positive = counts.dense();
  const Matrix negative =
      counts.empty() ? Matrix::Zero(x.rows(), x.cols()) : negative_weights(counts, k);
  // dl/dx = #(v,c) (1 - sigma(x)) - k #(v)#(c)/|D| sigma(x)
  Matrix residual(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      residual(i, j) = positive(i, j) * sigmoid(-x(i, j)) - negative(i, j) * sigmoid(x(i, j));
    }
  }
  return {residual * pair.context, residual.transpose() * pair.node};
}

double sgns_objective_bound(const CooccurrenceCounts& counts, std::size_t k) {
  if (counts.empty()) return 0.0;
  const Matrix negative = negative_weights(counts, k);
  double bound = 0.0;
  for (const auto& [key, value] : counts.pairs()) {
    const auto positive = static_cast<double>(value);
    const double weight = negative(key.first, key.second);
    bound += sgns_pair_objective(sgns_pair_optimum(positive, weight), positive, weight);
  }
  return bound;
}

double TrainConfig::resolved_init_scale() const {
  return init_scale > 0.0 ? init_scale : 0.5 / static_cast<double>(dim);
}

void TrainConfig::validate() const {
  if (dim == 0) throw ArgumentError("embedding dimension must be >= 1");
  if (negatives == 0) throw ArgumentError("number of negative samples k must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be > 0");
  if (samples_per_epoch == 0) throw ArgumentError("samples per epoch must be >= 1");
  if (!(min_lr_fraction > 0.0) || min_lr_fraction > 1.0) {
    throw ArgumentError("learning-rate floor fraction must lie in (0, 1]");
  }
}

EmbeddingPair initial_embeddings(std::size_t n, const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double scale = cfg.resolved_init_scale();
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(cfg.dim);
  EmbeddingPair pair{Matrix(rows, cols), Matrix(rows, cols)};
  // row-major fill order so the layout of the random stream is obvious
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) pair.node(i, j) = rng.uniform(-scale, scale);
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) pair.context(i, j) = rng.uniform(-scale, scale);
  }
  return pair;
}

namespace {

// Walker alias table for O(1) draws from a discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights)
      : probability_(weights.size()), alias_(weights.size(), 0) {
    const std::size_t n = weights.size();
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> scaled(n);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      probability_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) probability_[i] = 1.0;
    for (std::size_t i : small) probability_[i] = 1.0;
  }

  std::size_t draw(Rng& rng) const {
    const std::size_t bucket = rng.below(probability_.size());
    return rng.uniform() < probability_[bucket] ? bucket : alias_[bucket];
  }

 private:
  std::vector<double> probability_;
  std::vector<std::size_t> alias_;
};

}  // namespace

TrainResult train_sgns(const CooccurrenceCounts& counts, const TrainConfig& cfg) {
  cfg.validate();
  if (counts.empty()) throw ValidationError("cannot train on empty co-occurrence counts");
  const std::size_t n = counts.num_nodes();

  TrainResult result;
  result.pair = initial_embeddings(n, cfg);
  result.objective.reserve(cfg.epochs + 1);
  result.objective.push_back(sgns_objective(counts, result.pair, cfg.negatives));

  std::vector<CooccurrenceCounts::Key> positives;
  std::vector<double> positive_weights;
  positives.reserve(counts.pairs().size());
  for (const auto& [key, value] : counts.pairs()) {
    positives.push_back(key);
    positive_weights.push_back(static_cast<double>(value));
  }
  const AliasTable positive_table(positive_weights);
  std::vector<double> noise_weights(n);
  for (std::size_t c = 0; c < n; ++c) {
    noise_weights[c] = static_cast<double>(counts.context_count(static_cast<NodeId>(c)));
  }
  const AliasTable noise_table(noise_weights);

  // Separate stream from the initialization.
  Rng rng(mix_seed(cfg.seed ^ 0x5347'4E53'5452'4149ULL));
  const std::size_t per_epoch = cfg.samples_per_epoch;
  const double total_steps = static_cast<double>(per_epoch * cfg.epochs);
  const double lr_floor = cfg.learning_rate * cfg.min_lr_fraction;
  const auto d = static_cast<Eigen::Index>(cfg.dim);

  auto& w = result.pair.node;
  auto& h = result.pair.context;
  Eigen::RowVectorXd accum(d);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t s = 0; s < per_epoch; ++s, ++step) {
      const double lr = std::max(
          lr_floor, cfg.learning_rate * (1.0 - static_cast<double>(step) / total_steps));
      const auto [v, c] = positives[positive_table.draw(rng)];
      accum.setZero();
      // label 1 for the positive context, 0 for each noise context
      for (std::size_t neg = 0; neg <= cfg.negatives; ++neg) {
        const bool is_positive = neg == 0;
        const auto ctx =
            static_cast<Eigen::Index>(is_positive ? c : noise_table.draw(rng));
        const double x = w.row(v).dot(h.row(ctx));
        const double g = lr * ((is_positive ? 1.0 : 0.0) - sigmoid(x));
        accum += g * h.row(ctx);
        h.row(ctx) += g * w.row(v);
      }
      w.row(v) += accum;
    }
    result.objective.push_back(sgns_objective(counts, result.pair, cfg.negatives));
  }
  return result;
}

}  // namespace dwmf
