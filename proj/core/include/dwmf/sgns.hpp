#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dwmf/factorizer.hpp"
#include "dwmf/matrix.hpp"
#include "dwmf/walk_sampler.hpp"

namespace dwmf {

/// Numerically stable log(sigma(x)).
double log_sigmoid(double x);
double sigmoid(double x);

/// Per-pair SGNS objective
///   l(x) = positive * log sigma(x) + negative_weight * log sigma(-x)
/// with positive = #(v,c) and negative_weight = k #(v) #(c) / |D|.
double sgns_pair_objective(double x, double positive, double negative_weight);

/// argmax of sgns_pair_objective: log(positive / negative_weight), which for
/// the weights above is PMI(v,c) - log k. Requires both weights positive.
double sgns_pair_optimum(double positive, double negative_weight);

/// Noise distribution #(c)/|D|.
Vector noise_distribution(const CooccurrenceCounts& counts);

/// Exact SGNS objective, with the expectation over negatives expanded:
///   sum_{v,c} #(v,c) log sigma(w_v.h_c) + k #(v) #(c)/|D| log sigma(-w_v.h_c)
double sgns_objective(const CooccurrenceCounts& counts, const EmbeddingPair& pair,
                      std::size_t k);

/// Gradient of sgns_objective with respect to W and H (same shapes).
EmbeddingPair sgns_gradient(const CooccurrenceCounts& counts, const EmbeddingPair& pair,
                            std::size_t k);

/// Sum over pairs with #(v,c) > 0 of the per-pair maximum l(x*). Pairs with
/// zero count contribute their supremum 0, so this bounds sgns_objective
/// from above for any embedding.
double sgns_objective_bound(const CooccurrenceCounts& counts, std::size_t k);

struct TrainConfig {
  std::size_t dim = 64;
  std::size_t negatives = 5;
  std::size_t epochs = 200;
  // per positive draw
  double learning_rate = 0.0005;
  // The learning rate decays linearly to learning_rate * min_lr_fraction.
  double min_lr_fraction = 1e-4;
  std::uint64_t seed = 0;
  // <= 0 selects 0.5 / dim
  double init_scale = 0.0;
  // Positive pairs drawn per epoch.
  std::size_t samples_per_epoch = 10000;

  double resolved_init_scale() const;
  void validate() const;
};

struct TrainResult {
  EmbeddingPair pair;
  // Exact objective after initialization and after each epoch
  // (epochs + 1 entries).
  std::vector<double> objective;
};

/// SGD over positives drawn with probability #(v,c)/|D|. Each positive is
/// followed by k negatives drawn from the noise distribution. Single
/// threaded and deterministic given cfg.seed.
TrainResult train_sgns(const CooccurrenceCounts& counts, const TrainConfig& cfg);

/// The seeded initialization train_sgns starts from.
EmbeddingPair initial_embeddings(std::size_t n, const TrainConfig& cfg);

}  // namespace dwmf
