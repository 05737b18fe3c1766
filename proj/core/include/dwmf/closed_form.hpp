#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dwmf/graph.hpp"
#include "dwmf/matrix.hpp"
#include "dwmf/walk_sampler.hpp"

namespace dwmf {

/// P = (A + A^2 + ... + A^t) / t. Row i is the average probability of
/// reaching each node from i over the next t steps.
struct WalkMatrix {
  Matrix values;
  std::size_t window = 1;
};

/// Accumulates A^s by repeated right-multiplication, without renormalizing
/// between powers.
WalkMatrix walk_probability_matrix(const Graph& g, std::size_t window);

enum class BiasMode { zero, log2t };
enum class ZeroPolicyKind { floor, truncate, mask };

std::string to_string(BiasMode mode);
BiasMode bias_mode_from_string(const std::string& name);
std::string to_string(ZeroPolicyKind kind);
ZeroPolicyKind zero_policy_from_string(const std::string& name);

/// How log(0) entries of a target are made finite.
///   floor:    the entry becomes log(epsilon)
///   truncate: every entry becomes max(M_ij, 0), so log(0) entries become 0
///   mask:     the entry becomes 0 and is marked in TargetMatrix::mask
struct ZeroPolicy {
  ZeroPolicyKind kind = ZeroPolicyKind::floor;
  double epsilon = 1e-12;

  static ZeroPolicy floor(double eps = 1e-12) { return {ZeroPolicyKind::floor, eps}; }
  static ZeroPolicy truncate() { return {ZeroPolicyKind::truncate, 1e-12}; }
  static ZeroPolicy mask() { return {ZeroPolicyKind::mask, 1e-12}; }
};

enum class TargetKind { softmax, sgns };

struct TargetMatrix {
  Matrix values;
  TargetKind kind = TargetKind::softmax;
  BiasMode bias = BiasMode::zero;  // softmax targets
  std::size_t negatives = 1;       // k, SGNS targets
  std::size_t window = 0;          // 0 when built from counts
  ZeroPolicy policy;
  // Set only under the mask policy; true where the underlying
  // probability or count was zero.
  std::optional<MaskMatrix> mask;
  // Rows whose node was never observed (SGNS from counts). Those rows are NaN.
  std::vector<bool> absent_rows;
};

/// b = zero:  M_ij = log P_ij
/// b = log2t: M_ij = log(2t P_ij)
TargetMatrix softmax_target(const WalkMatrix& p, BiasMode bias,
                            ZeroPolicy policy = ZeroPolicy::floor());

/// 2t P_ij: expected number of appearances of v_j among the t left and
/// t right neighbors of an occurrence of v_i.
Matrix expected_neighbor_counts(const WalkMatrix& p);

/// Shifted PMI from counts: log(#(v,c) |D| / (#(v) #(c))) - log k.
TargetMatrix sgns_target_from_counts(const CooccurrenceCounts& counts, std::size_t k,
                                     ZeroPolicy policy = ZeroPolicy::truncate());

/// Infinite-sample limit of sgns_target_from_counts on walk-sampled counts:
/// M_ij = log(P_ij / pi_j) - log k.
TargetMatrix sgns_target_exact(const Graph& g, std::size_t window, std::size_t k,
                               ZeroPolicy policy = ZeroPolicy::truncate());

struct ComparisonReport {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t compared = 0;
  // masked entries plus entries where either side is non-finite
  std::size_t excluded = 0;
};

/// Entrywise |X - Y| statistics. `mask` marks entries to skip.
ComparisonReport compare_matrices(const Matrix& x, const Matrix& y,
                                  const MaskMatrix* mask = nullptr);

}  // namespace dwmf
