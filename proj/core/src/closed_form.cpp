#include "dwmf/closed_form.hpp"

#include <cmath>
#include <limits>

#include "dwmf/error.hpp"

namespace dwmf {

std::string to_string(BiasMode mode) { return mode == BiasMode::zero ? "zero" : "log2t"; }

BiasMode bias_mode_from_string(const std::string& name) {
  if (name == "zero") return BiasMode::zero;
  if (name == "log2t") return BiasMode::log2t;
  throw ArgumentError("unknown bias mode \"" + name + "\" (expected zero or log2t)");
}

std::string to_string(ZeroPolicyKind kind) {
  switch (kind) {
    case ZeroPolicyKind::floor:
      return "floor";
    case ZeroPolicyKind::truncate:
      return "truncate";
    case ZeroPolicyKind::mask:
      return "mask";
  }
  return "unknown";
}

ZeroPolicyKind zero_policy_from_string(const std::string& name) {
  if (name == "floor") return ZeroPolicyKind::floor;
  if (name == "truncate") return ZeroPolicyKind::truncate;
  if (name == "mask") return ZeroPolicyKind::mask;
  throw ArgumentError("unknown zero policy \"" + name + "\" (expected floor, truncate or mask)");
}

WalkMatrix walk_probability_matrix(const Graph& g, std::size_t window) {
  if (window == 0) throw ArgumentError("window must be >= 1");
  const Matrix a = transition_matrix(g);
  Matrix power = a;
  Matrix sum = a;
  for (std::size_t s = 2; s <= window; ++s) {
    power = power * a;
    sum += power;
  }
  sum /= static_cast<double>(window);
  return {std::move(sum), window};
}

namespace {

void check_policy(const ZeroPolicy& policy) {
  if (policy.kind == ZeroPolicyKind::floor && !(policy.epsilon > 0.0)) {
    throw ArgumentError("floor policy needs epsilon > 0");
  }
}

// Fills target.values from `log_value(i, j)` (called only when `is_zero(i, j)`
// is false) and applies the zero policy.
template <typename IsZero, typename LogValue>
void fill_target(TargetMatrix& target, Eigen::Index n, IsZero is_zero, LogValue log_value) {
  const auto& policy = target.policy;
  target.values.resize(n, n);
  if (policy.kind == ZeroPolicyKind::mask) target.mask = MaskMatrix::Constant(n, n, false);
  const double floor_value = std::log(policy.epsilon);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double& m = target.values(i, j);
      if (!is_zero(i, j)) {
        m = log_value(i, j);
        if (policy.kind == ZeroPolicyKind::truncate) m = std::max(m, 0.0);
        continue;
      }
      switch (policy.kind) {
        case ZeroPolicyKind::floor:
          m = floor_value;
          break;
        case ZeroPolicyKind::truncate:
          m = 0.0;
          break;
        case ZeroPolicyKind::mask:
          m = 0.0;
          (*target.mask)(i, j) = true;
          break;
      }
    }
  }
}

}  // namespace

TargetMatrix softmax_target(const WalkMatrix& p, BiasMode bias, ZeroPolicy policy) {
  check_policy(policy);
  if (p.values.rows() != p.values.cols()) throw ValidationError("walk matrix must be square");
  TargetMatrix target;
  target.kind = TargetKind::softmax;
  target.bias = bias;
  target.window = p.window;
  target.policy = policy;
  const double offset =
      bias == BiasMode::log2t ? std::log(2.0 * static_cast<double>(p.window)) : 0.0;
  fill_target(
      target, p.values.rows(), [&](auto i, auto j) { return p.values(i, j) <= 0.0; },
      [&](auto i, auto j) { return std::log(p.values(i, j)) + offset; });
  return target;
}

Matrix expected_neighbor_counts(const WalkMatrix& p) {
  return 2.0 * static_cast<double>(p.window) * p.values;
}

TargetMatrix sgns_target_from_counts(const CooccurrenceCounts& counts, std::size_t k,
                                     ZeroPolicy policy) {
  if (k == 0) throw ArgumentError("number of negative samples k must be >= 1");
  if (counts.empty()) throw ValidationError("co-occurrence counts are empty (|D| = 0)");
  check_policy(policy);

  const auto n = static_cast<Eigen::Index>(counts.num_nodes());
  const Matrix dense = counts.dense();
  const auto total = static_cast<double>(counts.total());
  const double shift = std::log(static_cast<double>(k));
  const auto& node = counts.node_counts();
  const auto& context = counts.context_counts();

  TargetMatrix target;
  target.kind = TargetKind::sgns;
  target.negatives = k;
  target.policy = policy;
  fill_target(
      target, n, [&](auto i, auto j) { return dense(i, j) <= 0.0; },
      [&](auto i, auto j) {
        return std::log(dense(i, j)) + std::log(total) -
               std::log(static_cast<double>(node[static_cast<std::size_t>(i)])) -
               std::log(static_cast<double>(context[static_cast<std::size_t>(j)])) - shift;
      });

  target.absent_rows.assign(counts.num_nodes(), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (node[static_cast<std::size_t>(i)] == 0) {
      target.absent_rows[static_cast<std::size_t>(i)] = true;
      target.values.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return target;
}

TargetMatrix sgns_target_exact(const Graph& g, std::size_t window, std::size_t k,
                               ZeroPolicy policy) {
  if (k == 0) throw ArgumentError("number of negative samples k must be >= 1");
  check_policy(policy);
  const Vector pi = stationary_distribution(g);
  const WalkMatrix p = walk_probability_matrix(g, window);
  const double shift = std::log(static_cast<double>(k));

  TargetMatrix target;
  target.kind = TargetKind::sgns;
  target.negatives = k;
  target.window = window;
  target.policy = policy;
  fill_target(
      target, p.values.rows(), [&](auto i, auto j) { return p.values(i, j) <= 0.0; },
      [&](auto i, auto j) { return std::log(p.values(i, j) / pi(j)) - shift; });
  return target;
}

ComparisonReport compare_matrices(const Matrix& x, const Matrix& y, const MaskMatrix* mask) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ArgumentError("cannot compare a " + std::to_string(x.rows()) + "x" +
                        std::to_string(x.cols()) + " matrix with a " +
                        std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + " matrix");
  }
  if (mask && (mask->rows() != x.rows() || mask->cols() != x.cols())) {
    throw ArgumentError("mask shape does not match the compared matrices");
  }
  ComparisonReport report;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if ((mask && (*mask)(i, j)) || !std::isfinite(x(i, j)) || !std::isfinite(y(i, j))) {
        ++report.excluded;
        continue;
      }
      const double diff = std::abs(x(i, j) - y(i, j));
      report.max_abs = std::max(report.max_abs, diff);
      sum += diff;
      ++report.compared;
    }
  }
  if (report.compared > 0) report.mean_abs = sum / static_cast<double>(report.compared);
  return report;
}

}  // namespace dwmf
