#include "dwmf/factorizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dwmf/error.hpp"

namespace dwmf {

namespace {

constexpr double kSignThreshold = 1e-8;

// Rotates column pairs of `a` until every pair is orthogonal to working
// precision; `v` accumulates the rotations. Returns false if the sweep
// budget runs out.
bool jacobi_orthogonalize(Matrix& a, Matrix& v, std::size_t max_sweeps) {
  const Eigen::Index cols = a.cols();
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = eps * static_cast<double>(a.rows());
  // columns this small are numerically zero; rotating them only churns noise
  const double negligible = std::pow(eps * a.norm(), 2);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < cols; ++p) {
      for (Eigen::Index q = p + 1; q < cols; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (alpha <= negligible || beta <= negligible) continue;
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          const double ap = a(r, p);
          const double aq = a(r, q);
          a(r, p) = c * ap - s * aq;
          a(r, q) = s * ap + c * aq;
        }
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
          const double vp = v(r, p);
          const double vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return true;
  }
  return false;
}

// Replaces column `j` of `u` with a unit vector orthogonal to columns [0, j).
void complete_basis(Matrix& u, Eigen::Index j) {
  for (Eigen::Index e = 0; e < u.rows(); ++e) {
    Vector candidate = Vector::Unit(u.rows(), e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < j; ++k) candidate -= u.col(k).dot(candidate) * u.col(k);
    }
    const double norm = candidate.norm();
    if (norm > 0.5) {
      u.col(j) = candidate / norm;
      return;
    }
  }
}

}  // namespace

SvdResult truncated_svd(const Matrix& m, std::size_t d) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const auto rank_limit = static_cast<std::size_t>(std::min(rows, cols));
  if (d < 1 || d > rank_limit) {
    throw ArgumentError("rank d = " + std::to_string(d) + " must lie in [1, " +
                        std::to_string(rank_limit) + "]");
  }
  if (!m.allFinite()) {
    throw ValidationError(
        "matrix has non-finite entries; apply a zero policy (floor, truncate or mask) first");
  }

  Matrix a = m;
  Matrix v = Matrix::Identity(cols, cols);
  const std::size_t max_sweeps = 10 * static_cast<std::size_t>(std::max(rows, cols));
  if (!jacobi_orthogonalize(a, v, max_sweeps)) {
    throw ConvergenceError("Jacobi SVD did not converge within " + std::to_string(max_sweeps) +
                           " sweeps");
  }

  Vector norms = a.colwise().norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(cols));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

  const auto k = static_cast<Eigen::Index>(d);
  SvdResult out{Matrix(rows, k), Vector(k), Matrix(cols, k)};
  const double largest = norms(order[0]);
  const double negligible =
      largest * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(rows, cols));
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.s(j) = norms(src);
    out.v.col(j) = v.col(src);
    if (norms(src) > negligible) {
      out.u.col(j) = a.col(src) / norms(src);
    } else {
      complete_basis(out.u, j);
    }
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (std::abs(out.u(r, j)) > kSignThreshold) {
        if (out.u(r, j) < 0.0) {
          out.u.col(j) *= -1.0;
          out.v.col(j) *= -1.0;
        }
        break;
      }
    }
  }

  const double budget = 1e-10 * m.norm();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double residual = (m * out.v.col(j) - out.s(j) * out.u.col(j)).norm();
    if (residual > budget) {
      throw ConvergenceError("singular triplet " + std::to_string(j) + " has residual " +
                             std::to_string(residual) + " above tolerance");
    }
  }
  return out;
}

std::string to_string(FactorSplit split) {
  return split == FactorSplit::symmetric ? "symmetric" : "node";
}

FactorSplit factor_split_from_string(const std::string& name) {
  if (name == "symmetric") return FactorSplit::symmetric;
  if (name == "node") return FactorSplit::node;
  throw ArgumentError("unknown factor split \"" + name + "\" (expected symmetric or node)");
}

EmbeddingPair factorize(const Matrix& m, std::size_t d, FactorSplit split) {
  const SvdResult svd = truncated_svd(m, d);
  EmbeddingPair pair;
  if (split == FactorSplit::symmetric) {
    const Vector root = svd.s.cwiseSqrt();
    pair.node = svd.u * root.asDiagonal();
    pair.context = svd.v * root.asDiagonal();
  } else {
    pair.node = svd.u * svd.s.asDiagonal();
    pair.context = svd.v;
  }
  return pair;
}

EmbeddingPair factorize(const TargetMatrix& target, std::size_t d, FactorSplit split) {
  return factorize(target.values, d, split);
}

Matrix dot_matrix(const EmbeddingPair& pair) {
  if (pair.node.cols() != pair.context.cols()) {
    throw ArgumentError("node and context embeddings have different dimensions");
  }
  return pair.node * pair.context.transpose();
}

double reconstruction_error(const Matrix& m, const EmbeddingPair& pair) {
  if (pair.node.rows() != m.rows() || pair.context.rows() != m.cols() ||
      pair.node.cols() != pair.context.cols()) {
    throw ArgumentError("embedding shapes do not match a " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + " matrix");
  }
  return (m - dot_matrix(pair)).norm();
}

}  // namespace dwmf
