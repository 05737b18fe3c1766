#pragma once

#include <cstddef>
#include <string>

#include "dwmf/closed_form.hpp"
#include "dwmf/matrix.hpp"

namespace dwmf {

/// Node vectors W (row i = v_i) and context vectors H (row j = c_j);
/// W H^T approximates the target.
struct EmbeddingPair {
  Matrix node;     // W, |V| x d
  Matrix context;  // H, |V_C| x d

  std::size_t dim() const noexcept { return static_cast<std::size_t>(node.cols()); }
};

struct SvdResult {
  Matrix u;  // m x d, orthonormal columns
  Vector s;  // d singular values, descending
  Matrix v;  // n x d, orthonormal columns
};

/// Top-d singular triplets via one-sided (Hestenes) Jacobi.
///
/// Each left singular vector is signed so that its first component with
/// magnitude above 1e-8 is positive (the right vector flips with it).
/// Throws ValidationError on non-finite input, ArgumentError when d is not
/// in [1, min(m, n)], and ConvergenceError if the sweep budget (10 n) runs
/// out or a triplet residual |M v - s u| exceeds 1e-10 |M|_F.
SvdResult truncated_svd(const Matrix& m, std::size_t d);

enum class FactorSplit {
  symmetric,  // W = U sqrt(S), H = V sqrt(S)
  node,       // W = U S,       H = V
};

std::string to_string(FactorSplit split);
FactorSplit factor_split_from_string(const std::string& name);

EmbeddingPair factorize(const Matrix& m, std::size_t d,
                        FactorSplit split = FactorSplit::symmetric);
EmbeddingPair factorize(const TargetMatrix& target, std::size_t d,
                        FactorSplit split = FactorSplit::symmetric);

/// W H^T.
Matrix dot_matrix(const EmbeddingPair& pair);

/// |M - W H^T|_F.
double reconstruction_error(const Matrix& m, const EmbeddingPair& pair);

}  // namespace dwmf
