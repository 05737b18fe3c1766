#include <doctest.h>

#include <cmath>

#include "dwmf/closed_form.hpp"
#include "dwmf/error.hpp"
#include "dwmf/factorizer.hpp"
#include "oracles.hpp"

using dwmf::Matrix;
using dwmf::Vector;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  dwmf::Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

double orthonormality_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

// Largest principal-angle sine between the column spaces of a and b.
double subspace_gap(const Matrix& a, const Matrix& b) {
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  return Eigen::JacobiSVD<Matrix>(residual).singularValues()(0);
}

}  // namespace

TEST_CASE("truncated_svd examples") {
  const Matrix ones{{2, 2}, {2, 2}};
  const auto r1 = dwmf::truncated_svd(ones, 1);
  CHECK(std::abs(r1.s(0) - 4.0) < 1e-12);
  CHECK((r1.u * r1.s.asDiagonal() * r1.v.transpose() - ones).cwiseAbs().maxCoeff() < 1e-10);

  const auto id = dwmf::truncated_svd(Matrix::Identity(3, 3), 3);
  CHECK((id.s - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-15);

  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 3, 2, 1;
  const auto d2 = dwmf::truncated_svd(diag, 2);
  CHECK(d2.s(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d2.s(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((diag - d2.u * d2.s.asDiagonal() * d2.v.transpose()).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated_svd errors") {
  CHECK_THROWS_AS(dwmf::truncated_svd(Matrix::Identity(3, 3), 0), dwmf::ArgumentError);
  CHECK_THROWS_AS(dwmf::truncated_svd(Matrix::Identity(3, 3), 4), dwmf::ArgumentError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = -std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(dwmf::truncated_svd(bad, 1), doctest::Contains("zero policy"),
                       dwmf::ValidationError);
}

TEST_CASE("truncated_svd agrees with the Gram eigenvalue oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Matrix m = random_matrix(6, 6, seed);
    const auto svd = dwmf::truncated_svd(m, 6);
    const auto expected = oracle::gram_singular_values(m);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(svd.s(i) - expected[i]) < 1e-8);
    for (int i = 0; i + 1 < 6; ++i) CHECK(svd.s(i) >= svd.s(i + 1));
    CHECK(orthonormality_error(svd.u) < 1e-8);
    CHECK(orthonormality_error(svd.v) < 1e-8);
  }
}

TEST_CASE("truncated_svd on rectangular and rank-deficient input") {
  const Matrix tall = random_matrix(7, 4, 3);
  const auto t = dwmf::truncated_svd(tall, 4);
  CHECK((t.u * t.s.asDiagonal() * t.v.transpose() - tall).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix wide = random_matrix(3, 5, 4);
  const auto w = dwmf::truncated_svd(wide, 3);
  CHECK((w.u * w.s.asDiagonal() * w.v.transpose() - wide).cwiseAbs().maxCoeff() < 1e-12);

  // rank 2 in a 4x4: the zero singular directions still get an orthonormal basis
  const Matrix low = random_matrix(4, 2, 5) * random_matrix(2, 4, 6);
  const auto l = dwmf::truncated_svd(low, 4);
  CHECK(l.s(2) < 1e-12);
  CHECK(orthonormality_error(l.u) < 1e-8);
  CHECK(orthonormality_error(l.v) < 1e-8);

  const auto zero = dwmf::truncated_svd(Matrix::Zero(3, 3), 2);
  CHECK(zero.s.cwiseAbs().maxCoeff() == 0.0);
  CHECK(orthonormality_error(zero.u) < 1e-12);
}

TEST_CASE("truncated_svd sign convention is deterministic") {
  const Matrix m = random_matrix(5, 5, 12);
  const auto a = dwmf::truncated_svd(m, 3);
  const auto b = dwmf::truncated_svd(-1.0 * (-1.0 * m), 3);
  CHECK(a.u == b.u);
  for (Eigen::Index j = 0; j < 3; ++j) {
    for (Eigen::Index r = 0; r < 5; ++r) {
      if (std::abs(a.u(r, j)) > 1e-8) {
        CHECK(a.u(r, j) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("factorize examples") {
  const auto path = dwmf::parse_edge_list(std::string("0 1\n1 2\n"), false);
  const auto softmax = dwmf::softmax_target(dwmf::walk_probability_matrix(path, 2), dwmf::BiasMode::zero);
  const auto full = dwmf::factorize(softmax, 3);
  CHECK(full.dim() == 3);
  CHECK((dwmf::dot_matrix(full) - softmax.values).cwiseAbs().maxCoeff() < 1e-8);

  const auto k3 = dwmf::parse_edge_list(std::string("0 1\n1 2\n0 2\n"), false);
  const auto sgns = dwmf::sgns_target_exact(k3, 1, 1);
  CHECK((dwmf::dot_matrix(dwmf::factorize(sgns, 3)) - sgns.values).cwiseAbs().maxCoeff() < 1e-8);

  const Matrix m = random_matrix(5, 5, 77);
  const auto svd = dwmf::truncated_svd(m, 5);
  const auto rank1 = dwmf::factorize(m, 1);
  const double tail = std::sqrt(svd.s.tail(4).squaredNorm());
  CHECK(dwmf::reconstruction_error(m, rank1) == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("factorize splits") {
  const Matrix m = random_matrix(4, 4, 31);
  const auto sym = dwmf::factorize(m, 2, dwmf::FactorSplit::symmetric);
  const auto node = dwmf::factorize(m, 2, dwmf::FactorSplit::node);
  CHECK((dwmf::dot_matrix(sym) - dwmf::dot_matrix(node)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(orthonormality_error(node.context) < 1e-8);
  CHECK(dwmf::factor_split_from_string("node") == dwmf::FactorSplit::node);
  CHECK_THROWS_AS(dwmf::factor_split_from_string("left"), dwmf::ArgumentError);
}

TEST_CASE("reconstruction_error") {
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 3, 2, 1;
  // Eckart-Young: the rank-1 residual is sqrt(2^2 + 1^2); the full SVD
  // oracle gives the same singular values
  const auto sv = oracle::gram_singular_values(diag);
  CHECK(std::sqrt(sv[1] * sv[1] + sv[2] * sv[2]) == doctest::Approx(std::sqrt(5.0)));
  CHECK(dwmf::reconstruction_error(diag, dwmf::factorize(diag, 1)) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

  CHECK(dwmf::reconstruction_error(diag, dwmf::factorize(diag, 3)) < 1e-10);

  const dwmf::EmbeddingPair zero{Matrix::Zero(3, 2), Matrix::Zero(3, 2)};
  CHECK(dwmf::reconstruction_error(diag, zero) == doctest::Approx(diag.norm()));

  const dwmf::EmbeddingPair wrong{Matrix::Zero(2, 2), Matrix::Zero(3, 2)};
  CHECK_THROWS_AS(dwmf::reconstruction_error(diag, wrong), dwmf::ArgumentError);
}

TEST_CASE("reconstruction error is non-increasing in rank") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix m = random_matrix(6, 6, 100 + seed);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t d = 1; d <= 6; ++d) {
      const double err = dwmf::reconstruction_error(m, dwmf::factorize(m, d));
      CHECK(err <= previous + 1e-12);
      previous = err;
    }
    CHECK(previous <= 1e-8 * m.norm());
  }
}

TEST_CASE("symmetric input gives node and context vectors spanning one space") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix r = random_matrix(6, 6, 200 + seed);
    const Matrix sym = r + r.transpose();
    for (std::size_t d : {2u, 4u}) {
      const auto pair = dwmf::factorize(sym, d);
      CHECK(subspace_gap(pair.node, pair.context) < 1e-6);
    }
  }
}

TEST_CASE("dot_matrix") {
  const dwmf::EmbeddingPair id{Matrix::Identity(3, 3), Matrix::Identity(3, 3)};
  CHECK(dwmf::dot_matrix(id) == Matrix::Identity(3, 3));
  const dwmf::EmbeddingPair scalar{Matrix{{2}}, Matrix{{3}}};
  CHECK(dwmf::dot_matrix(scalar)(0, 0) == 6.0);
}
