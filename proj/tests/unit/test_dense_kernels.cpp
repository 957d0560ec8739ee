#include <doctest.h>

#include <boost/random/normal_distribution.hpp>

#include "hss/dense_kernels.hpp"
#include "hss/random.hpp"

using namespace hss;

namespace {

  Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
    Rng rng(seed);
    boost::random::normal_distribution<double> N;
    Matrix A(m, n);
    for (Index j = 0; j < n; j++)
      for (Index i = 0; i < m; i++) A(i, j) = N(rng);
    return A;
  }

  Matrix cols(const Matrix& S, const std::vector<Index>& J) {
    Matrix out(S.rows(), static_cast<Index>(J.size()));
    for (std::size_t k = 0; k < J.size(); k++) out.col(k) = S.col(J[k]);
    return out;
  }

  Matrix rows(const Matrix& S, const std::vector<Index>& J) {
    Matrix out(static_cast<Index>(J.size()), S.cols());
    for (std::size_t k = 0; k < J.size(); k++) out.row(k) = S.row(J[k]);
    return out;
  }

} // namespace

TEST_CASE("qr: identity, zero and random inputs") {
  auto f = qr(Matrix::Identity(3, 3));
  CHECK((f.Q.cwiseAbs() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
  for (int i = 0; i < 3; i++) CHECK(std::abs(f.Omega(i, i)) == doctest::Approx(1.0));

  auto z = qr(Matrix::Zero(4, 2));
  CHECK(z.Omega.diagonal().cwiseAbs().maxCoeff() == 0.0);

  Matrix S = random_matrix(8, 3, 1);
  auto r = qr(S);
  CHECK(r.Q.rows() == 8);
  CHECK(r.Q.cols() == 3);
  CHECK((r.Q * r.Omega - S).norm() <= 1e-13 * S.norm());
  CHECK((r.Q.transpose() * r.Q - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.Omega.triangularView<Eigen::StrictlyLower>().toDenseMatrix().isZero(0.0));

  Matrix W = random_matrix(3, 7, 2);
  auto w = qr(W);
  CHECK(w.Q.cols() == 3);
  CHECK(w.Omega.rows() == 3);
  CHECK(w.Omega.cols() == 7);
  CHECK((w.Q * w.Omega - W).norm() <= 1e-13 * W.norm());
}

TEST_CASE("project_out: annihilates the range and is idempotent") {
  Matrix Q = qr(random_matrix(20, 5, 3)).Q;
  Matrix C = random_matrix(5, 4, 4);
  Matrix in_range = Q * C;
  CHECK(project_out(Q, in_range).norm() <= 1e-12 * in_range.norm());

  CHECK(project_out(Matrix(20, 0), in_range) == in_range);

  Matrix S = random_matrix(20, 6, 5);
  Matrix P = project_out(Q, S);
  CHECK((Q.transpose() * P).cwiseAbs().maxCoeff() <= 1e-12 * S.norm());
  CHECK((project_out(Q, project_out(Q, P)) - P).cwiseAbs().maxCoeff() <= 1e-12 * S.norm());
  // first pass alone already removes the range; the second only cleans roundoff
  Matrix once = S - Q * (Q.transpose() * S);
  CHECK((once - P).norm() <= 1e-12 * S.norm());
  CHECK_THROWS_AS(project_out(Q, random_matrix(19, 2, 6)), std::invalid_argument);
}

TEST_CASE("ID: hand example [c, 2c]") {
  Matrix S(3, 2);
  Vector c(3);
  c << 1, -2, 0.5;
  S.col(0) = c;
  S.col(1) = 2 * c;
  auto id = interpolative_decomposition(S, 1e-8, 1e-8);
  CHECK(id.rank == 1);
  CHECK(id.J == std::vector<Index>{1});
  REQUIRE(id.Y.rows() == 1);
  CHECK(id.Y(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(id.Y(0, 1) == 1.0);
}

TEST_CASE("ID: zero and identity inputs") {
  auto z = interpolative_decomposition(Matrix::Zero(4, 3), 1e-8, 1e-8);
  CHECK(z.rank == 0);
  CHECK(z.J.empty());

  Matrix I = Matrix::Identity(3, 3);
  auto id = interpolative_decomposition(I, 1e-8, 1e-8);
  CHECK(id.rank == 3);
  // equal norms: lowest index first
  CHECK(id.J == std::vector<Index>{0, 1, 2});
  CHECK((cols(I, id.J) * id.Y - I).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(interpolative_decomposition(I, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("ID: exact identity block and truncation bound on random inputs") {
  std::uint64_t seed = 10;
  for (auto [m, n] : {std::pair{10, 10}, {30, 64}, {64, 20}, {64, 64}})
    for (double eps : {1e-1, 1e-3, 1e-8}) {
      CAPTURE(m);
      CAPTURE(n);
      CAPTURE(eps);
      // graded columns so the rank depends on the tolerance
      Matrix S = random_matrix(m, 12, seed) * random_matrix(12, n, seed + 1);
      seed += 2;
      for (Index j = 0; j < n; j++) S.col(j) *= std::pow(0.6, double(j % 12));
      S += 1e-9 * random_matrix(m, n, seed++);
      auto id = interpolative_decomposition(S, eps, 1e-12);
      REQUIRE(id.Y.rows() == id.rank);
      for (Index k = 0; k < id.rank; k++)
        for (Index i = 0; i < id.rank; i++)
          CHECK(id.Y(i, id.J[k]) == (i == k ? 1.0 : 0.0));
      // residual bound sqrt(n - r) * threshold, with |R_11| the largest column norm
      double r11 = 0;
      for (Index j = 0; j < n; j++) r11 = std::max(r11, S.col(j).norm());
      double thresh = std::max(1e-12, eps * r11);
      double resid = (S - cols(S, id.J) * id.Y).norm();
      CHECK(resid <= std::sqrt(double(n - id.rank)) * thresh * (1 + 1e-10) + 1e-12);
    }
}

TEST_CASE("row ID: rank one, zero and identity") {
  Matrix u = random_matrix(9, 1, 20), v = random_matrix(1, 7, 21);
  Matrix S = u * v;
  auto id = row_interpolative_decomposition(S, 1e-10, 1e-14);
  CHECK(id.rank() == 1);
  CHECK((S - id.U * rows(S, id.J)).norm() <= 1e-12 * S.norm());
  CHECK(id.U(id.J[0], 0) == 1.0);

  CHECK(row_interpolative_decomposition(Matrix::Zero(3, 5), 1e-8, 1e-8).rank() == 0);

  Matrix I = Matrix::Identity(3, 3);
  auto e = row_interpolative_decomposition(I, 1e-8, 1e-8);
  CHECK(e.rank() == 3);
  CHECK((e.U * rows(I, e.J) - I).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("norm downdating survives strongly graded columns") {
  // columns differ by many orders of magnitude, forcing recomputation
  const Index m = 40, n = 30;
  Matrix S = random_matrix(m, n, 30);
  for (Index j = 0; j < n; j++) S.col(j) *= std::pow(10.0, -0.5 * double(j));
  auto id = interpolative_decomposition(S, 1e-13, 0.0);
  CHECK(id.rank >= 25);
  CHECK((S - cols(S, id.J) * id.Y).norm() <= 1e-10 * S.norm());
}

TEST_CASE("svd oracle") {
  Matrix D = Eigen::Vector3d(3, 2, 1).asDiagonal();
  auto s = svd(D);
  CHECK(s.sigma(0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s.sigma(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.sigma(2) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(svd(Matrix::Zero(4, 3)).sigma.isZero(0.0));

  Matrix A = random_matrix(16, 8, 40);
  auto r = svd(A);
  CHECK((r.U * r.sigma.asDiagonal() * r.V.transpose() - A).norm() <= 1e-12 * A.norm());
  for (Index i = 1; i < r.sigma.size(); i++) CHECK(r.sigma(i) <= r.sigma(i - 1));
  CHECK_THROWS_AS(svd(Matrix::Zero(20, 20), 10), std::invalid_argument);
}
