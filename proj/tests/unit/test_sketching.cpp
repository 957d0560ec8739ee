#include <doctest.h>

#include <cmath>
#include <set>

#include <boost/random/normal_distribution.hpp>

#include "hss/sketching.hpp"

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

  // Sylvester construction, unnormalized.
  Matrix hadamard(Index n) {
    Matrix H(1, 1);
    H(0, 0) = 1;
    while (H.rows() < n) {
      Index k = H.rows();
      Matrix G(2 * k, 2 * k);
      G << H, H, H, -H;
      H = G;
    }
    return H;
  }

  // R^T built directly from the stored draws, without dense_rows.
  Matrix oracle_rt(const SketchOperator& op) {
    Matrix Rt = Matrix::Zero(op.n(), op.d());
    for (const auto& blk : op.blocks()) {
      auto dst = Rt.middleCols(blk.offset, blk.cols);
      if (auto* g = std::get_if<GaussianBlock>(&blk.data))
        dst = g->rt;
      else if (auto* s = std::get_if<SjltStorage>(&blk.data)) {
        for (Index i = 0; i < s->n(); i++) {
          for (Index p = s->plus.row_ptr[i]; p < s->plus.row_ptr[i + 1]; p++)
            dst(i, s->plus.col_idx[p]) += s->scale;
          for (Index p = s->minus.row_ptr[i]; p < s->minus.row_ptr[i + 1]; p++)
            dst(i, s->minus.col_idx[p]) -= s->scale;
        }
      } else {
        auto& h = std::get<SrhtBlock>(blk.data);
        Matrix H = hadamard(h.padded);
        const double sc = 1.0 / std::sqrt(double(blk.cols));
        for (Index j = 0; j < blk.cols; j++)
          for (Index i = 0; i < op.n(); i++)
            dst(i, j) = h.signs[i] * H(h.samples[j], i) * sc;
      }
    }
    return Rt;
  }

  Matrix pattern_from_ccs(const BinaryPattern& p) {
    Matrix M = Matrix::Zero(p.rows, p.cols);
    for (Index j = 0; j < p.cols; j++)
      for (Index k = p.col_ptr[j]; k < p.col_ptr[j + 1]; k++) M(p.row_idx[k], j) += 1;
    return M;
  }

  Matrix pattern_from_crs(const BinaryPattern& p) {
    Matrix M = Matrix::Zero(p.rows, p.cols);
    for (Index i = 0; i < p.rows; i++)
      for (Index k = p.row_ptr[i]; k < p.row_ptr[i + 1]; k++) M(i, p.col_idx[k]) += 1;
    return M;
  }

  const Matrix& example_signs() {
    static const Matrix s = [] {
      Matrix m(4, 3);
      m << 1, 0, -1,
           0, -1, -1,
           1, -1, 0,
           1, 0, 1;
      return m;
    }();
    return s;
  }

} // namespace

TEST_CASE("SJLT storage reproduces the displayed 4x3 example") {
  auto s = SjltStorage::from_signs(example_signs(), 2);
  CHECK(s.scale == doctest::Approx(1.0 / std::sqrt(2.0)));
  Matrix bp(4, 3), bm(4, 3);
  bp << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1;
  bm << 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0;
  CHECK(pattern_from_crs(s.plus) == bp);
  CHECK(pattern_from_ccs(s.plus) == bp);
  CHECK(pattern_from_crs(s.minus) == bm);
  CHECK(pattern_from_ccs(s.minus) == bm);
  Matrix expected = example_signs() / std::sqrt(2.0);
  CHECK((s.to_dense() - expected).cwiseAbs().maxCoeff() == 0.0);

  auto op = SketchOperator::from_sjlt(s);
  CHECK((dense_rows(op, 0, 4, 0, 3) - expected).cwiseAbs().maxCoeff() == 0.0);
  DenseAccessor I4(Matrix::Identity(4, 4));
  CHECK((apply_right(I4, op) - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((apply_right_transposed(I4, op) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("SJLT draws: alpha nonzeros per row of R^T, disjoint signs, chunk rule") {
  for (auto cons : {SjltConstruction::Block, SjltConstruction::Graph})
    for (Index alpha : {1, 2, 4, 8}) {
      CAPTURE(alpha);
      const Index n = 50, d = 32;
      Rng rng(derive_seed(11, alpha));
      auto s = SjltStorage::draw(n, d, alpha, cons, rng);
      Matrix P = pattern_from_crs(s.plus), M = pattern_from_crs(s.minus);
      CHECK(P == pattern_from_ccs(s.plus));
      CHECK(M == pattern_from_ccs(s.minus));
      CHECK(P.cwiseProduct(M).sum() == 0.0);
      CHECK(P.maxCoeff() <= 1.0);
      CHECK(M.maxCoeff() <= 1.0);
      Matrix nz = P + M;
      for (Index i = 0; i < n; i++) {
        CHECK(nz.row(i).sum() == double(alpha));
        // each column of R has unit norm
        CHECK(s.to_dense().row(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
        if (cons == SjltConstruction::Block) {
          const Index chunk = d / alpha;
          for (Index c = 0; c < alpha; c++)
            CHECK(nz.row(i).segment(c * chunk, chunk).sum() == 1.0);
        }
      }
    }
}

TEST_CASE("operator construction rejects invalid parameters") {
  SketchParams p{2, SjltConstruction::Block};
  CHECK_THROWS_WITH_AS(SketchOperator::create(SketchKind::Sjlt, 4, 3, 1, p),
                       doctest::Contains("alpha | d"), std::invalid_argument);
  CHECK_THROWS_AS(SketchOperator::create(SketchKind::Gaussian, 4, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(SketchOperator::create(SketchKind::Gaussian, 4, 0, 1), std::invalid_argument);
  SketchParams big{5, SjltConstruction::Graph};
  CHECK_THROWS_AS(SketchOperator::create(SketchKind::Sjlt, 10, 4, 1, big), std::invalid_argument);
  auto op = SketchOperator::create(SketchKind::Sjlt, 16, 8, 1, p);
  CHECK_THROWS_AS(op.append(3, 2), std::invalid_argument);
  CHECK_NOTHROW(op.append(4, 2));
}

TEST_CASE("specialized kernels equal the dense product") {
  std::uint64_t seed = 100;
  for (auto kind : {SketchKind::Gaussian, SketchKind::Srht, SketchKind::Sjlt})
    for (auto [m, n, d] : {std::tuple{16, 16, 8}, {16, 12, 6}, {7, 33, 12}, {40, 64, 32}}) {
      CAPTURE(to_string(kind));
      CAPTURE(n);
      SketchParams p{kind == SketchKind::Sjlt ? (d == 6 ? 3 : 2) : 4, SjltConstruction::Block};
      auto op = SketchOperator::create(kind, n, d, seed++, p);
      Matrix Rt = oracle_rt(op);
      Matrix A = random_matrix(m, n, seed++);
      DenseAccessor acc(A);
      const double tol = 1e-13 * A.norm();
      CHECK((apply_right(acc, op) - A * Rt).cwiseAbs().maxCoeff() <= tol);
      Matrix B = random_matrix(n, m, seed++);
      DenseAccessor accB(B);
      CHECK((apply_right_transposed(accB, op) - B.transpose() * Rt).cwiseAbs().maxCoeff()
            <= 1e-13 * B.norm());
      CHECK((op.to_dense() - Rt).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("lazy accessor gives the same products as a dense one") {
  Matrix A = random_matrix(300, 290, 5);
  FunctionAccessor lazy(300, 290, [&](Index i, Index j) { return A(i, j); });
  DenseAccessor dense(A);
  for (auto kind : {SketchKind::Gaussian, SketchKind::Srht, SketchKind::Sjlt}) {
    auto op = SketchOperator::create(kind, 290, 24, 9);
    op.append(8, 10);
    CHECK((apply_right(lazy, op) - apply_right(dense, op)).cwiseAbs().maxCoeff()
          <= 1e-13 * A.norm());
    FunctionAccessor lazyT(290, 300, [&](Index i, Index j) { return A(j, i); });
    DenseAccessor denseT(A.transpose());
    CHECK((apply_right_transposed(lazyT, op) - apply_right_transposed(denseT, op))
          .cwiseAbs().maxCoeff() <= 1e-13 * A.norm());
  }
}

TEST_CASE("symmetric input: right and transposed products agree; zero maps to zero") {
  Matrix B = random_matrix(20, 20, 3);
  Matrix S = B + B.transpose();
  DenseAccessor acc(S);
  for (auto kind : {SketchKind::Gaussian, SketchKind::Srht, SketchKind::Sjlt}) {
    auto op = SketchOperator::create(kind, 20, 8, 4);
    CHECK((apply_right(acc, op) - apply_right_transposed(acc, op)).cwiseAbs().maxCoeff()
          <= 1e-13 * S.norm());
    DenseAccessor zero(Matrix::Zero(20, 20));
    CHECK(apply_right_transposed(zero, op).isZero(0.0));
  }
}

TEST_CASE("column ranges of appended blocks") {
  auto op = SketchOperator::create(SketchKind::Sjlt, 64, 16, 1);
  Matrix before = op.to_dense();
  op.append(8, 2);
  CHECK(op.d() == 24);
  CHECK(op.blocks().size() == 2);
  Matrix after = op.to_dense();
  CHECK((after.leftCols(16) - before).cwiseAbs().maxCoeff() == 0.0);

  Matrix A = random_matrix(10, 64, 8);
  DenseAccessor acc(A);
  Matrix full = apply_right(acc, op);
  CHECK((apply_right(acc, op, 16, 24) - full.rightCols(8)).cwiseAbs().maxCoeff() <= 1e-13 * A.norm());
  CHECK_THROWS_AS(apply_right(acc, op, 4, 24), std::invalid_argument);
  DenseAccessor wrong(Matrix::Zero(10, 63));
  CHECK_THROWS_AS(apply_right(wrong, op), std::invalid_argument);
  CHECK_THROWS_AS(apply_right_transposed(acc, op), std::invalid_argument);
}

TEST_CASE("dense_rows: index sets, empty sets and determinism") {
  for (auto kind : {SketchKind::Gaussian, SketchKind::Srht, SketchKind::Sjlt}) {
    auto op = SketchOperator::create(kind, 40, 16, 77);
    op.append(8, 78);
    Matrix Rt = oracle_rt(op);
    std::vector<Index> I{3, 0, 39, 17};
    Matrix sub = dense_rows(op, I, 4, 20);
    for (std::size_t r = 0; r < I.size(); r++)
      CHECK((sub.row(r) - Rt.block(I[r], 4, 1, 16)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(dense_rows(op, std::vector<Index>{}, 0, 24).rows() == 0);
    auto again = SketchOperator::create(kind, 40, 16, 77);
    again.append(8, 78);
    CHECK((dense_rows(again, I, 0, 24) - dense_rows(op, I, 0, 24)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(dense_rows(op, std::vector<Index>{40}, 0, 4), std::out_of_range);
  }
  auto s = SketchOperator::create(SketchKind::Sjlt, 30, 8, 5, {2, SjltConstruction::Block});
  const double v = 1.0 / std::sqrt(2.0);
  Matrix all = dense_rows(s, 0, 30, 0, 8);
  for (Index i = 0; i < all.size(); i++) {
    double x = all.data()[i];
    CHECK((x == 0.0 || x == v || x == -v));
  }
}

TEST_CASE("fast Walsh-Hadamard transform") {
  std::vector<double> x{1, 1, 1, 1};
  fwht(x);
  for (auto& v : x) v /= 2.0;  // 1/sqrt(4)
  CHECK(x == std::vector<double>{2, 0, 0, 0});
  std::vector<double> bad(3);
  CHECK_THROWS_AS(fwht(bad), std::invalid_argument);
  for (Index n : {1, 2, 8, 64}) {
    Matrix raw(n, n);
    for (Index j = 0; j < n; j++) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      fwht(e);
      for (Index i = 0; i < n; i++) raw(i, j) = e[i];
    }
    CHECK(raw == hadamard(n));
    Matrix H = raw / std::sqrt(double(n));
    CHECK((H.transpose() * H - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(5) == 8);
  CHECK(next_pow2(64) == 64);
}

TEST_CASE("SRHT samples distinct sorted rows of the padded transform") {
  auto op = SketchOperator::create(SketchKind::Srht, 100, 40, 3);
  auto& h = std::get<SrhtBlock>(op.blocks()[0].data);
  CHECK(h.padded == 128);
  std::set<Index> uniq(h.samples.begin(), h.samples.end());
  CHECK(uniq.size() == 40);
  CHECK(std::is_sorted(h.samples.begin(), h.samples.end()));
  for (double s : h.signs) CHECK(std::abs(s) == 1.0);
}

TEST_CASE("unbiased squared norms: mean of |R x|^2 near |x|^2 for every kind") {
  const Index n = 64, d = 16, trials = 10000;
  Matrix x = random_matrix(1, n, 1);
  x /= x.norm();
  DenseAccessor acc(x);
  for (auto kind : {SketchKind::Gaussian, SketchKind::Srht, SketchKind::Sjlt}) {
    CAPTURE(to_string(kind));
    double sum = 0, sum_new = 0;
    for (Index t = 0; t < trials; t++) {
      auto op = SketchOperator::create(kind, n, d, derive_seed(2024, t));
      sum += apply_right(acc, op).squaredNorm();
      op.append(8, derive_seed(4048, t));
      sum_new += apply_right(acc, op, d, d + 8).squaredNorm();
    }
    CHECK(sum / trials >= 0.95);
    CHECK(sum / trials <= 1.05);
    // the appended block alone is a JL operator
    CHECK(sum_new / trials >= 0.95);
    CHECK(sum_new / trials <= 1.05);
  }
}

TEST_CASE("JL dimension bounds") {
  CHECK(jl_dimension_bound(SketchKind::Gaussian, 0.5, 0.01, 1000).d == 424);
  CHECK(jl_dimension_bound(SketchKind::Gaussian, 1.0 - 1e-15, 2.0 / std::exp(1.0), 10).d == 20);
  // 8 log^2(4e8) log(400) = 18804.39...
  CHECK(jl_dimension_bound(SketchKind::Srht, 0.5, 0.01, 1000).d == 18805);
  // 80 log(100) = 368.41..., alpha = ceil(369 / 2)
  auto s = jl_dimension_bound(SketchKind::Sjlt, 0.5, 0.01, 1000);
  CHECK(s.d == 369);
  CHECK(s.alpha == 185);
  CHECK(jl_dimension_bound(SketchKind::Sjlt, 0.5, 0.01, 1000, 40.0).d == 737);
  CHECK_THROWS_AS(jl_dimension_bound(SketchKind::Gaussian, 0.0, 0.01, 10), std::invalid_argument);
  CHECK_THROWS_AS(jl_dimension_bound(SketchKind::Gaussian, 0.5, 1.0, 10), std::invalid_argument);
}

TEST_CASE("names round trip") {
  for (auto k : {SketchKind::Gaussian, SketchKind::Srht, SketchKind::Sjlt})
    CHECK(parse_sketch_kind(to_string(k)) == k);
  for (auto c : {SjltConstruction::Block, SjltConstruction::Graph})
    CHECK(parse_sjlt_construction(to_string(c)) == c);
  CHECK_THROWS_AS(parse_sketch_kind("fft"), std::invalid_argument);
}
