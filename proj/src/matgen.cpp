#include "hss/matgen.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "hss/dense_kernels.hpp"
#include "hss/random.hpp"

namespace hss {

  std::vector<Point3> regular_grid(Index k) {
    if (k < 2) throw std::invalid_argument("regular_grid: k must be >= 2");
    std::vector<Point3> pts;
    pts.reserve(k * k * k);
    const double h = 1.0 / static_cast<double>(k - 1);
    for (Index z = 0; z < k; z++)
      for (Index y = 0; y < k; y++)
        for (Index x = 0; x < k; x++)
          pts.push_back({x * h, y * h, z * h});
    return pts;
  }

  TestMatrix covariance_matrix(Index k, double lambda, Index leaf_size) {
    if (!(lambda > 0)) throw std::invalid_argument("covariance: lambda must be > 0");
    auto pts = regular_grid(k);
    auto pc = build_from_points(pts, leaf_size);
    std::vector<Point3> ordered(pts.size());
    for (std::size_t i = 0; i < pts.size(); i++) ordered[i] = pts[pc.perm[i]];
    const Index n = static_cast<Index>(pts.size());
    auto f = [p = std::move(ordered), lambda](Index i, Index j) {
      double dx = p[i][0] - p[j][0], dy = p[i][1] - p[j][1], dz = p[i][2] - p[j][2];
      return std::exp(-std::sqrt(dx * dx + dy * dy + dz * dz) / lambda);
    };
    return {std::make_shared<FunctionAccessor>(n, n, std::move(f)), std::move(pc.tree),
            std::move(pc.perm)};
  }

  std::unique_ptr<MatrixAccessor> qchem_toeplitz(Index n, double spacing) {
    if (n < 1) throw std::invalid_argument("qchem: n must be >= 1");
    if (!(spacing > 0)) throw std::invalid_argument("qchem: spacing must be > 0");
    const double s2 = spacing * spacing;
    const double diag = std::numbers::pi * std::numbers::pi / (6.0 * s2);
    auto f = [s2, diag](Index i, Index j) {
      if (i == j) return diag;
      const double k = static_cast<double>(i - j);
      const double sign = ((i - j) & 1) ? -1.0 : 1.0;
      return sign / (s2 * k * k);
    };
    return std::make_unique<FunctionAccessor>(n, n, std::move(f));
  }

  Matrix random_orthonormal(Index m, Index r, Rng& rng) {
    if (r > m) throw std::invalid_argument("random_orthonormal: r > m");
    boost::random::normal_distribution<double> N;
    Matrix G(m, r);
    for (Index j = 0; j < r; j++)
      for (Index i = 0; i < m; i++) G(i, j) = N(rng);
    return qr(G).Q;
  }

  Matrix matrix_with_spectrum(const Vector& sigma, Index m, Index n,
                              std::uint64_t seed) {
    const Index k = sigma.size();
    if (k > std::min(m, n))
      throw std::invalid_argument("matrix_with_spectrum: too many singular values");
    Rng rng(seed);
    Matrix U = random_orthonormal(m, k, rng);
    Matrix V = random_orthonormal(n, k, rng);
    return U * sigma.asDiagonal() * V.transpose();
  }

  namespace {

    Matrix random_uniform(Index m, Index n, Rng& rng) {
      boost::random::uniform_real_distribution<double> u(-1.0, 1.0);
      Matrix M(m, n);
      for (Index j = 0; j < n; j++)
        for (Index i = 0; i < m; i++) M(i, j) = u(rng);
      return M;
    }

  } // namespace

  SyntheticHss synthetic_hss(Index n, Index leaf_size, Index r,
                             std::uint64_t seed, bool symmetric) {
    if (leaf_size < 1 || n < leaf_size || n % leaf_size != 0)
      throw std::invalid_argument("synthetic_hss: n must be a positive multiple of leaf_size");
    if (r < 0 || r > leaf_size)
      throw std::invalid_argument("synthetic_hss: need 0 <= r <= leaf_size");
    auto tree = ClusterTree::uniform(n, leaf_size);
    for (int id : tree.leaves())
      if (tree.node(id).size() < r)
        throw std::invalid_argument("synthetic_hss: a leaf is smaller than r");

    Rng rng(seed);
    Matrix A = Matrix::Zero(n, n);
    // big row/column bases per node, built bottom-up
    std::vector<Matrix> ub(tree.node_count()), vb(tree.node_count());
    for (int id : tree.topological_order()) {
      const auto& cn = tree.node(id);
      const bool root = id == tree.root();
      if (cn.is_leaf()) {
        Matrix D = random_uniform(cn.size(), cn.size(), rng);
        if (symmetric) D = (0.5 * (D + D.transpose())).eval();
        A.block(cn.lo, cn.lo, cn.size(), cn.size()) = D;
        if (!root) {
          ub[id] = random_orthonormal(cn.size(), r, rng);
          vb[id] = symmetric ? ub[id] : random_orthonormal(cn.size(), r, rng);
        }
        continue;
      }
      const auto& a = tree.node(cn.left);
      const auto& b = tree.node(cn.right);
      Matrix B12 = random_uniform(r, r, rng);
      Matrix B21 = symmetric ? Matrix(B12.transpose()) : random_uniform(r, r, rng);
      A.block(a.lo, b.lo, a.size(), b.size()) = ub[cn.left] * B12 * vb[cn.right].transpose();
      A.block(b.lo, a.lo, b.size(), a.size()) = ub[cn.right] * B21 * vb[cn.left].transpose();
      if (!root) {
        Matrix Ut = random_orthonormal(2 * r, r, rng);
        Matrix Vt = symmetric ? Ut : random_orthonormal(2 * r, r, rng);
        ub[id].resize(cn.size(), r);
        ub[id] << ub[cn.left] * Ut.topRows(r), ub[cn.right] * Ut.bottomRows(r);
        vb[id].resize(cn.size(), r);
        vb[id] << vb[cn.left] * Vt.topRows(r), vb[cn.right] * Vt.bottomRows(r);
      }
    }
    return {std::move(tree), std::move(A)};
  }

  namespace {

    constexpr char kMagic[4] = {'H', 'S', 'S', 'D'};

    void put_u64(std::ostream& os, std::uint64_t v) {
      unsigned char b[8];
      for (int i = 0; i < 8; i++) b[i] = static_cast<unsigned char>(v >> (8 * i));
      os.write(reinterpret_cast<const char*>(b), 8);
    }

    bool get_u64(std::istream& is, std::uint64_t& v) {
      unsigned char b[8];
      if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
      v = 0;
      for (int i = 0; i < 8; i++) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
      return true;
    }

  } // namespace

  void write_matrix_file(const std::string& path, const Matrix& A) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw MatrixFileError("cannot open " + path + " for writing");
    os.write(kMagic, 4);
    put_u64(os, static_cast<std::uint64_t>(A.rows()));
    put_u64(os, static_cast<std::uint64_t>(A.cols()));
    for (Index j = 0; j < A.cols(); j++)
      for (Index i = 0; i < A.rows(); i++)
        put_u64(os, std::bit_cast<std::uint64_t>(A(i, j)));
    if (!os) throw MatrixFileError("write to " + path + " failed");
  }

  Matrix read_matrix_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MatrixFileError("cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
      throw MatrixFileError(path + ": bad magic, expected \"HSSD\"");
    std::uint64_t rows, cols;
    if (!get_u64(is, rows) || !get_u64(is, cols))
      throw MatrixFileError(path + ": truncated header");
    constexpr std::uint64_t lim = std::uint64_t(1) << 31;
    if (rows > lim || cols > lim || (rows && cols > (lim * lim) / rows))
      throw MatrixFileError(path + ": dimensions " + std::to_string(rows) + "x"
                            + std::to_string(cols) + " overflow");
    Matrix A(static_cast<Index>(rows), static_cast<Index>(cols));
    const std::uint64_t count = rows * cols;
    for (std::uint64_t k = 0; k < count; k++) {
      std::uint64_t v;
      if (!get_u64(is, v))
        throw MatrixFileError(path + ": truncated payload, expected "
                              + std::to_string(count) + " values, got "
                              + std::to_string(k));
      A.data()[k] = std::bit_cast<double>(v);
    }
    if (is.peek() != std::char_traits<char>::eof())
      throw MatrixFileError(path + ": trailing bytes after payload");
    return A;
  }

  std::unique_ptr<MatrixAccessor> from_file(const std::string& path) {
    return std::make_unique<DenseAccessor>(read_matrix_file(path));
  }

  std::string to_string(MatrixKind k) {
    switch (k) {
    case MatrixKind::Covariance: return "covariance";
    case MatrixKind::QChem: return "qchem";
    case MatrixKind::Synthetic: return "synthetic";
    case MatrixKind::File: return "file";
    }
    return "?";
  }

  MatrixKind parse_matrix_kind(const std::string& s) {
    if (s == "covariance") return MatrixKind::Covariance;
    if (s == "qchem") return MatrixKind::QChem;
    if (s == "synthetic") return MatrixKind::Synthetic;
    if (s == "file") return MatrixKind::File;
    throw std::invalid_argument("unknown matrix kind '" + s + "'");
  }

  TestMatrix make_matrix(const MatrixSpec& spec) {
    TestMatrix tm{nullptr, ClusterTree::uniform(1, 1), {}};
    switch (spec.kind) {
    case MatrixKind::Covariance:
      tm = covariance_matrix(spec.k, spec.lambda, spec.leaf_size);
      break;
    case MatrixKind::QChem:
      tm.A = qchem_toeplitz(spec.n, spec.spacing);
      tm.tree = ClusterTree::uniform(spec.n, spec.leaf_size);
      break;
    case MatrixKind::Synthetic: {
      auto s = synthetic_hss(spec.n, spec.leaf_size, spec.rank, spec.seed, spec.symmetric);
      tm.A = std::make_shared<DenseAccessor>(std::move(s.dense));
      tm.tree = std::move(s.tree);
      return tm;
    }
    case MatrixKind::File:
      tm.A = from_file(spec.path);
      if (tm.A->rows() != tm.A->cols())
        throw MatrixFileError(spec.path + ": matrix is not square");
      tm.tree = ClusterTree::uniform(tm.A->rows(), spec.leaf_size);
      return tm;
    }
    if (spec.materialize)
      tm.A = std::make_shared<DenseAccessor>(materialize(*tm.A));
    return tm;
  }

} // namespace hss
