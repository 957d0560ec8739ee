#include "hss/hss_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hss {

  namespace {

    void check_cap(const HssMatrix& H, Index cap, const char* what) {
      if (H.n() > cap)
        throw std::invalid_argument
          (std::string(what) + ": n=" + std::to_string(H.n())
           + " exceeds cap " + std::to_string(cap));
    }

  } // namespace

  Matrix matmat(const HssMatrix& H, const Matrix& X) {
    const auto& tree = H.tree();
    if (X.rows() != H.n())
      throw std::invalid_argument
        ("matvec: input has " + std::to_string(X.rows())
         + " rows, expected " + std::to_string(H.n()));
    const Index k = X.cols();
    const auto order = tree.topological_order();
    const int root = tree.root();
    std::vector<Matrix> z(tree.node_count()), f(tree.node_count());

    for (int id : order) {
      if (id == root) break;
      const auto& cn = tree.node(id);
      const auto& nd = H.node(id);
      if (cn.is_leaf())
        z[id] = nd.V.transpose() * X.middleRows(cn.lo, cn.size());
      else {
        Matrix s(z[cn.left].rows() + z[cn.right].rows(), k);
        s << z[cn.left], z[cn.right];
        z[id] = nd.V.transpose() * s;
      }
    }

    Matrix Y(H.n(), k);
    f[root] = Matrix(0, k);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int id = *it;
      const auto& cn = tree.node(id);
      const auto& nd = H.node(id);
      if (cn.is_leaf()) {
        auto out = Y.middleRows(cn.lo, cn.size());
        out.noalias() = nd.D * X.middleRows(cn.lo, cn.size());
        if (id != root) out.noalias() += nd.U * f[id];
        continue;
      }
      const Index ra = H.node(cn.left).row_rank();
      const Index rb = H.node(cn.right).row_rank();
      f[cn.left] = nd.B12 * z[cn.right];
      f[cn.right] = nd.B21 * z[cn.left];
      if (id != root) {
        Matrix g = nd.U * f[id];
        f[cn.left] += g.topRows(ra);
        f[cn.right] += g.bottomRows(rb);
      }
      f[id].resize(0, 0);
    }
    return Y;
  }

  Vector matvec(const HssMatrix& H, const Vector& x) {
    return matmat(H, x);
  }

  Matrix reconstruct_dense(const HssMatrix& H, Index cap) {
    check_cap(H, cap, "reconstruct_dense");
    const auto& tree = H.tree();
    const int root = tree.root();
    std::vector<Matrix> ubig(tree.node_count()), vbig(tree.node_count());
    Matrix A = Matrix::Zero(H.n(), H.n());

    for (int id : tree.topological_order()) {
      const auto& cn = tree.node(id);
      const auto& nd = H.node(id);
      if (cn.is_leaf()) {
        A.block(cn.lo, cn.lo, cn.size(), cn.size()) = nd.D;
        if (id != root) {
          ubig[id] = nd.U;
          vbig[id] = nd.V;
        }
        continue;
      }
      const auto& a = tree.node(cn.left);
      const auto& b = tree.node(cn.right);
      A.block(a.lo, b.lo, a.size(), b.size()) =
        ubig[cn.left] * nd.B12 * vbig[cn.right].transpose();
      A.block(b.lo, a.lo, b.size(), a.size()) =
        ubig[cn.right] * nd.B21 * vbig[cn.left].transpose();
      if (id != root) {
        const Index ra = H.node(cn.left).row_rank();
        const Index ca = H.node(cn.left).col_rank();
        ubig[id].resize(cn.size(), nd.row_rank());
        ubig[id].topRows(a.size()) = ubig[cn.left] * nd.U.topRows(ra);
        ubig[id].bottomRows(b.size()) =
          ubig[cn.right] * nd.U.bottomRows(nd.U.rows() - ra);
        vbig[id].resize(cn.size(), nd.col_rank());
        vbig[id].topRows(a.size()) = vbig[cn.left] * nd.V.topRows(ca);
        vbig[id].bottomRows(b.size()) =
          vbig[cn.right] * nd.V.bottomRows(nd.V.rows() - ca);
      }
      ubig[cn.left].resize(0, 0);
      ubig[cn.right].resize(0, 0);
      vbig[cn.left].resize(0, 0);
      vbig[cn.right].resize(0, 0);
    }
    return A;
  }

  HssStats stats(const HssMatrix& H) {
    HssStats s;
    s.final_d = H.stats().final_d;
    s.adaptation_rounds = H.stats().adaptation_rounds;
    const auto& tree = H.tree();
    double scalars = 0;
    for (std::size_t id = 0; id < tree.node_count(); id++) {
      const auto& nd = H.nodes()[id];
      scalars += static_cast<double>(nd.D.size() + nd.B12.size() + nd.B21.size());
      if (static_cast<int>(id) == tree.root()) continue;
      const Index rr = nd.row_rank(), rc = nd.col_rank();
      scalars += static_cast<double>((nd.U.rows() - rr) * rr);
      scalars += static_cast<double>((nd.V.rows() - rc) * rc);
      s.max_rank = std::max({s.max_rank, rr, rc});
    }
    const double n = static_cast<double>(H.n());
    s.memory_fraction = n > 0 ? 100.0 * scalars / (n * n) : 0.0;
    return s;
  }

  double relative_error(const MatrixAccessor& A, const HssMatrix& H, Index cap) {
    check_cap(H, cap, "relative_error");
    if (A.rows() != H.n() || A.cols() != H.n())
      throw std::invalid_argument("relative_error: dimension mismatch");
    const Index n = H.n(), w = 256;
    double diff2 = 0, norm2 = 0;
    for (Index c0 = 0; c0 < n; c0 += w) {
      const Index nc = std::min(w, n - c0);
      Matrix E = Matrix::Zero(n, nc);
      for (Index j = 0; j < nc; j++) E(c0 + j, j) = 1.0;
      Matrix Ab = A.block(0, n, c0, nc);
      norm2 += Ab.squaredNorm();
      diff2 += (Ab - matmat(H, E)).squaredNorm();
    }
    if (norm2 == 0) return diff2 == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff2 / norm2);
  }

} // namespace hss
