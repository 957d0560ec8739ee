#include "hss/compress.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "hss/dense_kernels.hpp"

namespace hss {

  std::string to_string(NodeState s) {
    switch (s) {
    case NodeState::Untouched: return "UNTOUCHED";
    case NodeState::PartiallyCompressed: return "PARTIALLY_COMPRESSED";
    case NodeState::Compressed: return "COMPRESSED";
    }
    return "?";
  }

  void CompressOptions::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (d0 < 1) fail("d0 must be >= 1");
    if (dd < 1) fail("dd must be >= 1");
    if (d_max != 0 && d_max < d0 + dd)
      fail("d_max must be >= d0 + dd (d_max=" + std::to_string(d_max)
           + ", d0+dd=" + std::to_string(d0 + dd) + ")");
    if (!(eps_rel >= 0) || !(eps_abs >= 0)) fail("tolerances must be >= 0");
    if (leaf_size < 1) fail("leaf_size must be >= 1");
    if (sketch == SketchKind::Sjlt) {
      auto a = sketch_params.alpha;
      if (a < 1) fail("SJLT alpha must be >= 1");
      if (a > dd) fail("SJLT alpha must not exceed the sketch increment dd");
      if (sketch_params.construction == SjltConstruction::Block
          && (d0 % a != 0 || dd % a != 0))
        fail("SJLT block construction requires alpha | d for every sketch block"
             " (alpha=" + std::to_string(a) + ", d0=" + std::to_string(d0)
             + ", dd=" + std::to_string(dd) + ")");
    }
  }

  bool frobenius_stop(const Matrix& S_hat, const Matrix& S_tilde,
                      double eps_rel, double eps_abs) {
    double nh = S_hat.norm();
    if (nh < eps_abs) return true;
    double nt = S_tilde.norm();
    if (nt == 0) return true;
    return nh < eps_rel * nt;
  }

  bool rank_deficiency_stop(const Vector& omega_hat_diag, double omega_first,
                            double eps_rel, double eps_abs) {
    if (omega_hat_diag.size() == 0)
      throw std::invalid_argument("rank_deficiency_stop: empty diagonal");
    double mn = omega_hat_diag.cwiseAbs().minCoeff();
    return mn < eps_abs || mn < eps_rel * std::abs(omega_first);
  }

  namespace {

    using Clock = std::chrono::steady_clock;

    double ms_since(Clock::time_point t0) {
      return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }

    std::vector<Index> pick(const std::vector<Index>& v, const std::vector<Index>& J) {
      std::vector<Index> out;
      out.reserve(J.size());
      for (auto j : J) out.push_back(v[j]);
      return out;
    }

    Matrix pick_rows(const Matrix& M, const std::vector<Index>& J, Index c0, Index c1) {
      Matrix out(static_cast<Index>(J.size()), c1 - c0);
      for (std::size_t i = 0; i < J.size(); i++)
        out.row(i) = M.block(J[i], c0, 1, c1 - c0);
      return out;
    }

    void grow_cols(Matrix& M, Index rows, Index cols) {
      if (M.rows() != rows) {
        M.resize(rows, cols);
        return;
      }
      M.conservativeResize(rows, cols);
    }

    class Compressor {
    public:
      Compressor(const MatrixAccessor& A, const ClusterTree& tree,
                 const CompressOptions& opts)
        : A_(A), tree_(tree), opts_(opts), H_(tree) {}

      HssMatrix run() {
        auto t_total = Clock::now();
        const Index n = tree_.n();
        d_ = opts_.d0;
        const Index dd = opts_.dd;
        const Index d_max = opts_.d_max > 0 ? opts_.d_max : n;

        {
          auto t = Clock::now();
          op_.emplace(SketchOperator::create(opts_.sketch, n, d_ + dd,
                                             derive_seed(opts_.seed, 0),
                                             opts_.sketch_params));
          Sr_ = apply_right(A_, *op_);
          Sc_ = apply_right_transposed(A_, *op_);
          H_.stats().sketch_ms += ms_since(t);
          H_.stats().sketch_columns += d_ + dd;
        }

        const auto order = tree_.topological_order();
        auto& nodes = H_.nodes();
        const int root = tree_.root();
        while (nodes[root].state != NodeState::Compressed && d_ < d_max) {
          for (int id : order) {
            if (!visit(id, d_max)) break;
          }
        }
        H_.stats().final_d = d_;
        H_.stats().total_ms = ms_since(t_total);
        if (nodes[root].state != NodeState::Compressed)
          throw MaxSketchReached(blocking_, d_, H_.stats());
        return std::move(H_);
      }

    private:
      // Returns false when the sweep has to stop (root done or sketch
      // extended).
      bool visit(int id, Index d_max) {
        auto& nd = H_.nodes()[id];
        const auto& cn = tree_.node(id);
        const Index dd = opts_.dd;
        const bool first = nd.state == NodeState::Untouched;
        if (first) {
          if (cn.is_leaf())
            nd.D = A_.block(cn.lo, cn.size(), cn.lo, cn.size());
          else {
            auto& c1 = H_.nodes()[cn.left];
            auto& c2 = H_.nodes()[cn.right];
            nd.B12 = A_.extract(c1.I_row, c2.I_col);
            nd.B21 = A_.extract(c2.I_row, c1.I_col);
          }
        }
        if (id == tree_.root()) {
          nd.state = NodeState::Compressed;
          return false;
        }
        const Index c0 = first ? 0 : d_, c1 = d_ + dd;
        update_samples(id, c0, c1);

        bool newly = false;
        if (nd.state != NodeState::Compressed) {
          const double er = opts_.eps_rel / cn.level;
          const double ea = opts_.eps_abs / cn.level;
          bool ok_r = gate(nd.Sr, nd.Qr, nd.omega_first_row, first, er, ea);
          bool ok_c = gate(nd.Sc, nd.Qc, nd.omega_first_col, first, er, ea);
          if (ok_r && ok_c) {
            compress_node(id, er, ea);
            newly = true;
          } else {
            nd.state = NodeState::PartiallyCompressed;
            blocking_ = id;
            if (d_ + dd >= d_max) {
              d_ += dd;
              return false;
            }
            extend();
            return false;
          }
        }
        reduce_randoms(id, newly ? 0 : c0, c1);
        return true;
      }

      // Stopping criteria for one side. Augments Q when the Frobenius
      // test fails.
      bool gate(const Matrix& S, Matrix& Q, double& omega_first, bool first,
                double er, double ea) {
        const Index m = S.rows(), dd = opts_.dd;
        if (first) {
          auto f = qr(S.leftCols(d_));
          Q = std::move(f.Q);
          omega_first = f.Omega.size() ? std::abs(f.Omega(0, 0)) : 0.0;
        }
        const Index room = m - Q.cols();
        if (room <= 0) return true;
        Matrix St = S.middleCols(d_, dd);
        Matrix Sh = project_out(Q, St);
        if (frobenius_stop(Sh, St, er, ea)) return true;
        auto g = qr(Sh);
        const Index k = std::min(room, g.Q.cols());
        Index q0 = Q.cols();
        Q.conservativeResize(m, q0 + k);
        Q.rightCols(k) = g.Q.leftCols(k);
        Vector diag = g.Omega.diagonal().head(k);
        return rank_deficiency_stop(diag, omega_first, er, ea);
      }

      void compress_node(int id, double er, double ea) {
        auto& nd = H_.nodes()[id];
        const auto& cn = tree_.node(id);
        auto row = row_interpolative_decomposition(nd.Sr, er, ea);
        auto col = row_interpolative_decomposition(nd.Sc, er, ea);
        nd.U = std::move(row.U);
        nd.J_row = std::move(row.J);
        nd.V = std::move(col.U);
        nd.J_col = std::move(col.J);
        if (cn.is_leaf()) {
          nd.I_row = nd.J_row;
          nd.I_col = nd.J_col;
          for (auto& i : nd.I_row) i += cn.lo;
          for (auto& i : nd.I_col) i += cn.lo;
        } else {
          auto& c1 = H_.nodes()[cn.left];
          auto& c2 = H_.nodes()[cn.right];
          std::vector<Index> cr(c1.I_row), cc(c1.I_col);
          cr.insert(cr.end(), c2.I_row.begin(), c2.I_row.end());
          cc.insert(cc.end(), c2.I_col.begin(), c2.I_col.end());
          nd.I_row = pick(cr, nd.J_row);
          nd.I_col = pick(cc, nd.J_col);
        }
        nd.state = NodeState::Compressed;
      }

      void update_samples(int id, Index c0, Index c1) {
        auto& nd = H_.nodes()[id];
        const auto& cn = tree_.node(id);
        const Index w = c1 - c0;
        if (cn.is_leaf()) {
          const Index m = cn.size();
          Matrix Rt = dense_rows(*op_, cn.lo, m, c0, c1);
          grow_cols(nd.Sr, m, c1);
          grow_cols(nd.Sc, m, c1);
          nd.Sr.middleCols(c0, w) = Sr_.block(cn.lo, c0, m, w) - nd.D * Rt;
          nd.Sc.middleCols(c0, w) = Sc_.block(cn.lo, c0, m, w) - nd.D.transpose() * Rt;
          return;
        }
        const auto& a = H_.nodes()[cn.left];
        const auto& b = H_.nodes()[cn.right];
        const Index ra = a.row_rank(), rb = b.row_rank();
        const Index ca = a.col_rank(), cb = b.col_rank();
        grow_cols(nd.Sr, ra + rb, c1);
        grow_cols(nd.Sc, ca + cb, c1);
        nd.Sr.block(0, c0, ra, w) = pick_rows(a.Sr, a.J_row, c0, c1)
          - nd.B12 * b.Rc.middleCols(c0, w);
        nd.Sr.block(ra, c0, rb, w) = pick_rows(b.Sr, b.J_row, c0, c1)
          - nd.B21 * a.Rc.middleCols(c0, w);
        nd.Sc.block(0, c0, ca, w) = pick_rows(a.Sc, a.J_col, c0, c1)
          - nd.B21.transpose() * b.Rr.middleCols(c0, w);
        nd.Sc.block(ca, c0, cb, w) = pick_rows(b.Sc, b.J_col, c0, c1)
          - nd.B12.transpose() * a.Rr.middleCols(c0, w);
      }

      void reduce_randoms(int id, Index c0, Index c1) {
        auto& nd = H_.nodes()[id];
        const auto& cn = tree_.node(id);
        const Index w = c1 - c0;
        grow_cols(nd.Rr, nd.row_rank(), c1);
        grow_cols(nd.Rc, nd.col_rank(), c1);
        if (cn.is_leaf()) {
          Matrix Rt = dense_rows(*op_, cn.lo, cn.size(), c0, c1);
          nd.Rr.middleCols(c0, w).noalias() = nd.U.transpose() * Rt;
          nd.Rc.middleCols(c0, w).noalias() = nd.V.transpose() * Rt;
          return;
        }
        const auto& a = H_.nodes()[cn.left];
        const auto& b = H_.nodes()[cn.right];
        Matrix stack_r(a.row_rank() + b.row_rank(), w);
        stack_r << a.Rr.middleCols(c0, w), b.Rr.middleCols(c0, w);
        Matrix stack_c(a.col_rank() + b.col_rank(), w);
        stack_c << a.Rc.middleCols(c0, w), b.Rc.middleCols(c0, w);
        nd.Rr.middleCols(c0, w).noalias() = nd.U.transpose() * stack_r;
        nd.Rc.middleCols(c0, w).noalias() = nd.V.transpose() * stack_c;
      }

      void extend() {
        const Index dd = opts_.dd;
        auto t = Clock::now();
        op_->append(dd, derive_seed(opts_.seed, ++H_.stats().adaptation_rounds));
        const Index c0 = d_ + dd, c1 = d_ + 2 * dd;
        Matrix sr = apply_right(A_, *op_, c0, c1);
        Matrix sc = apply_right_transposed(A_, *op_, c0, c1);
        Sr_.conservativeResize(Eigen::NoChange, c1);
        Sc_.conservativeResize(Eigen::NoChange, c1);
        Sr_.rightCols(dd) = sr;
        Sc_.rightCols(dd) = sc;
        H_.stats().sketch_ms += ms_since(t);
        H_.stats().sketch_columns += dd;
        d_ += dd;
      }

      const MatrixAccessor& A_;
      const ClusterTree& tree_;
      const CompressOptions& opts_;
      HssMatrix H_;
      std::optional<SketchOperator> op_;
      Matrix Sr_, Sc_;
      Index d_ = 0;
      int blocking_ = -1;
    };

  } // namespace

  HssMatrix compress(const MatrixAccessor& A, const ClusterTree& tree,
                     const CompressOptions& opts) {
    opts.validate();
    if (A.rows() != A.cols())
      throw std::invalid_argument("compress: matrix must be square");
    if (A.rows() != tree.n())
      throw std::invalid_argument
        ("compress: matrix dimension " + std::to_string(A.rows())
         + " does not match cluster tree size " + std::to_string(tree.n()));
    return Compressor(A, tree, opts).run();
  }

} // namespace hss
