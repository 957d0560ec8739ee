#ifndef HSS_COMPRESS_HPP
#define HSS_COMPRESS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hss/cluster_tree.hpp"
#include "hss/matrix_accessor.hpp"
#include "hss/sketching.hpp"

namespace hss {

  enum class NodeState { Untouched, PartiallyCompressed, Compressed };

  std::string to_string(NodeState s);

  /// Per-node state of the adaptive construction.
  ///
  /// Row side: U (m x r_row) is the row ID of the row Hankel sample, J_row
  /// the selected local rows and I_row the matching global indices. The
  /// column side mirrors it with V, J_col, I_col. For an internal node m
  /// is the sum of the children's ranks on that side.
  struct HssNode {
    NodeState state = NodeState::Untouched;

    Matrix D;              // leaf: A(I, I)
    Matrix B12, B21;       // internal: A(I_row(c1), I_col(c2)), A(I_row(c2), I_col(c1))

    Matrix U, V;
    std::vector<Index> J_row, J_col;
    std::vector<Index> I_row, I_col;

    Matrix Sr, Sc;         // local samples, grow in columns
    Matrix Rr, Rc;         // reduced random blocks U^T R^T(I,:), V^T R^T(I,:)
    Matrix Qr, Qc;         // orthonormal bases of processed sample columns
    double omega_first_row = 0;
    double omega_first_col = 0;

    Index row_rank() const { return static_cast<Index>(J_row.size()); }
    Index col_rank() const { return static_cast<Index>(J_col.size()); }
  };

  struct CompressOptions {
    Index d0 = 128;
    Index dd = 64;
    Index d_max = 0;          // 0: use n
    double eps_rel = 1e-2;
    double eps_abs = 1e-8;
    Index leaf_size = 256;    // used when the caller builds the tree
    SketchKind sketch = SketchKind::Sjlt;
    SketchParams sketch_params{};
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument with a readable message.
    void validate() const;
  };

  struct CompressStats {
    Index final_d = 0;            // sketch columns excluding the last dd
    Index adaptation_rounds = 0;
    Index sketch_columns = 0;     // total columns of A R^T ever computed
    double sketch_ms = 0;
    double total_ms = 0;
  };

  class HssMatrix {
  public:
    HssMatrix(ClusterTree tree) : tree_(std::move(tree)), nodes_(tree_.node_count()) {}

    Index n() const { return tree_.n(); }
    const ClusterTree& tree() const { return tree_; }
    const std::vector<HssNode>& nodes() const { return nodes_; }
    std::vector<HssNode>& nodes() { return nodes_; }
    const HssNode& node(int id) const { return nodes_[id]; }
    const CompressStats& stats() const { return stats_; }
    CompressStats& stats() { return stats_; }

  private:
    ClusterTree tree_;
    std::vector<HssNode> nodes_;
    CompressStats stats_;
  };

  /// Raised when the sketch reaches d_max before the root is compressed.
  class MaxSketchReached : public std::runtime_error {
  public:
    MaxSketchReached(int node, Index d, CompressStats stats)
      : std::runtime_error("sketch size reached d_max=" + std::to_string(d)
                           + " before node " + std::to_string(node)
                           + " could be compressed"),
        node_(node), d_(d), stats_(stats) {}
    int blocking_node() const { return node_; }
    Index d() const { return d_; }
    const CompressStats& stats() const { return stats_; }

  private:
    int node_;
    Index d_;
    CompressStats stats_;
  };

  /// True iff ||S_hat||_F < eps_abs or ||S_hat||_F < eps_rel ||S_tilde||_F.
  /// ||S_tilde||_F = 0 counts as satisfied.
  bool frobenius_stop(const Matrix& S_hat, const Matrix& S_tilde,
                      double eps_rel, double eps_abs);

  /// True iff min |Omega_hat_ii| < eps_abs or < eps_rel |omega_first|.
  bool rank_deficiency_stop(const Vector& omega_hat_diag, double omega_first,
                            double eps_rel, double eps_abs);

  /// Adaptive partially matrix-free HSS construction. A must be square with
  /// the tree's dimension; the tree ranges refer to A's ordering.
  HssMatrix compress(const MatrixAccessor& A, const ClusterTree& tree,
                     const CompressOptions& opts);

} // namespace hss

#endif
