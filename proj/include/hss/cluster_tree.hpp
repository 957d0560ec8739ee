#ifndef HSS_CLUSTER_TREE_HPP
#define HSS_CLUSTER_TREE_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hss {

  using Index = std::ptrdiff_t;

  /// A node of the binary cluster tree. Owns the half-open index range
  /// [lo, hi) of the (reordered) matrix.
  struct ClusterNode {
    Index lo = 0;
    Index hi = 0;
    int left = -1;
    int right = -1;
    int parent = -1;
    int level = 0;

    Index size() const { return hi - lo; }
    bool is_leaf() const { return left < 0; }
  };

  /// Binary partition tree of [0, n). Immutable after construction.
  class ClusterTree {
  public:
    /// Recursive halving (left child gets ceil(len/2)) until a range holds
    /// at most leaf_size indices.
    static ClusterTree uniform(Index n, Index leaf_size);

    Index n() const { return n_; }
    Index leaf_size() const { return leaf_size_; }
    int root() const { return 0; }
    std::size_t node_count() const { return nodes_.size(); }
    const ClusterNode& node(int id) const { return nodes_[id]; }
    const std::vector<ClusterNode>& nodes() const { return nodes_; }
    int depth() const;

    /// Bottom-up level order: every node of level l+1 precedes every node
    /// of level l; left to right within a level.
    std::vector<int> topological_order() const;

    /// Leaves in left-to-right order.
    std::vector<int> leaves() const;

  private:
    friend struct ClusterTreeBuilder;
    ClusterTree(Index n, Index leaf_size) : n_(n), leaf_size_(leaf_size) {}

    Index n_ = 0;
    Index leaf_size_ = 1;
    std::vector<ClusterNode> nodes_;
  };

  using Point3 = std::array<double, 3>;

  struct PointClustering {
    ClusterTree tree;
    // perm[new_index] = original point index
    std::vector<Index> perm;
  };

  /// Recursive coordinate bisection: split at the median along the axis
  /// of largest extent (lowest axis on ties); equal coordinates keep the
  /// lower original index on the left.
  PointClustering build_from_points(std::span<const Point3> points,
                                    Index leaf_size);

} // namespace hss

#endif
