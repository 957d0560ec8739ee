#include "hss/cluster_tree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hss {

  struct ClusterTreeBuilder {
    static ClusterTree make(Index n, Index leaf_size) {
      return ClusterTree(n, leaf_size);
    }
    static std::vector<ClusterNode>& nodes(ClusterTree& t) { return t.nodes_; }
  };

  namespace {

    // Nodes are stored in preorder; root at 0.
    int add_uniform(std::vector<ClusterNode>& nodes, Index lo, Index hi,
                    Index leaf_size, int level, int parent) {
      int id = static_cast<int>(nodes.size());
      nodes.push_back({lo, hi, -1, -1, parent, level});
      Index len = hi - lo;
      if (len > leaf_size) {
        Index mid = lo + (len + 1) / 2;
        int l = add_uniform(nodes, lo, mid, leaf_size, level + 1, id);
        int r = add_uniform(nodes, mid, hi, leaf_size, level + 1, id);
        nodes[id].left = l;
        nodes[id].right = r;
      }
      return id;
    }

    int add_bisect(std::vector<ClusterNode>& nodes, std::span<const Point3> pts,
                   std::vector<Index>& perm, Index lo, Index hi,
                   Index leaf_size, int level, int parent) {
      int id = static_cast<int>(nodes.size());
      nodes.push_back({lo, hi, -1, -1, parent, level});
      Index len = hi - lo;
      if (len <= leaf_size) return id;

      std::array<double, 3> mn, mx;
      mn.fill(std::numeric_limits<double>::infinity());
      mx.fill(-std::numeric_limits<double>::infinity());
      for (Index i = lo; i < hi; i++)
        for (int a = 0; a < 3; a++) {
          mn[a] = std::min(mn[a], pts[perm[i]][a]);
          mx[a] = std::max(mx[a], pts[perm[i]][a]);
        }
      int axis = 0;
      for (int a = 1; a < 3; a++)
        if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;

      std::sort(perm.begin() + lo, perm.begin() + hi,
                [&](Index x, Index y) {
                  double cx = pts[x][axis], cy = pts[y][axis];
                  return cx < cy || (cx == cy && x < y);
                });
      Index mid = lo + (len + 1) / 2;
      int l = add_bisect(nodes, pts, perm, lo, mid, leaf_size, level + 1, id);
      int r = add_bisect(nodes, pts, perm, mid, hi, leaf_size, level + 1, id);
      nodes[id].left = l;
      nodes[id].right = r;
      return id;
    }

  } // namespace

  ClusterTree ClusterTree::uniform(Index n, Index leaf_size) {
    if (n < 1 || leaf_size < 1)
      throw std::invalid_argument("ClusterTree::uniform: n and leaf_size must be >= 1");
    ClusterTree t(n, leaf_size);
    add_uniform(t.nodes_, 0, n, leaf_size, 0, -1);
    return t;
  }

  int ClusterTree::depth() const {
    int d = 0;
    for (auto& nd : nodes_) d = std::max(d, nd.level);
    return d;
  }

  std::vector<int> ClusterTree::topological_order() const {
    std::vector<int> order(nodes_.size());
    for (std::size_t i = 0; i < order.size(); i++) order[i] = static_cast<int>(i);
    // preorder storage already orders each level left to right
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return nodes_[a].level > nodes_[b].level;
    });
    return order;
  }

  std::vector<int> ClusterTree::leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_.size(); i++)
      if (nodes_[i].is_leaf()) out.push_back(static_cast<int>(i));
    return out;
  }

  PointClustering build_from_points(std::span<const Point3> points,
                                    Index leaf_size) {
    if (points.empty())
      throw std::invalid_argument("build_from_points: empty point set");
    if (leaf_size < 1)
      throw std::invalid_argument("build_from_points: leaf_size must be >= 1");
    Index n = static_cast<Index>(points.size());
    std::vector<Index> perm(n);
    for (Index i = 0; i < n; i++) perm[i] = i;
    auto tree = ClusterTreeBuilder::make(n, leaf_size);
    add_bisect(ClusterTreeBuilder::nodes(tree), points, perm, 0, n,
               leaf_size, 0, -1);
    return {std::move(tree), std::move(perm)};
  }

} // namespace hss
