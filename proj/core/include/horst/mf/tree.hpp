#ifndef HORST_MF_TREE_HPP
#define HORST_MF_TREE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "horst/common/grid.hpp"

namespace horst::mf {

/// Axis-aligned cell box, inclusive bounds.
struct CellBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{-1, -1, -1};

  std::int64_t volume() const {
    std::int64_t v = 1;
    for (int a = 0; a < 3; ++a) {
      if (hi[a] < lo[a]) return 0;
      v *= hi[a] - lo[a] + 1;
    }
    return v;
  }
  int longest_axis() const {
    int best = 0;
    for (int a = 1; a < 3; ++a)
      if (hi[a] - lo[a] > hi[best] - lo[best]) best = a;
    return best;
  }
  /// Edge extent (cells minus one) of the longest side.
  int diameter() const {
    int d = 0;
    for (int a = 0; a < 3; ++a) d = std::max(d, hi[a] - lo[a]);
    return d;
  }
};

/// Euclidean gap between two boxes in cell units.
double box_distance(const CellBox& a, const CellBox& b);

/// Nested-dissection elimination tree over a regular grid. Nodes are
/// postordered (children precede parents, the root is last). Each node
/// owns the variables of its box: a full sub-box at the leaves, a
/// one-cell-thick separator plane elsewhere. Variables inside a node are
/// laid out in recursive-bisection order so that any geometric tiling of
/// the node is a set of contiguous index ranges.
struct EliminationTree {
  struct Node {
    int parent = -1;
    std::array<int, 2> child{-1, -1};  // separators split in two
    CellBox box;
    std::vector<std::int64_t> vars;  // grid dofs, recursive-bisection order
    int depth = 0;
  };
  Grid3 grid;
  std::vector<Node> nodes;          // postorder
  std::vector<std::int64_t> perm;   // elimination order -> grid dof
  std::vector<std::int64_t> elimpos;  // grid dof -> elimination order
  std::vector<std::int32_t> owner;    // grid dof -> node id
  std::vector<std::int64_t> first_pos;  // node -> elimpos of first own var

  int root() const { return int(nodes.size()) - 1; }
  bool is_ancestor(int anc, int node) const;
};

EliminationTree build_tree(const Grid3& grid, int leaf_max = 128);

/// Cut a node's variable range into geometric clusters of roughly `target`
/// variables by re-running the recursive bisection. Returned ranges are
/// [begin, end) offsets into the node's variable list plus the cluster box.
struct Cluster {
  int begin = 0, end = 0;
  CellBox box;
};
std::vector<Cluster> geometric_clusters(const CellBox& box, int target);

} // namespace horst::mf

#endif
