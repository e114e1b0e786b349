#ifndef HORST_MF_SYMBOLIC_HPP
#define HORST_MF_SYMBOLIC_HPP

#include <cstdint>
#include <vector>

#include "horst/fd/assemble.hpp"
#include "horst/mf/tree.hpp"

namespace horst::mf {

/// Pattern of one front: the fully-summed variables owned by the node and
/// the coupled ancestor variables (border), both in elimination order.
/// child_map[c][k] gives the row of child c's k-th border variable inside
/// this front's combined [fs | border] index space.
struct FrontSymb {
  std::vector<std::int64_t> fs;
  std::vector<std::int64_t> border;
  std::vector<std::vector<std::int32_t>> child_map;

  int nfs() const { return int(fs.size()); }
  int nb() const { return int(border.size()); }
  int nf() const { return nfs() + nb(); }
};

struct SymbolicFactor {
  std::vector<FrontSymb> fronts;  // same indexing as tree nodes
  std::int64_t fr_entries = 0;    // stored values of a full-rank factor
  std::int64_t max_front = 0;     // largest nf

  std::int64_t fr_bytes(int scalar_bytes) const {
    return fr_entries * scalar_bytes;
  }
};

/// Border propagation up the tree from the matrix pattern. Verifies that
/// every border variable is owned by a strict ancestor (the geometric
/// separators really separate for this pattern).
SymbolicFactor symbolic_analysis(const EliminationTree& t,
                                 const fd::ImpedanceMatrix& A);

} // namespace horst::mf

#endif
