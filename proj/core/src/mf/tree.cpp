#include "horst/mf/tree.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "horst/common/error.hpp"

namespace horst::mf {

double box_distance(const CellBox& a, const CellBox& b) {
  double d2 = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    const int gap = std::max({0, a.lo[ax] - b.hi[ax], b.lo[ax] - a.hi[ax]});
    d2 += double(gap) * gap;
  }
  return std::sqrt(d2);
}

namespace {

void emit_box_vars(const Grid3& g, const CellBox& b,
                   std::vector<std::int64_t>& out) {
  if (b.volume() <= 0) return;
  if (b.volume() == 1) {
    out.push_back(g.index(b.lo[0], b.lo[1], b.lo[2]));
    return;
  }
  const int a = b.longest_axis();
  const int m = (b.lo[a] + b.hi[a]) / 2;
  CellBox left = b, right = b;
  left.hi[a] = m;
  right.lo[a] = m + 1;
  emit_box_vars(g, left, out);
  emit_box_vars(g, right, out);
}

} // namespace

std::vector<Cluster> geometric_clusters(const CellBox& box, int target) {
  if (target < 1) throw ConfigError("cluster target must be >= 1");
  std::vector<Cluster> out;
  int cursor = 0;
  std::function<void(const CellBox&)> rec = [&](const CellBox& b) {
    const std::int64_t vol = b.volume();
    if (vol <= 0) return;
    if (vol <= target || b.diameter() == 0) {
      out.push_back({cursor, cursor + int(vol), b});
      cursor += int(vol);
      return;
    }
    const int a = b.longest_axis();
    const int m = (b.lo[a] + b.hi[a]) / 2;
    CellBox left = b, right = b;
    left.hi[a] = m;
    right.lo[a] = m + 1;
    rec(left);
    rec(right);
  };
  rec(box);
  return out;
}

bool EliminationTree::is_ancestor(int anc, int node) const {
  int p = nodes[node].parent;
  while (p != -1) {
    if (p == anc) return true;
    p = nodes[p].parent;
  }
  return false;
}

EliminationTree build_tree(const Grid3& grid, int leaf_max) {
  if (leaf_max < 1) throw ConfigError("leaf size must be >= 1");
  if (grid.size() <= 0) throw ConfigError("empty grid");
  EliminationTree t;
  t.grid = grid;

  std::function<int(const CellBox&, int)> rec = [&](const CellBox& b,
                                                    int depth) -> int {
    EliminationTree::Node nd;
    nd.depth = depth;
    if (b.volume() <= leaf_max || b.diameter() < 2) {
      nd.box = b;
      emit_box_vars(grid, b, nd.vars);
      t.nodes.push_back(std::move(nd));
      return int(t.nodes.size()) - 1;
    }
    const int a = b.longest_axis();
    const int m = (b.lo[a] + b.hi[a]) / 2;
    CellBox left = b, right = b, plane = b;
    left.hi[a] = m - 1;
    right.lo[a] = m + 1;
    plane.lo[a] = plane.hi[a] = m;
    const int cl = rec(left, depth + 1);
    const int cr = rec(right, depth + 1);
    nd.box = plane;
    emit_box_vars(grid, plane, nd.vars);
    nd.child = {cl, cr};
    t.nodes.push_back(std::move(nd));
    const int id = int(t.nodes.size()) - 1;
    t.nodes[cl].parent = id;
    t.nodes[cr].parent = id;
    return id;
  };
  CellBox all;
  all.lo = {0, 0, 0};
  all.hi = {grid.dims[0] - 1, grid.dims[1] - 1, grid.dims[2] - 1};
  rec(all, 0);

  const std::int64_t n = grid.size();
  t.perm.reserve(size_t(n));
  t.elimpos.assign(size_t(n), -1);
  t.owner.assign(size_t(n), -1);
  t.first_pos.resize(t.nodes.size());
  for (size_t v = 0; v < t.nodes.size(); ++v) {
    t.first_pos[v] = std::int64_t(t.perm.size());
    for (std::int64_t dof : t.nodes[v].vars) {
      if (t.elimpos[size_t(dof)] != -1)
        throw NumericError("tree: dof assigned twice");
      t.elimpos[size_t(dof)] = std::int64_t(t.perm.size());
      t.owner[size_t(dof)] = std::int32_t(v);
      t.perm.push_back(dof);
    }
  }
  if (std::int64_t(t.perm.size()) != n)
    throw NumericError("tree: dof count mismatch");
  return t;
}

} // namespace horst::mf
