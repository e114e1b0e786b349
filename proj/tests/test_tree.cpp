#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "horst/common/error.hpp"
#include "horst/fd/assemble.hpp"
#include "horst/fd/pml.hpp"
#include "horst/fd/stencil.hpp"
#include "horst/mf/symbolic.hpp"
#include "horst/mf/tree.hpp"
#include "horst/model/vti_model.hpp"

using namespace horst;
using namespace horst::mf;
using horst::model::VtiModel;

namespace {

Grid3 make_grid(int nx, int ny, int nz) {
  Grid3 g;
  g.dims = {nx, ny, nz};
  g.spacing = {10.0, 10.0, 10.0};
  return g;
}

VtiModel homog(int n, double h, double v) {
  VtiModel m;
  m.grid.dims = {n, n, n};
  m.grid.spacing = {h, h, h};
  const size_t sz = size_t(m.grid.size());
  m.v0.assign(sz, v);
  m.epsilon.assign(sz, 0.1);
  m.delta.assign(sz, 0.05);
  m.rho.assign(sz, 1000.0);
  m.q.assign(sz, std::numeric_limits<double>::infinity());
  m.water_depth.assign(size_t(n) * n, 0);
  return m;
}

fd::PmlProfile zero_pml(const Grid3& g) {
  fd::PmlProfile p;
  for (int a = 0; a < 3; ++a) p.gamma[a].assign(size_t(g.dims[a]), 0.0);
  p.free_surface = false;
  return p;
}

fd::WeightField uniform_weights(const Grid3& g, const fd::StencilWeights& w) {
  fd::WeightField wf;
  wf.grid = g;
  wf.w.assign(size_t(g.size()), w);
  return wf;
}

} // namespace

TEST_CASE("box distance") {
  CellBox a{{0, 0, 0}, {1, 1, 1}};
  CellBox b{{1, 0, 0}, {2, 1, 1}};
  CHECK(box_distance(a, b) == 0.0); // overlapping/touching
  b = {{3, 0, 0}, {4, 1, 1}};
  CHECK(box_distance(a, b) == doctest::Approx(2.0));
  b = {{3, 3, 0}, {4, 4, 1}};
  CHECK(box_distance(a, b) == doctest::Approx(std::sqrt(8.0)));
  CHECK(box_distance(b, a) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("geometric clusters tile the bisection order") {
  const Grid3 g = make_grid(7, 5, 3);
  // leaf_max above the volume: one node holding the whole box
  const EliminationTree t = build_tree(g, 1000);
  REQUIRE(t.nodes.size() == 1);
  const auto& nd = t.nodes[0];
  REQUIRE(std::int64_t(nd.vars.size()) == g.size());

  const int target = 8;
  const auto cl = geometric_clusters(nd.box, target);
  REQUIRE(!cl.empty());
  int cursor = 0;
  for (const auto& c : cl) {
    CHECK(c.begin == cursor); // contiguous, in order
    CHECK(c.end - c.begin == c.box.volume());
    CHECK(c.box.volume() <= target);
    // the cluster range of the node variable list is exactly the box
    std::set<std::array<int, 3>> want, got;
    for (int x = c.box.lo[0]; x <= c.box.hi[0]; ++x)
      for (int y = c.box.lo[1]; y <= c.box.hi[1]; ++y)
        for (int z = c.box.lo[2]; z <= c.box.hi[2]; ++z)
          want.insert({x, y, z});
    for (int k = c.begin; k < c.end; ++k)
      got.insert(g.cell(nd.vars[size_t(k)]));
    CHECK(want == got);
    cursor = c.end;
  }
  CHECK(cursor == int(g.size()));
}

TEST_CASE("tree structure and ordering invariants") {
  const Grid3 g = make_grid(12, 10, 9);
  const EliminationTree t = build_tree(g, 64);
  const std::int64_t n = g.size();

  REQUIRE(std::int64_t(t.perm.size()) == n);
  std::vector<std::int64_t> sorted = t.perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::int64_t i = 0; i < n; ++i) REQUIRE(sorted[size_t(i)] == i);
  for (std::int64_t i = 0; i < n; ++i) {
    REQUIRE(t.elimpos[size_t(t.perm[size_t(i)])] == i);
    REQUIRE(t.owner[size_t(i)] >= 0);
  }

  REQUIRE(t.nodes.size() > 1);
  CHECK(t.nodes[size_t(t.root())].parent == -1);
  std::int64_t vol_sum = 0;
  for (size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& nd = t.nodes[v];
    CHECK(std::int64_t(nd.vars.size()) == nd.box.volume());
    vol_sum += nd.box.volume();
    for (size_t k = 0; k < nd.vars.size(); ++k)
      CHECK(t.elimpos[size_t(nd.vars[k])] == t.first_pos[v] + std::int64_t(k));
    for (size_t k = 0; k < nd.vars.size(); ++k)
      CHECK(t.owner[size_t(nd.vars[k])] == std::int32_t(v));
    if (int(v) != t.root()) CHECK(nd.parent > int(v)); // postorder
    const bool internal = nd.child[0] >= 0;
    CHECK((nd.child[0] >= 0) == (nd.child[1] >= 0));
    if (internal) {
      CHECK(nd.child[0] < int(v));
      CHECK(nd.child[1] < int(v));
      // separator: one-cell-thick plane splitting the children
      int thin = 0;
      for (int a = 0; a < 3; ++a)
        if (nd.box.lo[a] == nd.box.hi[a]) ++thin;
      CHECK(thin >= 1);
      const auto& bl = t.nodes[size_t(nd.child[0])].box;
      const auto& br = t.nodes[size_t(nd.child[1])].box;
      CHECK(box_distance(bl, br) >= 2.0); // children never adjacent
    } else {
      CHECK((nd.box.volume() <= 64 || nd.box.diameter() < 2));
    }
  }
  CHECK(vol_sum == n);

  CHECK(t.is_ancestor(t.root(), 0));
  CHECK(!t.is_ancestor(0, t.root()));
}

TEST_CASE("symbolic analysis on an assembled operator") {
  const int n = 12;
  const double h = 10.0, v = 1500.0;
  const VtiModel m = homog(n, h, v);
  const double omega = 2.0 * M_PI * v / (8.0 * h);
  const fd::ImpedanceMatrix A = fd::assemble_operator(
      m, {omega, 0.0}, zero_pml(m.grid),
      uniform_weights(m.grid, fd::StencilWeights::classical7()), false, 10.0);

  const EliminationTree t = build_tree(m.grid, 32);
  const SymbolicFactor s = symbolic_analysis(t, A);
  REQUIRE(s.fronts.size() == t.nodes.size());

  // the root front has no border; the root separator is a full plane
  CHECK(s.fronts[size_t(t.root())].border.empty());
  CHECK(s.fronts[size_t(t.root())].nfs() == n * n);
  CHECK(s.max_front >= n * n);

  std::int64_t entries = 0;
  for (size_t vtx = 0; vtx < s.fronts.size(); ++vtx) {
    const auto& fr = s.fronts[vtx];
    const auto& nd = t.nodes[vtx];
    REQUIRE(fr.fs == nd.vars);
    // border sorted by elimination position, all strictly later
    const std::int64_t last = t.first_pos[vtx] + fr.nfs() - 1;
    for (size_t k = 0; k < fr.border.size(); ++k) {
      CHECK(t.elimpos[size_t(fr.border[k])] > last);
      if (k)
        CHECK(t.elimpos[size_t(fr.border[k])] >
              t.elimpos[size_t(fr.border[k - 1])]);
    }
    entries += std::int64_t(fr.nfs()) * fr.nfs() + 2ll * fr.nfs() * fr.nb();

    // child maps land each child border variable on the right row
    const int nc = (nd.child[0] >= 0) ? 2 : 0;
    REQUIRE(int(fr.child_map.size()) == nc);
    for (int ci = 0; ci < nc; ++ci) {
      const auto& cb = s.fronts[size_t(nd.child[ci])].border;
      const auto& map = fr.child_map[size_t(ci)];
      REQUIRE(map.size() == cb.size());
      for (size_t k = 0; k < cb.size(); ++k) {
        REQUIRE(map[k] >= 0);
        REQUIRE(map[k] < fr.nf());
        if (map[k] < fr.nfs())
          CHECK(fr.fs[size_t(map[k])] == cb[k]);
        else
          CHECK(fr.border[size_t(map[k] - fr.nfs())] == cb[k]);
      }
    }
  }
  CHECK(entries == s.fr_entries);

  // front patterns cover the matrix: any entry below a column's own range
  // appears in the owning front's border
  std::vector<std::set<std::int64_t>> border_sets(s.fronts.size());
  for (size_t vtx = 0; vtx < s.fronts.size(); ++vtx)
    border_sets[vtx].insert(s.fronts[vtx].border.begin(),
                            s.fronts[vtx].border.end());
  for (std::int64_t c = 0; c < A.n; ++c) {
    const int ow = t.owner[size_t(c)];
    const std::int64_t last =
        t.first_pos[size_t(ow)] + std::int64_t(t.nodes[size_t(ow)].vars.size()) - 1;
    for (std::int64_t p = A.colptr[size_t(c)]; p < A.colptr[size_t(c) + 1]; ++p) {
      const std::int64_t r = A.rowind[size_t(p)];
      if (t.elimpos[size_t(r)] > last) REQUIRE(border_sets[size_t(ow)].count(r));
    }
  }
}

TEST_CASE("symbolic rejects size mismatch") {
  const Grid3 g = make_grid(6, 6, 6);
  const EliminationTree t = build_tree(g, 16);
  const VtiModel m = homog(5, 10.0, 1500.0);
  const fd::ImpedanceMatrix A = fd::assemble_operator(
      m, {2.0 * M_PI * 18.0, 0.0}, zero_pml(m.grid),
      uniform_weights(m.grid, fd::StencilWeights::classical7()), false, 10.0);
  CHECK_THROWS_AS(symbolic_analysis(t, A), ConfigError);
}
