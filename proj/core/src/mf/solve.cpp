#include "horst/mf/solve.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <type_traits>
#include <vector>

#include "horst/common/error.hpp"

namespace horst::mf {

namespace {

/// tmp rows [rb, rb+rm) -= block * tmp rows [kb, kb+mk)
template <class Scalar>
void apply_block(const typename Factorization<Scalar>::Block& b,
                 DenseMat<Scalar>& tmp, int rb, int rm, int kb, int mk,
                 SolveStats* st) {
  const int bw = int(tmp.cols());
  if (b.encoded) {
    if constexpr (std::is_same_v<Scalar, std::complex<float>>) {
      if (b.mp.r == 0) return;
      MatrixXcf x, y;
      b.mp.decode(x, y);
      DenseMat<Scalar> t2 = y * tmp.block(kb, 0, mk, bw);
      tmp.block(rb, 0, rm, bw).noalias() -= x * t2;
      if (st) st->flops += 8ll * b.mp.r * (std::int64_t(mk) + rm) * bw;
    }
    return;
  }
  if (b.lowrank) {
    const int r = int(b.x.cols());
    if (r == 0) return;
    DenseMat<Scalar> t2 = b.y * tmp.block(kb, 0, mk, bw);
    tmp.block(rb, 0, rm, bw).noalias() -= b.x * t2;
    if (st) st->flops += 8ll * r * (std::int64_t(mk) + rm) * bw;
  } else {
    tmp.block(rb, 0, rm, bw).noalias() -= b.d * tmp.block(kb, 0, mk, bw);
    if (st) st->flops += 8ll * rm * mk * bw;
  }
}

int lca(const EliminationTree& t, int a, int b) {
  while (a != b) {
    if (t.nodes[size_t(a)].depth >= t.nodes[size_t(b)].depth)
      a = t.nodes[size_t(a)].parent;
    else
      b = t.nodes[size_t(b)].parent;
  }
  return a;
}

} // namespace

template <class Scalar>
void solve_in_place(const Factorization<Scalar>& f, const EliminationTree& t,
                    Eigen::MatrixXcd& B, const SolveOptions& opt,
                    SolveStats* stats) {
  using Mat = DenseMat<Scalar>;
  const std::int64_t n = t.grid.size();
  if (B.rows() != n) throw ConfigError("solve: right-hand-side rows mismatch");
  if (f.fronts.size() != t.nodes.size())
    throw ConfigError("solve: factor does not match tree");
  const int nrhs = int(B.cols());
  if (nrhs == 0) return;
  const int bs = std::max(1, opt.rhs_block);
  const int nnodes = int(t.nodes.size());

  // owners of the nonzero rows per column, then a locality key: the
  // postorder index of their lowest common ancestor
  const std::size_t un = std::size_t(nrhs);
  std::vector<std::vector<int>> col_nodes(un);
  std::vector<int> key(un, -1);
  for (int j = 0; j < nrhs; ++j) {
    auto& lst = col_nodes[size_t(j)];
    for (std::int64_t i = 0; i < n; ++i)
      if (B(i, j) != 0.0) lst.push_back(int(t.owner[size_t(i)]));
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    if (!lst.empty()) {
      int a = lst[0];
      for (size_t q = 1; q < lst.size(); ++q) a = lca(t, a, lst[q]);
      key[size_t(j)] = a;
    }
  }
  std::vector<int> order(un);
  std::iota(order.begin(), order.end(), 0);
  if (opt.order_columns)
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return key[size_t(a)] < key[size_t(b)]; });

  std::vector<std::uint8_t> marked(std::size_t(nnodes), std::uint8_t(0));
  for (int blk0 = 0; blk0 < nrhs; blk0 += bs) {
    const int bw = std::min(bs, nrhs - blk0);
    Mat Z(n, bw);
    for (int q = 0; q < bw; ++q)
      Z.col(q) = B.col(order[size_t(blk0 + q)]).template cast<Scalar>();

    std::fill(marked.begin(), marked.end(), std::uint8_t(0));
    bool any = false;
    if (opt.prune) {
      for (int q = 0; q < bw; ++q)
        for (int nd : col_nodes[size_t(order[size_t(blk0 + q)])]) {
          any = true;
          while (nd != -1 && !marked[size_t(nd)]) {
            marked[size_t(nd)] = 1;
            nd = t.nodes[size_t(nd)].parent;
          }
        }
    } else {
      std::fill(marked.begin(), marked.end(), std::uint8_t(1));
      any = true;
    }
    if (stats) stats->node_blocks += nnodes;
    if (!any) continue; // all-zero block stays zero

    // forward: marked subtrees only, children before parents
    for (int v = 0; v < nnodes; ++v) {
      if (!marked[size_t(v)]) continue;
      const auto& fr = f.fronts[size_t(v)];
      const int nf = int(fr.rows_global.size());
      Mat tmp(nf, bw);
      for (int i = 0; i < nf; ++i)
        tmp.row(i) = Z.row(fr.rows_global[size_t(i)]);
      for (int k = 0; k < fr.n_fcl; ++k) {
        const int tb = fr.rows[size_t(k)].begin;
        const auto& piv = fr.piv[size_t(k)];
        for (size_t cc = 0; cc < piv.size(); ++cc)
          if (piv[cc] != int(cc))
            tmp.row(tb + int(cc)).swap(tmp.row(tb + piv[cc]));
      }
      const int ncl = int(fr.rows.size());
      for (int k = 0; k < fr.n_fcl; ++k) {
        const int tb = fr.rows[size_t(k)].begin;
        const int mk = fr.rows[size_t(k)].end - tb;
        auto seg = tmp.block(tb, 0, mk, bw);
        fr.diag[size_t(k)].d.template triangularView<Eigen::UnitLower>()
            .solveInPlace(seg);
        if (stats) stats->flops += 4ll * mk * mk * bw;
        for (int i = k + 1; i < ncl; ++i)
          apply_block<Scalar>(fr.below[size_t(k)][size_t(i - k - 1)], tmp,
                              fr.rows[size_t(i)].begin,
                              fr.rows[size_t(i)].end - fr.rows[size_t(i)].begin,
                              tb, mk, stats);
      }
      for (int i = 0; i < nf; ++i)
        Z.row(fr.rows_global[size_t(i)]) = tmp.row(i);
      if (stats) ++stats->forward_visits;
    }

    // backward: every front, parents before children
    for (int v = nnodes - 1; v >= 0; --v) {
      const auto& fr = f.fronts[size_t(v)];
      const int nf = int(fr.rows_global.size());
      const int nfs = fr.n_fcl ? fr.rows[size_t(fr.n_fcl - 1)].end : 0;
      Mat tmp(nf, bw);
      for (int i = 0; i < nf; ++i)
        tmp.row(i) = Z.row(fr.rows_global[size_t(i)]);
      const int ncl = int(fr.rows.size());
      for (int k = fr.n_fcl - 1; k >= 0; --k) {
        const int tb = fr.rows[size_t(k)].begin;
        const int mk = fr.rows[size_t(k)].end - tb;
        for (int j = k + 1; j < ncl; ++j)
          apply_block<Scalar>(fr.right[size_t(k)][size_t(j - k - 1)], tmp, tb,
                              mk, fr.rows[size_t(j)].begin,
                              fr.rows[size_t(j)].end - fr.rows[size_t(j)].begin,
                              stats);
        auto seg = tmp.block(tb, 0, mk, bw);
        fr.diag[size_t(k)].d.template triangularView<Eigen::Upper>()
            .solveInPlace(seg);
        if (stats) stats->flops += 4ll * mk * mk * bw;
      }
      for (int i = 0; i < nfs; ++i)
        Z.row(fr.rows_global[size_t(i)]) = tmp.row(i);
      if (stats) ++stats->backward_visits;
    }

    for (int q = 0; q < bw; ++q)
      B.col(order[size_t(blk0 + q)]) = Z.col(q).template cast<fd::cdouble>();
  }
}

template void solve_in_place(const Factorization<std::complex<float>>&,
                             const EliminationTree&, Eigen::MatrixXcd&,
                             const SolveOptions&, SolveStats*);
template void solve_in_place(const Factorization<std::complex<double>>&,
                             const EliminationTree&, Eigen::MatrixXcd&,
                             const SolveOptions&, SolveStats*);

double scaled_residual(const fd::ImpedanceMatrix& A, const Eigen::MatrixXcd& X,
                       const Eigen::MatrixXcd& B) {
  if (X.rows() != A.n || B.rows() != A.n || X.cols() != B.cols())
    throw ConfigError("scaled residual: shape mismatch");
  const double anorm = A.norm_inf();
  std::vector<fd::cdouble> x(size_t(A.n)), y(size_t(A.n));
  double worst = 0.0;
  for (int j = 0; j < int(X.cols()); ++j) {
    for (std::int64_t i = 0; i < A.n; ++i) x[size_t(i)] = X(i, j);
    A.multiply(x.data(), y.data());
    double rn = 0.0, xn = 0.0, bn = 0.0;
    for (std::int64_t i = 0; i < A.n; ++i) {
      rn = std::max(rn, std::abs(y[size_t(i)] - B(i, j)));
      xn = std::max(xn, std::abs(X(i, j)));
      bn = std::max(bn, std::abs(B(i, j)));
    }
    const double den = anorm * xn + bn;
    if (den > 0.0) worst = std::max(worst, rn / den);
    else if (rn > 0.0) worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

} // namespace horst::mf
