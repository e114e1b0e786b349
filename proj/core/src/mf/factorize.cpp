#include "horst/mf/factorize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <type_traits>

#include "horst/common/error.hpp"

namespace horst::mf {

namespace {

bool admissible(const CellBox& a, const CellBox& b, double eta) {
  const double dm =
      std::max(1.0, double(std::min(a.diameter(), b.diameter())));
  return box_distance(a, b) >= eta * dm;
}

/// Border clusters: contiguous elimination-order runs, cut at owner
/// boundaries so each cluster sits inside one separator, then chunked to
/// roughly `target` variables. Boxes are bounding boxes of the members.
std::vector<Cluster> border_clusters(const EliminationTree& t,
                                     const std::vector<std::int64_t>& border,
                                     int nfs, int target) {
  std::vector<Cluster> out;
  const int nb = int(border.size());
  if (nb == 0) return out;
  auto flush = [&](int lo, int hi) {
    const int len = hi - lo;
    const int pieces = (len + target - 1) / target;
    for (int p = 0; p < pieces; ++p) {
      const int b = lo + int(std::int64_t(len) * p / pieces);
      const int e = lo + int(std::int64_t(len) * (p + 1) / pieces);
      if (b == e) continue;
      Cluster c;
      c.begin = nfs + b;
      c.end = nfs + e;
      c.box.lo = {std::numeric_limits<int>::max(),
                  std::numeric_limits<int>::max(),
                  std::numeric_limits<int>::max()};
      c.box.hi = {std::numeric_limits<int>::min(),
                  std::numeric_limits<int>::min(),
                  std::numeric_limits<int>::min()};
      for (int k = b; k < e; ++k) {
        const auto cell = t.grid.cell(border[size_t(k)]);
        for (int a = 0; a < 3; ++a) {
          c.box.lo[a] = std::min(c.box.lo[a], cell[a]);
          c.box.hi[a] = std::max(c.box.hi[a], cell[a]);
        }
      }
      out.push_back(c);
    }
  };
  int run0 = 0;
  for (int k = 1; k <= nb; ++k)
    if (k == nb || t.owner[size_t(border[size_t(k)])] !=
                       t.owner[size_t(border[size_t(run0)])]) {
      flush(run0, k);
      run0 = k;
    }
  return out;
}

} // namespace

template <class Scalar>
Factorization<Scalar> factorize(const fd::ImpedanceMatrix& A,
                                const EliminationTree& t,
                                const SymbolicFactor& symb,
                                const FactorOptions& opt) {
  using Mat = DenseMat<Scalar>;
  constexpr bool is_single = std::is_same_v<Scalar, std::complex<float>>;
  const auto clock0 = std::chrono::steady_clock::now();

  if (opt.kind == FactorKind::kMpBlr && !is_single)
    throw ConfigError("regraded factorization requires single precision");
  if (A.n != t.grid.size())
    throw ConfigError("factorize: matrix and tree sizes differ");
  if (symb.fronts.size() != t.nodes.size())
    throw ConfigError("factorize: stale symbolic analysis");

  Factorization<Scalar> F;
  F.grid = t.grid;
  F.kind = opt.kind;
  F.stats.fr_entries = symb.fr_entries;
  F.stats.front_count = std::int64_t(t.nodes.size());
  F.fronts.resize(t.nodes.size());

  const double eta = opt.eta_eff();
  const bool compressing = opt.kind != FactorKind::kFullRank;
  auto& st = F.stats;

  std::vector<std::int32_t> posmap(size_t(A.n), -1);
  std::vector<Mat> cb(t.nodes.size());
  std::int64_t live_cb = 0, stored = 0;
  auto note_peak = [&](std::int64_t front_bytes) {
    const std::int64_t cur = stored + live_cb + front_bytes;
    if (cur > st.peak_bytes) st.peak_bytes = cur;
  };

  // W(rows i>k of cluster, cols of cluster j) -= Bl * Br
  auto apply_update = [&](Mat& W, const typename Factorization<Scalar>::Block& bl,
                          const typename Factorization<Scalar>::Block& br,
                          int rb, int rm, int jb, int jm, int mk) {
    auto T = W.block(rb, jb, rm, jm);
    if (!bl.lowrank && !br.lowrank) {
      T.noalias() -= bl.d * br.d;
      st.flops += 8ll * rm * mk * jm;
    } else if (bl.lowrank && !br.lowrank) {
      const int r = int(bl.x.cols());
      if (r == 0) return;
      Mat tmp = bl.y * br.d;
      T.noalias() -= bl.x * tmp;
      st.flops += 8ll * r * (std::int64_t(mk) * jm + std::int64_t(rm) * jm);
    } else if (!bl.lowrank && br.lowrank) {
      const int r = int(br.x.cols());
      if (r == 0) return;
      Mat tmp = bl.d * br.x;
      T.noalias() -= tmp * br.y;
      st.flops += 8ll * r * (std::int64_t(rm) * mk + std::int64_t(rm) * jm);
    } else {
      const int r1 = int(bl.x.cols()), r2 = int(br.x.cols());
      if (r1 == 0 || r2 == 0) return;
      Mat mid = bl.y * br.x;
      st.flops += 8ll * r1 * mk * r2;
      const std::int64_t ca = std::int64_t(r1) * r2 * jm + std::int64_t(rm) * r1 * jm;
      const std::int64_t cbr = std::int64_t(rm) * r1 * r2 + std::int64_t(rm) * r2 * jm;
      if (ca <= cbr) {
        Mat t2 = mid * br.y;
        T.noalias() -= bl.x * t2;
      } else {
        Mat t2 = bl.x * mid;
        T.noalias() -= t2 * br.y;
      }
      st.flops += 8ll * std::min(ca, cbr);
    }
  };

  for (size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& nd = t.nodes[v];
    const FrontSymb& sy = symb.fronts[v];
    auto& fr = F.fronts[v];
    const int nfs = sy.nfs(), nb = sy.nb(), nf = sy.nf();

    fr.rows_global = sy.fs;
    fr.rows_global.insert(fr.rows_global.end(), sy.border.begin(),
                          sy.border.end());
    const int ftarget =
        opt.tile_target > 0 ? opt.tile_target : FactorOptions::auto_target(nfs);
    const int btarget =
        opt.tile_target > 0 ? opt.tile_target : FactorOptions::auto_target(nb);
    fr.rows = geometric_clusters(nd.box, ftarget);
    fr.n_fcl = int(fr.rows.size());
    const auto bcl = border_clusters(t, sy.border, nfs, btarget);
    fr.rows.insert(fr.rows.end(), bcl.begin(), bcl.end());
    const int ncl = int(fr.rows.size());

    Mat W = Mat::Zero(nf, nf);
    note_peak(std::int64_t(sizeof(Scalar)) * nf * nf);

    for (int i = 0; i < nf; ++i) posmap[size_t(fr.rows_global[size_t(i)])] = i;
    for (int jl = 0; jl < nfs; ++jl) {
      const std::int64_t d = fr.rows_global[size_t(jl)];
      for (std::int64_t p = A.colptr[size_t(d)]; p < A.colptr[size_t(d) + 1];
           ++p) {
        const std::int32_t pr = posmap[size_t(A.rowind[size_t(p)])];
        if (pr < 0) continue;
        const Scalar val = Scalar(A.val[size_t(p)]);
        W(pr, jl) += val;
        if (pr >= nfs) W(jl, pr) += val; // symmetric image, border col
      }
    }
    for (size_t ci = 0; ci < sy.child_map.size(); ++ci) {
      const int c = nd.child[ci];
      Mat& C = cb[size_t(c)];
      const auto& map = sy.child_map[ci];
      const int ncb = int(map.size());
      for (int j = 0; j < ncb; ++j)
        for (int i = 0; i < ncb; ++i)
          W(map[size_t(i)], map[size_t(j)]) += C(i, j);
      st.flops += 2ll * ncb * ncb;
      live_cb -= std::int64_t(sizeof(Scalar)) * C.size();
      C = Mat();
    }

    fr.piv.resize(size_t(fr.n_fcl));
    fr.diag.resize(size_t(fr.n_fcl));
    fr.below.resize(size_t(fr.n_fcl));
    fr.right.resize(size_t(fr.n_fcl));

    for (int k = 0; k < fr.n_fcl; ++k) {
      const int tb = fr.rows[size_t(k)].begin, te = fr.rows[size_t(k)].end;
      const int mk = te - tb;
      auto& piv = fr.piv[size_t(k)];
      piv.resize(size_t(mk));

      for (int cc = 0; cc < mk; ++cc) {
        const int c = tb + cc;
        double best = -1.0;
        int pb = c;
        for (int r = c; r < te; ++r) {
          const double av = std::abs(W(r, c));
          if (av > best) {
            best = av;
            pb = r;
          }
        }
        if (!(best > 0.0))
          throw NumericError("factorize: singular diagonal tile");
        const int p =
            (std::abs(W(c, c)) >= opt.pivot_threshold * best) ? c : pb;
        piv[size_t(cc)] = p - tb;
        if (p != c) {
          W.row(c).segment(tb, nf - tb).swap(W.row(p).segment(tb, nf - tb));
          for (int kp = 0; kp < k; ++kp) {
            auto& blk = fr.below[size_t(kp)][size_t(k - kp - 1)];
            if (blk.lowrank)
              blk.x.row(c - tb).swap(blk.x.row(p - tb));
            else
              blk.d.row(c - tb).swap(blk.d.row(p - tb));
          }
        }
        const Scalar pivval = W(c, c);
        const int nrem = te - c - 1;
        if (nrem > 0) {
          W.col(c).segment(c + 1, nrem) /= pivval;
          W.block(c + 1, c + 1, nrem, nrem).noalias() -=
              W.col(c).segment(c + 1, nrem) * W.row(c).segment(c + 1, nrem);
          st.flops += 8ll * nrem * nrem + 2ll * nrem;
        }
      }

      if (te < nf) {
        auto R = W.block(tb, te, mk, nf - te);
        W.block(tb, tb, mk, mk)
            .template triangularView<Eigen::UnitLower>()
            .solveInPlace(R);
        auto B = W.block(te, tb, nf - te, mk);
        W.block(tb, tb, mk, mk)
            .template triangularView<Eigen::Upper>()
            .template solveInPlace<Eigen::OnTheRight>(B);
        st.flops += 8ll * mk * mk * (nf - te);
      }

      fr.diag[size_t(k)].d = W.block(tb, tb, mk, mk);
      fr.below[size_t(k)].resize(size_t(ncl - k - 1));
      fr.right[size_t(k)].resize(size_t(ncl - k - 1));
      for (int i = k + 1; i < ncl; ++i) {
        const int rb = fr.rows[size_t(i)].begin;
        const int rm = fr.rows[size_t(i)].end - rb;
        const bool adm =
            compressing &&
            std::min(rm, mk) >= opt.min_compress_dim &&
            admissible(fr.rows[size_t(i)].box, fr.rows[size_t(k)].box, eta);
        for (int side = 0; side < 2; ++side) {
          typename Factorization<Scalar>::Block bb;
          Mat panel = side == 0 ? Mat(W.block(rb, tb, rm, mk))
                                : Mat(W.block(tb, rb, mk, rm));
          if (adm) {
            auto lr = compress_block<Scalar>(panel, opt.eps);
            st.flops_compress += lr.flops;
            st.flops += lr.flops;
            if (!lr.kept_full) {
              bb.lowrank = true;
              bb.x = std::move(lr.x);
              bb.y = std::move(lr.y);
              bb.sigma = std::move(lr.sigma);
            }
          }
          if (!bb.lowrank) {
            bb.d = std::move(panel);
            ++st.dense_blocks;
          } else {
            ++st.lr_blocks;
          }
          auto& slot = side == 0 ? fr.below[size_t(k)][size_t(i - k - 1)]
                                 : fr.right[size_t(k)][size_t(i - k - 1)];
          slot = std::move(bb);
        }
      }

      for (int j = k + 1; j < ncl; ++j) {
        const int jb = fr.rows[size_t(j)].begin;
        const int jm = fr.rows[size_t(j)].end - jb;
        for (int i = k + 1; i < ncl; ++i) {
          const int rb = fr.rows[size_t(i)].begin;
          const int rm = fr.rows[size_t(i)].end - rb;
          apply_update(W, fr.below[size_t(k)][size_t(i - k - 1)],
                       fr.right[size_t(k)][size_t(j - k - 1)], rb, rm, jb, jm,
                       mk);
        }
      }
    }

    if (nb > 0) {
      cb[v] = W.block(nfs, nfs, nb, nb);
      live_cb += std::int64_t(sizeof(Scalar)) * cb[v].size();
      note_peak(std::int64_t(sizeof(Scalar)) * nf * nf);
    }
    W = Mat();
    for (int i = 0; i < nf; ++i) posmap[size_t(fr.rows_global[size_t(i)])] = -1;

    if constexpr (is_single) {
      if (opt.kind == FactorKind::kMpBlr) {
        const double emp = opt.eps_mp_eff();
        auto regrade = [&](typename Factorization<Scalar>::Block& b) {
          if (!b.lowrank || b.encoded) return;
          b.mp = MpPanel::encode(b.x, b.y, b.sigma, emp);
          for (int g = 0; g < 3; ++g)
            st.mp_bytes[size_t(g)] += b.mp.payload_bytes[size_t(g)];
          b.x = Mat();
          b.y = Mat();
          b.sigma.clear();
          b.sigma.shrink_to_fit();
          b.encoded = true;
        };
        for (auto& list : fr.below)
          for (auto& b : list) regrade(b);
        for (auto& list : fr.right)
          for (auto& b : list) regrade(b);
      }
    }

    std::int64_t fbytes = 0;
    for (int k = 0; k < fr.n_fcl; ++k) {
      fbytes += fr.diag[size_t(k)].bytes() + 4ll * std::int64_t(fr.piv[size_t(k)].size());
      for (const auto& b : fr.below[size_t(k)]) fbytes += b.bytes();
      for (const auto& b : fr.right[size_t(k)]) fbytes += b.bytes();
    }
    stored += fbytes;
    note_peak(0);
  }

  st.factor_bytes = stored;
  st.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0)
          .count();
  return F;
}

template Factorization<std::complex<float>>
factorize(const fd::ImpedanceMatrix&, const EliminationTree&,
          const SymbolicFactor&, const FactorOptions&);
template Factorization<std::complex<double>>
factorize(const fd::ImpedanceMatrix&, const EliminationTree&,
          const SymbolicFactor&, const FactorOptions&);

} // namespace horst::mf
