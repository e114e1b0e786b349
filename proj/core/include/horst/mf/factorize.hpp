#ifndef HORST_MF_FACTORIZE_HPP
#define HORST_MF_FACTORIZE_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "horst/fd/assemble.hpp"
#include "horst/mf/compress.hpp"
#include "horst/mf/mp_format.hpp"
#include "horst/mf/symbolic.hpp"
#include "horst/mf/tree.hpp"

namespace horst::mf {

enum class FactorKind { kFullRank, kBlr, kMpBlr };

struct FactorOptions {
  FactorKind kind = FactorKind::kFullRank;
  double eps = 1e-5;     // low-rank truncation, relative Frobenius
  double eps_mp = 0.0;   // regrading tolerance; 0 means reuse eps
  int tile_target = 0;   // 0: clamp(set/4, 32, 256) per variable set
  double eta = 0.0;      // admissibility distance factor; 0: by kind
  double pivot_threshold = 0.01;
  int min_compress_dim = 16;

  double eta_eff() const {
    if (eta > 0.0) return eta;
    return kind == FactorKind::kMpBlr ? 0.5 : 1.0;
  }
  double eps_mp_eff() const { return eps_mp > 0.0 ? eps_mp : eps; }
  static int auto_target(int set) {
    const int t = set / 4;
    return t < 32 ? 32 : (t > 256 ? 256 : t);
  }
};

struct FactorStats {
  std::int64_t flops = 0;
  std::int64_t flops_compress = 0;
  std::int64_t factor_bytes = 0;
  std::int64_t peak_bytes = 0;
  std::int64_t fr_entries = 0;  // symbolic full-rank entry count
  std::int64_t dense_blocks = 0, lr_blocks = 0;
  std::array<std::int64_t, 3> mp_bytes{0, 0, 0};  // f32/f24/f16 payloads
  std::int64_t front_count = 0;
  double seconds = 0.0;
};

/// Multifrontal LU of the complex-symmetric operator in nested-dissection
/// order. Fronts are tiled by geometric clusters; panels go through
/// factor, solve, compress, update with threshold pivoting confined to
/// the diagonal tile (row swaps are applied retroactively to stored
/// panels, so the stored factor is the exact LU of the row-permuted
/// front). Off-diagonal tiles may be held low-rank, and low-rank pairs
/// may be regraded to narrower storage once their front is complete.
template <class Scalar>
struct Factorization {
  using Mat = DenseMat<Scalar>;

  struct Block {
    Mat d;       // dense payload; LU-packed on the diagonal
    Mat x, y;    // low-rank payload, d unused
    MpPanel mp;  // regraded payload, x/y unused
    std::vector<float> sigma;
    bool lowrank = false;
    bool encoded = false;

    std::int64_t bytes() const {
      if (encoded) return mp.bytes();
      const std::int64_t s = sizeof(Scalar);
      if (lowrank)
        return s * (x.size() + y.size()) + 4ll * std::int64_t(sigma.size());
      return s * d.size();
    }
  };

  struct Front {
    std::vector<Cluster> rows;  // f clusters then border clusters
    int n_fcl = 0;
    std::vector<std::int64_t> rows_global;  // dofs, [fs | border]
    std::vector<std::vector<int>> piv;      // per f cluster, LAPACK-style
    std::vector<Block> diag;                // per f cluster
    std::vector<std::vector<Block>> below;  // [k][i-k-1]: block (row i, col k)
    std::vector<std::vector<Block>> right;  // [k][j-k-1]: block (row k, col j)
  };

  Grid3 grid;
  FactorKind kind = FactorKind::kFullRank;
  std::vector<Front> fronts;  // tree postorder
  FactorStats stats;
};

template <class Scalar>
Factorization<Scalar> factorize(const fd::ImpedanceMatrix& A,
                                const EliminationTree& t,
                                const SymbolicFactor& symb,
                                const FactorOptions& opt);

extern template Factorization<std::complex<float>>
factorize(const fd::ImpedanceMatrix&, const EliminationTree&,
          const SymbolicFactor&, const FactorOptions&);
extern template Factorization<std::complex<double>>
factorize(const fd::ImpedanceMatrix&, const EliminationTree&,
          const SymbolicFactor&, const FactorOptions&);

} // namespace horst::mf

#endif
