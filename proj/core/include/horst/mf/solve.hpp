#ifndef HORST_MF_SOLVE_HPP
#define HORST_MF_SOLVE_HPP

#include <Eigen/Core>
#include <cstdint>

#include "horst/mf/factorize.hpp"

namespace horst::mf {

struct SolveOptions {
  int rhs_block = 32;
  bool prune = true;          // skip subtrees with all-zero right-hand sides
  bool order_columns = true;  // group columns by source locality
};

struct SolveStats {
  std::int64_t forward_visits = 0;
  std::int64_t backward_visits = 0;
  std::int64_t node_blocks = 0;  // front/block pairs offered to each pass
  std::int64_t flops = 0;
};

/// B := A^{-1} B through the stored factor, block by block of columns.
/// The forward pass descends only into subtrees that own a nonzero
/// right-hand-side row or sit on a path from one to the root; entries of
/// the permuted forward vector outside those subtrees are exactly zero.
/// Arithmetic runs in the factor's precision; B stays double.
template <class Scalar>
void solve_in_place(const Factorization<Scalar>& f, const EliminationTree& t,
                    Eigen::MatrixXcd& B, const SolveOptions& opt = {},
                    SolveStats* stats = nullptr);

extern template void solve_in_place(const Factorization<std::complex<float>>&,
                                    const EliminationTree&, Eigen::MatrixXcd&,
                                    const SolveOptions&, SolveStats*);
extern template void solve_in_place(const Factorization<std::complex<double>>&,
                                    const EliminationTree&, Eigen::MatrixXcd&,
                                    const SolveOptions&, SolveStats*);

/// max over columns of |Ax-b|_inf / (|A|_inf |x|_inf + |b|_inf)
double scaled_residual(const fd::ImpedanceMatrix& A, const Eigen::MatrixXcd& X,
                       const Eigen::MatrixXcd& B);

} // namespace horst::mf

#endif
