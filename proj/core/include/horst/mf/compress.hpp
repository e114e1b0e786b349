#ifndef HORST_MF_COMPRESS_HPP
#define HORST_MF_COMPRESS_HPP

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <vector>

namespace horst::mf {

template <class Scalar>
using DenseMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Result of a truncated pivoted QR: B ~ X*Y with X orthonormal columns
/// and Y = R*P^T. sigma holds |R_kk| in elimination order; it weights the
/// components when the pair is later regraded to narrower storage. When
/// the revealed rank exceeds min(m,n)/2 the factors are not returned and
/// kept_full is set; the caller keeps the dense block.
template <class Scalar>
struct LowRank {
  DenseMat<Scalar> x, y;
  std::vector<float> sigma;
  bool kept_full = false;
  std::int64_t flops = 0;
};

/// Householder CPQR truncated at eps*|B|_F (Frobenius, trailing-block
/// norm tracked by column downdating). Deterministic: ties in the column
/// pivot pick the lowest index.
template <class Scalar>
LowRank<Scalar> compress_block(const DenseMat<Scalar>& b, double eps);

extern template LowRank<std::complex<float>>
compress_block(const DenseMat<std::complex<float>>&, double);
extern template LowRank<std::complex<double>>
compress_block(const DenseMat<std::complex<double>>&, double);

} // namespace horst::mf

#endif
