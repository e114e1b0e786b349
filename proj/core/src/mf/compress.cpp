#include "horst/mf/compress.hpp"

#include <cmath>

namespace horst::mf {

template <class Scalar>
LowRank<Scalar> compress_block(const DenseMat<Scalar>& b, double eps) {
  using Real = typename Scalar::value_type;
  const int m = int(b.rows());
  const int n = int(b.cols());
  const int minmn = std::min(m, n);
  const int maxr = minmn / 2;

  LowRank<Scalar> out;
  DenseMat<Scalar> a = b;
  const std::size_t un = std::size_t(n);
  std::vector<double> colnorm2(un);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    colnorm2[std::size_t(j)] = a.col(j).squaredNorm();
    total += colnorm2[std::size_t(j)];
  }
  const double thresh = eps * eps * total;

  std::vector<int> perm(un);
  for (int j = 0; j < n; ++j) perm[std::size_t(j)] = j;
  std::vector<Scalar> rdiag;

  int r = 0;
  while (true) {
    // exact trailing norm: the downdated column norms only order pivots,
    // they saturate near machine precision and cannot drive the stop
    const double remaining = a.block(r, r, m - r, n - r).squaredNorm();
    out.flops += 2ll * (m - r) * (n - r);
    if (remaining <= thresh || r == minmn) break;
    if (r == maxr) {
      out.kept_full = true;
      return out;
    }

    int jmax = r;
    for (int j = r + 1; j < n; ++j)
      if (colnorm2[std::size_t(j)] > colnorm2[std::size_t(jmax)]) jmax = j;
    if (!(colnorm2[std::size_t(jmax)] > 0.0)) break;
    if (jmax != r) {
      a.col(r).swap(a.col(jmax));
      std::swap(colnorm2[std::size_t(r)], colnorm2[std::size_t(jmax)]);
      std::swap(perm[std::size_t(r)], perm[std::size_t(jmax)]);
    }

    const Scalar alpha = a(r, r);
    const double nr = a.col(r).segment(r, m - r).norm();
    const Scalar phase =
        (std::abs(alpha) == Real(0)) ? Scalar(1) : alpha / Real(std::abs(alpha));
    const Scalar sig = -phase * Real(nr);
    rdiag.push_back(sig);
    out.sigma.push_back(float(nr));

    auto u = a.col(r).segment(r, m - r);
    u(0) = alpha - sig;
    const double un = u.norm();
    if (un > 0.0) {
      u /= Real(un);
      if (n - r - 1 > 0) {
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic> w =
            u.adjoint() * a.block(r, r + 1, m - r, n - r - 1);
        a.block(r, r + 1, m - r, n - r - 1).noalias() -= (Scalar(2) * u) * w;
        out.flops += 16ll * (m - r) * (n - r - 1);
      }
    }
    for (int j = r + 1; j < n; ++j) {
      colnorm2[std::size_t(j)] -= std::norm(a(r, j));
      if (colnorm2[std::size_t(j)] < 0.0) colnorm2[std::size_t(j)] = 0.0;
    }
    ++r;
  }

  out.x.setZero(m, r);
  for (int k = 0; k < r; ++k) out.x(k, k) = Scalar(1);
  for (int k = r - 1; k >= 0; --k) {
    auto u = a.col(k).segment(k, m - k);
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> w =
        u.adjoint() * out.x.block(k, 0, m - k, r);
    out.x.block(k, 0, m - k, r).noalias() -= (Scalar(2) * u) * w;
    out.flops += 16ll * (m - k) * r;
  }
  out.y.setZero(r, n);
  for (int j = 0; j < n; ++j) {
    const int top = std::min(j + 1, r);
    for (int i = 0; i < top; ++i)
      out.y(i, perm[std::size_t(j)]) = (i == j) ? rdiag[std::size_t(i)] : a(i, j);
  }
  return out;
}

template LowRank<std::complex<float>>
compress_block(const DenseMat<std::complex<float>>&, double);
template LowRank<std::complex<double>>
compress_block(const DenseMat<std::complex<double>>&, double);

} // namespace horst::mf
