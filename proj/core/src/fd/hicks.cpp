#include "horst/fd/hicks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "horst/common/error.hpp"

namespace horst::fd {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

// windowed-sinc weight at offset x cells from the point, zero beyond radius
double kernel1d(double x, const HicksParams& par) {
  const double r = par.radius;
  if (std::abs(x) > r) return 0.0;
  const double t = 1.0 - (x / r) * (x / r);
  const double w = std::cyl_bessel_i(0.0, par.b * std::sqrt(std::max(t, 0.0))) /
                   std::cyl_bessel_i(0.0, par.b);
  return sinc(x) * w;
}

struct Axis {
  int lo, hi;            // inclusive offset range of contributing nodes
  std::array<double, 16> w;
  double frac;           // position in grid units
  int base;
};

Axis axis_weights(double pos, int n, const HicksParams& par) {
  Axis ax{};
  ax.base = static_cast<int>(std::floor(pos));
  ax.frac = pos - ax.base;
  const bool on_node = std::abs(ax.frac) < 1e-9 || std::abs(ax.frac - 1.0) < 1e-9;
  if (on_node) {
    ax.base = static_cast<int>(std::llround(pos));
    ax.lo = ax.hi = 0;
    ax.w[0] = 1.0;
    return ax;
  }
  ax.lo = -(par.radius - 1);
  ax.hi = par.radius;
  int k = 0;
  for (int j = ax.lo; j <= ax.hi; ++j, ++k)
    ax.w[k] = kernel1d(double(j) - ax.frac, par);
  (void)n;
  return ax;
}

} // namespace

CouplingStencil make_coupling(const Grid3& grid,
                              const std::array<double, 3>& pos_m,
                              bool free_surface, const HicksParams& par) {
  if (par.radius < 1 || par.radius > 8)
    throw ConfigError("coupling radius out of range");
  std::array<double, 3> g{};
  for (int a = 0; a < 3; ++a) {
    g[a] = (pos_m[a] - grid.origin[a]) / grid.spacing[a];
    if (g[a] < -0.5 || g[a] > grid.dims[a] - 0.5)
      throw ConfigError("coupling point lies outside the grid");
  }
  const Axis ax = axis_weights(g[0], grid.dims[0], par);
  const Axis ay = axis_weights(g[1], grid.dims[1], par);
  const Axis az = axis_weights(g[2], grid.dims[2], par);

  // accumulate by node so mirrored weights combine with in-place ones
  std::map<int64_t, double> acc;
  for (int jx = ax.lo; jx <= ax.hi; ++jx) {
    const int ix = ax.base + jx;
    if (ix < 0 || ix >= grid.dims[0]) continue;
    const double wx = ax.w[jx - ax.lo];
    for (int jy = ay.lo; jy <= ay.hi; ++jy) {
      const int iy = ay.base + jy;
      if (iy < 0 || iy >= grid.dims[1]) continue;
      const double wxy = wx * ay.w[jy - ay.lo];
      for (int jz = az.lo; jz <= az.hi; ++jz) {
        int iz = az.base + jz;
        double w = wxy * az.w[jz - az.lo];
        if (free_surface) {
          if (iz < 0) {  // odd image across the pressure-release plane
            iz = -iz;
            w = -w;
          }
          if (iz == 0) continue;  // the plane itself stays at zero
        }
        if (iz < 0 || iz >= grid.dims[2]) continue;
        acc[grid.index(ix, iy, iz)] += w;
      }
    }
  }
  CouplingStencil s;
  s.index.reserve(acc.size());
  s.coef.reserve(acc.size());
  for (const auto& [idx, w] : acc) {
    if (w == 0.0) continue;
    s.index.push_back(idx);
    s.coef.push_back(w);
  }
  if (s.index.empty())
    throw ConfigError("coupling stencil collapsed to nothing");
  return s;
}

void inject(const CouplingStencil& s, std::complex<double> amp,
            std::vector<std::complex<double>>& out) {
  const std::complex<double> a = amp * s.gain;
  for (size_t k = 0; k < s.index.size(); ++k)
    out[static_cast<size_t>(s.index[k])] += a * s.coef[k];
}

std::complex<double> sample(const CouplingStencil& s,
                            const std::vector<std::complex<double>>& field) {
  std::complex<double> v(0.0, 0.0);
  for (size_t k = 0; k < s.index.size(); ++k)
    v += s.coef[k] * field[static_cast<size_t>(s.index[k])];
  return s.gain * v;
}

} // namespace horst::fd
