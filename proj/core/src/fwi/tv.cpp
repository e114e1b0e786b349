#include "horst/fwi/tv.hpp"

#include <array>
#include <cmath>

#include "horst/common/error.hpp"

namespace horst::fwi {

namespace {

// forward difference along axis a, zero on the far face
inline double fwd(const std::vector<double>& u, const Grid3& g, int ix, int iy,
                  int iz, int a) {
  const std::int64_t i = g.index(ix, iy, iz);
  if (a == 0)
    return ix + 1 < g.nx() ? u[std::size_t(g.index(ix + 1, iy, iz))] -
                                 u[std::size_t(i)]
                           : 0.0;
  if (a == 1)
    return iy + 1 < g.ny() ? u[std::size_t(g.index(ix, iy + 1, iz))] -
                                 u[std::size_t(i)]
                           : 0.0;
  return iz + 1 < g.nz() ? u[std::size_t(g.index(ix, iy, iz + 1))] -
                               u[std::size_t(i)]
                         : 0.0;
}

} // namespace

double total_variation(const Grid3& g, const std::vector<double>& u) {
  if (u.size() != std::size_t(g.size()))
    throw ConfigError("total_variation: field does not match the grid");
  double tv = 0.0;
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int iz = 0; iz < g.nz(); ++iz) {
        const double dx = fwd(u, g, ix, iy, iz, 0);
        const double dy = fwd(u, g, ix, iy, iz, 1);
        const double dz = fwd(u, g, ix, iy, iz, 2);
        tv += std::sqrt(dx * dx + dy * dy + dz * dz);
      }
  return tv;
}

std::vector<double> tv_denoise(const Grid3& g, const std::vector<double>& m,
                               double lambda, int max_iter, double gap_tol) {
  if (m.size() != std::size_t(g.size()))
    throw ConfigError("tv_denoise: field does not match the grid");
  if (lambda < 0.0) throw ConfigError("tv_denoise: lambda must be >= 0");
  if (lambda == 0.0) return m;

  const std::size_t n = m.size();
  std::array<std::vector<double>, 3> p;
  for (auto& c : p) c.assign(n, 0.0);
  std::vector<double> divp(n, 0.0), w(n, 0.0), u(m);
  const double tau = 1.0 / 12.0;  // 1 / ||div grad|| in 3D

  const auto compute_div = [&]() {
    for (int ix = 0; ix < g.nx(); ++ix)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int iz = 0; iz < g.nz(); ++iz) {
          const std::size_t i = std::size_t(g.index(ix, iy, iz));
          double d = p[0][i] + p[1][i] + p[2][i];
          if (ix > 0) d -= p[0][std::size_t(g.index(ix - 1, iy, iz))];
          if (iy > 0) d -= p[1][std::size_t(g.index(ix, iy - 1, iz))];
          if (iz > 0) d -= p[2][std::size_t(g.index(ix, iy, iz - 1))];
          divp[i] = d;
        }
  };

  for (int it = 0; it < max_iter; ++it) {
    compute_div();
    for (std::size_t i = 0; i < n; ++i) w[i] = divp[i] - m[i] / lambda;
    for (int ix = 0; ix < g.nx(); ++ix)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int iz = 0; iz < g.nz(); ++iz) {
          const std::size_t i = std::size_t(g.index(ix, iy, iz));
          const double gx = fwd(w, g, ix, iy, iz, 0);
          const double gy = fwd(w, g, ix, iy, iz, 1);
          const double gz = fwd(w, g, ix, iy, iz, 2);
          const double den =
              1.0 + tau * std::sqrt(gx * gx + gy * gy + gz * gz);
          p[0][i] = (p[0][i] + tau * gx) / den;
          p[1][i] = (p[1][i] + tau * gy) / den;
          p[2][i] = (p[2][i] + tau * gz) / den;
        }
    compute_div();
    for (std::size_t i = 0; i < n; ++i) u[i] = m[i] - lambda * divp[i];

    // gap = lambda * sum(|grad u| + <p, grad u>), zero exactly at the
    // saddle point of the constrained dual
    double gap = 0.0;
    for (int ix = 0; ix < g.nx(); ++ix)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int iz = 0; iz < g.nz(); ++iz) {
          const std::size_t i = std::size_t(g.index(ix, iy, iz));
          const double gx = fwd(u, g, ix, iy, iz, 0);
          const double gy = fwd(u, g, ix, iy, iz, 1);
          const double gz = fwd(u, g, ix, iy, iz, 2);
          gap += std::sqrt(gx * gx + gy * gy + gz * gz) + p[0][i] * gx +
                 p[1][i] * gy + p[2][i] * gz;
        }
    gap *= lambda;
    if (gap < gap_tol) break;
  }
  return u;
}

} // namespace horst::fwi
