#include "horst/fd/pml.hpp"

#include <cmath>
#include <string>

#include "horst/common/error.hpp"

namespace horst::fd {

PmlProfile make_pml_profile(const Grid3& grid, int width, bool free_surface,
                            double v_ref, double r0) {
  if (width < 8)
    throw ConfigError("absorbing layer width " + std::to_string(width) +
                      " below the minimum of 8 cells");
  if (!(r0 > 0.0 && r0 < 1.0))
    throw ConfigError("reflection target must lie in (0,1)");
  if (v_ref <= 0.0) throw ConfigError("reference velocity must be positive");

  PmlProfile p;
  p.width = width;
  p.v_ref = v_ref;
  p.r0 = r0;
  p.free_surface = free_surface;

  for (int a = 0; a < 3; ++a) {
    const int n = grid.dims[a];
    p.gamma[a].assign(static_cast<size_t>(std::max(n, 1)), 0.0);
    if (n <= 1) continue;  // degenerate axis in 1D/2D fixtures, no layer
    if (2 * width >= n)
      throw ConfigError("grid axis " + std::to_string(a) + " with " +
                        std::to_string(n) +
                        " nodes cannot host two absorbing layers of width " +
                        std::to_string(width));
    const double len = width * grid.spacing[a];
    // cubic ramp, classical reflection estimate exp(-gamma0*L/(2c)) = r0
    const double gamma0 = 2.0 * v_ref * std::log(1.0 / r0) / len;
    for (int i = 0; i < n; ++i) {
      double d = 0.0;  // penetration depth into the layer, in cells
      if (i < width && !(a == 2 && free_surface)) d = double(width - i);
      if (i >= n - width) d = double(i - (n - width) + 1);
      if (d > 0.0) {
        const double xi = d / width;
        p.gamma[a][i] = gamma0 * xi * xi * xi;
      }
    }
  }
  return p;
}

Tridiag assemble_1d_helmholtz(int n, double h, const PmlProfile& pml,
                              std::complex<double> omega,
                              std::complex<double> c_tilde, double rho) {
  using cd = std::complex<double>;
  Tridiag t;
  t.lower.assign(n, cd(0));
  t.main.assign(n, cd(0));
  t.upper.assign(n, cd(0));
  const cd kappa0 = rho * c_tilde * c_tilde;
  const double h2 = h * h;
  auto s_at = [&](int i) { return pml.stretch(0, i, omega); };
  for (int i = 0; i < n; ++i) {
    const cd gi = 1.0 / (rho * s_at(i));
    // flux coefficients at half nodes, one-sided at the ends
    const cd gp = (i + 1 < n) ? 0.5 * (gi + 1.0 / (rho * s_at(i + 1))) : gi;
    const cd gm = (i - 1 >= 0) ? 0.5 * (gi + 1.0 / (rho * s_at(i - 1))) : gi;
    t.main[i] = -(gp + gm) / h2 + s_at(i) * omega * omega / kappa0;
    if (i + 1 < n) t.upper[i] = gp / h2;
    if (i - 1 >= 0) t.lower[i] = gm / h2;
  }
  return t;
}

std::vector<std::complex<double>> solve_tridiag(
    const Tridiag& t, std::vector<std::complex<double>> rhs) {
  using cd = std::complex<double>;
  const size_t n = rhs.size();
  std::vector<cd> c(n, cd(0));
  std::vector<cd>& x = rhs;
  cd piv = t.main[0];
  c[0] = t.upper[0] / piv;
  x[0] /= piv;
  for (size_t i = 1; i < n; ++i) {
    piv = t.main[i] - t.lower[i] * c[i - 1];
    if (i + 1 < n) c[i] = t.upper[i] / piv;
    x[i] = (x[i] - t.lower[i] * x[i - 1]) / piv;
  }
  for (size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

} // namespace horst::fd
