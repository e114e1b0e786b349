#ifndef HORST_FD_PML_HPP
#define HORST_FD_PML_HPP

#include <array>
#include <complex>
#include <vector>

#include "horst/common/grid.hpp"

namespace horst::fd {

/// Absorbing-layer damping profiles, one per axis, frozen at construction
/// (the reference velocity is taken from the model once per stage so the
/// operator's PML coefficients do not change under model perturbations).
/// Stretch factor at angular frequency omega: s = 1 + i*gamma/omega, with
/// gamma = gamma0 * (d/L)^3 growing cubically across the layer. gamma0 is
/// set from the classical plane-wave reflection target r0.
struct PmlProfile {
  std::array<std::vector<double>, 3> gamma;  // nodal damping, per axis
  int width = 8;
  double v_ref = 1500.0;
  double r0 = 1e-4;
  bool free_surface = true;  // no layer on the top z face when true

  std::complex<double> stretch(int axis, int i,
                               std::complex<double> omega) const {
    return 1.0 + std::complex<double>(0.0, 1.0) * gamma[axis][i] / omega;
  }
};

/// Build profiles for a grid. width >= 8 and 2*width < n on every damped
/// axis; violations throw ConfigError.
PmlProfile make_pml_profile(const Grid3& grid, int width, bool free_surface,
                            double v_ref, double r0 = 1e-4);

/// 1D visco-acoustic Helmholtz fixture on n nodes sharing the same stretch
/// convention, symmetrized tridiagonal form; used to pin the absorbing
/// boundary quality and the attenuation decay sign. Returns the three
/// diagonals (lower, main, upper) of the operator
///   d/dx( (1/(rho s)) dp/dx ) + s*omega^2/kappa0 * p.
struct Tridiag {
  std::vector<std::complex<double>> lower, main, upper;
};
Tridiag assemble_1d_helmholtz(int n, double h, const PmlProfile& pml,
                              std::complex<double> omega,
                              std::complex<double> c_tilde, double rho);

/// Direct Thomas solve of the fixture (no pivoting; diagonally clean).
std::vector<std::complex<double>> solve_tridiag(
    const Tridiag& t, std::vector<std::complex<double>> rhs);

} // namespace horst::fd

#endif
