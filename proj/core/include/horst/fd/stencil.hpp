#ifndef HORST_FD_STENCIL_HPP
#define HORST_FD_STENCIL_HPP

#include <string>
#include <vector>

namespace horst::fd {

/// 27-point discretization weights for one points-per-wavelength value.
/// w1/w2/w3 mix the axis, face-diagonal and body-diagonal second-order
/// stiffness stencils (w1+w2+w3 = 1); the mass weights distribute the
/// zeroth-order term over the center/face/edge/corner neighbor classes
/// (they also sum to 1). Both sums are consistency constraints.
struct StencilWeights {
  double w1 = 1.0, w2 = 0.0, w3 = 0.0;
  double wm_center = 1.0, wm_face = 0.0, wm_edge = 0.0, wm_corner = 0.0;

  static StencilWeights classical7() { return {}; }
};

/// Symbols of the stiffness mix and consistent mass on a unit grid, for a
/// plane wave with phase increments (kx, ky, kz) in radians per cell.
/// stiffness -> -|k|^2 and mass -> 1 as k -> 0.
double stiffness_symbol(const StencilWeights& w, double kx, double ky,
                        double kz);
double mass_symbol(const StencilWeights& w, double kx, double ky, double kz);

/// Relative phase-velocity error of the discrete Helmholtz operator for a
/// plane wave at G points per wavelength traveling along (theta, phi)
/// (polar angle from z, azimuth from x). Closed form; returns -1 when the
/// discrete symbol loses positivity (total breakdown), finite otherwise.
double dispersion_error(const StencilWeights& w, double G, double theta,
                        double phi);

/// Direction set covering the cubic-symmetry fundamental wedge, axis and
/// diagonal extremes included.
std::vector<std::pair<double, double>> dispersion_angles(int n_polar = 8,
                                                         int n_azimuth = 6);

/// Worst |dispersion_error| over a direction set.
double max_dispersion_error(const StencilWeights& w, double G,
                            const std::vector<std::pair<double, double>>& angles);

/// Far-field point-source amplitude of the discrete operator relative to
/// the continuum, for the direction (theta, phi) at G points per
/// wavelength. The Green's-function amplitude is set by the radial slope
/// of the operator symbol at its propagating zero, so this is
/// (-2 k0) / (d/dk)[stiffness + k0^2 mass] evaluated at k0 = 2 pi / G.
/// Returns a large sentinel when the slope is not negative.
double amplitude_response(const StencilWeights& w, double G, double theta,
                          double phi);

/// Axis-direction amplitude response, closed form tan(pi/G)/(pi/G). All
/// three stiffness families project onto the same 1D second difference
/// along an axis and the unit-sum mass leaves one effective parameter, so
/// exact axis phase pins the axis amplitude to this value for any weights.
double axis_amplitude_response(double G);

/// Weight table over a points-per-wavelength range, piecewise linear in G.
struct StencilWeightTable {
  std::vector<double> g;             // ascending samples
  std::vector<StencilWeights> rows;  // same length as g

  StencilWeights interpolate(double G) const;  // clamped at the ends
  void save_csv(const std::string& path) const;
  static StencilWeightTable load_csv(const std::string& path);
};

/// Minimax optimization of the weights per G sample (deterministic
/// Nelder-Mead over the five free parameters, several fixed starts). The
/// objective is the worst phase error plus a term holding the amplitude
/// response uniform at its axis-forced value, so one scalar gain per
/// coupling recovers analytic point-source amplitudes.
StencilWeightTable optimize_stencil_weights(
    const std::vector<double>& g_samples, int n_polar = 8, int n_azimuth = 6);

/// Default G ladder covering [3.8, 40].
std::vector<double> default_g_samples();

} // namespace horst::fd

#endif
