#ifndef HORST_MODEL_VTI_MODEL_HPP
#define HORST_MODEL_VTI_MODEL_HPP

#include <complex>
#include <vector>

#include "horst/common/grid.hpp"

namespace horst::model {

/// Earth model on a regular grid: vertical velocity, Thomsen anisotropy,
/// density and attenuation, plus the water-bottom index per (x,y) column.
/// Fields are kept in double precision in memory; the on-disk interchange
/// format stores them as 32-bit floats.
///
/// q uses +infinity as the "lossless" sentinel; q must be > 0 everywhere.
struct VtiModel {
  Grid3 grid;
  std::vector<double> v0;        // vertical P velocity, m/s
  std::vector<double> delta;     // Thomsen delta
  std::vector<double> epsilon;   // Thomsen epsilon
  std::vector<double> rho;       // density, kg/m^3
  std::vector<double> q;         // quality factor, +inf = lossless
  std::vector<int> water_depth;  // per column (ix*ny+iy): first solid cell iz

  bool water(int ix, int iy, int iz) const {
    return iz < water_depth[std::size_t(ix) * grid.dims[1] + iy];
  }
  void validate() const;  // throws ConfigError on bad shapes or domains
};

/// Brocher's polynomial fit of density to P velocity, scalar form.
/// vp in m/s, result in kg/m^3. Valid for vp in [1000, 8500].
double brocher_density_scalar(double vp);

/// Density grid from a velocity grid; cells above the water bottom get
/// 1000 kg/m^3 regardless of the polynomial.
std::vector<double> brocher_density(const std::vector<double>& v0,
                                    const Grid3& grid,
                                    const std::vector<int>& water_depth);

/// Kolsky-Futterman complex velocity at frequency f (Hz):
///   c = v0 * (1 + ln(f/f_ref)/(pi q)) / (1 + i/(2 q)).
/// The sign of the imaginary part makes plane waves decay with travel
/// distance under the e^{-i omega t} convention (Im c < 0); a 1D decay test
/// pins this down. q = +inf returns the real v0.
std::complex<double> kolsky_futterman_velocity(double v0, double q, double f_hz,
                                               double f_ref_hz);

/// Grid interval for a frequency: the largest value from a catalog of
/// two-significant-figure intervals (... 25, 28, 30, 32.5, 37.5, 45, 50,
/// 56, 75, 100, 150 ...) that keeps the effective points per wavelength at
/// or above max(0.95*ppw, ppw_min).
double grid_interval_for_frequency(double f_hz, double v_min, double ppw,
                                   double ppw_min = 3.8);

/// One stage of the frequency continuation.
struct PlanStage {
  double f_hz = 0;
  double h_m = 0;      // modeling grid interval for this stage
  int max_iter = 15;   // inner iteration cap
};

/// Ascending frequency ladder, repeated `cycles` times.
struct FrequencyPlan {
  std::vector<PlanStage> stages;
  int cycles = 1;
  double ppw = 4.0;
  double ppw_min = 3.8;

  /// Frequencies strictly increasing, h non-increasing, h within the ppw
  /// floor for v_min. Throws ConfigError.
  void validate(double v_min) const;
};

/// Build a plan by deriving each stage interval from the catalog.
FrequencyPlan make_plan(const std::vector<double>& freqs_hz, double v_min,
                        double ppw, double ppw_min, int cycles, int max_iter);

/// Trilinear resampling of every field onto a cubic grid of interval h_new.
/// Physical extents are preserved to within one cell; q is interpolated in
/// 1/q so lossless regions stay lossless; the water-bottom index is
/// rebuilt from the resampled column depths. h_new equal to the current
/// (cubic) spacing reproduces the model exactly.
VtiModel resample_model(const VtiModel& m, double h_new);

} // namespace horst::model

#endif
