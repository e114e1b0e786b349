#include "horst/model/vti_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "horst/common/error.hpp"

namespace horst::model {

namespace {

constexpr double kVpMin = 1000.0;
constexpr double kVpMax = 8500.0;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

} // namespace

void VtiModel::validate() const {
  const auto n = std::size_t(grid.size());
  require(grid.dims[0] >= 2 && grid.dims[1] >= 2 && grid.dims[2] >= 2,
          "model: all dims must be >= 2");
  require(grid.spacing[0] > 0 && grid.spacing[1] > 0 && grid.spacing[2] > 0,
          "model: spacing must be positive");
  require(v0.size() == n && delta.size() == n && epsilon.size() == n &&
              rho.size() == n && q.size() == n,
          "model: field size does not match grid");
  require(water_depth.size() == std::size_t(grid.dims[0]) * grid.dims[1],
          "model: water_depth size must be nx*ny");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v0[i] > 0) || !(rho[i] > 0) || !(q[i] > 0)) {
      std::ostringstream os;
      os << "model: v0, rho, q must be positive (cell " << i << ")";
      throw ConfigError(os.str());
    }
  }
  for (int wd : water_depth)
    require(wd >= 0 && wd <= grid.dims[2], "model: water_depth out of range");
}

double brocher_density_scalar(double vp) {
  if (!(vp >= kVpMin && vp <= kVpMax)) {
    std::ostringstream os;
    os << "brocher_density: vp = " << vp << " m/s outside [" << kVpMin << ", "
       << kVpMax << "]";
    throw ConfigError(os.str());
  }
  const double v = vp * 1e-3;  // km/s
  const double gcc =
      v * (1.6612 + v * (-0.4721 + v * (0.0671 + v * (-0.0043 + v * 0.000106))));
  return gcc * 1000.0;
}

std::vector<double> brocher_density(const std::vector<double>& v0,
                                    const Grid3& grid,
                                    const std::vector<int>& water_depth) {
  std::vector<double> rho(v0.size());
  for (int ix = 0; ix < grid.dims[0]; ++ix)
    for (int iy = 0; iy < grid.dims[1]; ++iy) {
      const int wd = water_depth[std::size_t(ix) * grid.dims[1] + iy];
      for (int iz = 0; iz < grid.dims[2]; ++iz) {
        const auto i = std::size_t(grid.index(ix, iy, iz));
        rho[i] = iz < wd ? 1000.0 : brocher_density_scalar(v0[i]);
      }
    }
  return rho;
}

std::complex<double> kolsky_futterman_velocity(double v0, double q, double f_hz,
                                               double f_ref_hz) {
  if (!(v0 > 0) || !(q > 0) || !(f_hz > 0) || !(f_ref_hz > 0))
    throw ConfigError("kolsky_futterman: v0, q, f, f_ref must be positive");
  if (std::isinf(q)) return {v0, 0.0};
  const double dispersive =
      v0 * (1.0 + std::log(f_hz / f_ref_hz) / (std::numbers::pi * q));
  // Dividing by (1 + i/(2q)) gives Im(c) < 0, the decaying branch under
  // the e^{-i omega t} convention.
  return dispersive / std::complex<double>(1.0, 1.0 / (2.0 * q));
}

double grid_interval_for_frequency(double f_hz, double v_min, double ppw,
                                   double ppw_min) {
  if (!(f_hz > 0) || !(v_min > 0) || !(ppw >= 3.0) || !(ppw_min > 0))
    throw ConfigError("grid_interval_for_frequency: need f>0, v_min>0, ppw>=3");
  // Catalog mantissas; scaled by powers of ten they produce the interval
  // ladder ... 25, 28, 30, 32.5, 37.5, 45, 50, 56, 75, 100, 150 ...
  static const double kMant[] = {1.0,  1.25, 1.5, 2.0, 2.5, 2.8, 3.0,
                                 3.25, 3.75, 4.5, 5.0, 5.6, 7.5};
  const double floor_ppw = std::max(0.95 * ppw, ppw_min);
  const double h_cap = v_min / (floor_ppw * f_hz);
  double best = 0.0;
  for (int e = -6; e <= 9; ++e) {
    const double scale = std::pow(10.0, e);
    for (double m : kMant) {
      const double h = m * scale;
      if (h <= h_cap * (1.0 + 1e-12) && h > best) best = h;
    }
  }
  if (!(best > 0))
    throw ConfigError("grid_interval_for_frequency: no catalog interval fits");
  return best;
}

void FrequencyPlan::validate(double v_min) const {
  require(!stages.empty(), "plan: no stages");
  require(cycles >= 1, "plan: cycles must be >= 1");
  require(ppw_min > 0 && ppw >= 3.0, "plan: bad ppw");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& st = stages[s];
    require(st.f_hz > 0 && st.h_m > 0 && st.max_iter >= 0,
            "plan: stage values must be positive");
    if (s > 0) {
      require(st.f_hz > stages[s - 1].f_hz,
              "plan: frequencies must be strictly increasing");
      require(st.h_m <= stages[s - 1].h_m * (1.0 + 1e-12),
              "plan: grid interval must be non-increasing");
    }
    if (v_min > 0) {
      const double eff_ppw = v_min / (st.h_m * st.f_hz);
      if (eff_ppw < ppw_min * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "plan: stage " << s << " at " << st.f_hz << " Hz, h = " << st.h_m
           << " m has " << eff_ppw << " points per wavelength (min " << ppw_min
           << ")";
        throw ConfigError(os.str());
      }
    }
  }
}

FrequencyPlan make_plan(const std::vector<double>& freqs_hz, double v_min,
                        double ppw, double ppw_min, int cycles, int max_iter) {
  FrequencyPlan plan;
  plan.cycles = cycles;
  plan.ppw = ppw;
  plan.ppw_min = ppw_min;
  for (double f : freqs_hz) {
    PlanStage st;
    st.f_hz = f;
    st.h_m = grid_interval_for_frequency(f, v_min, ppw, ppw_min);
    st.max_iter = max_iter;
    plan.stages.push_back(st);
  }
  plan.validate(v_min);
  return plan;
}

namespace {

struct Trilinear {
  const Grid3& g;
  // Sample a field at physical coordinate (x,y,z), clamped to the domain.
  double operator()(const std::vector<double>& f, double x, double y,
                    double z) const {
    const auto ext = g.extent();
    auto local = [&](double v, double o, double e) {
      return std::clamp(v - o, 0.0, e);
    };
    const double fx = local(x, g.origin[0], ext[0]) / g.spacing[0];
    const double fy = local(y, g.origin[1], ext[1]) / g.spacing[1];
    const double fz = local(z, g.origin[2], ext[2]) / g.spacing[2];
    const int ix = std::min(int(fx), g.dims[0] - 2);
    const int iy = std::min(int(fy), g.dims[1] - 2);
    const int iz = std::min(int(fz), g.dims[2] - 2);
    const double ax = fx - ix, ay = fy - iy, az = fz - iz;
    double acc = 0.0;
    for (int dx = 0; dx <= 1; ++dx)
      for (int dy = 0; dy <= 1; ++dy)
        for (int dz = 0; dz <= 1; ++dz) {
          const double w = (dx ? ax : 1 - ax) * (dy ? ay : 1 - ay) *
                           (dz ? az : 1 - az);
          if (w != 0.0)
            acc += w * f[std::size_t(g.index(ix + dx, iy + dy, iz + dz))];
        }
    return acc;
  }
};

} // namespace

VtiModel resample_model(const VtiModel& m, double h_new) {
  if (!(h_new > 0)) throw ConfigError("resample_model: h_new must be positive");
  m.validate();
  const auto ext = m.grid.extent();

  VtiModel out;
  out.grid.spacing = {h_new, h_new, h_new};
  out.grid.origin = m.grid.origin;
  for (int a = 0; a < 3; ++a) {
    const int n = int(std::floor(ext[a] / h_new + 0.5)) + 1;
    if (n < 2) {
      std::ostringstream os;
      os << "resample_model: axis " << a << " degenerates to " << n
         << " nodes at h = " << h_new;
      throw ConfigError(os.str());
    }
    out.grid.dims[a] = n;
  }

  const auto n_new = std::size_t(out.grid.size());
  out.v0.resize(n_new);
  out.delta.resize(n_new);
  out.epsilon.resize(n_new);
  out.rho.resize(n_new);
  out.q.resize(n_new);

  // Attenuation interpolates in 1/q so lossless regions blend naturally.
  std::vector<double> slowq(m.q.size());
  for (std::size_t i = 0; i < m.q.size(); ++i)
    slowq[i] = std::isinf(m.q[i]) ? 0.0 : 1.0 / m.q[i];

  Trilinear tri{m.grid};
  for (int ix = 0; ix < out.grid.dims[0]; ++ix)
    for (int iy = 0; iy < out.grid.dims[1]; ++iy)
      for (int iz = 0; iz < out.grid.dims[2]; ++iz) {
        const auto [x, y, z] = out.grid.coord(ix, iy, iz);
        const auto i = std::size_t(out.grid.index(ix, iy, iz));
        out.v0[i] = tri(m.v0, x, y, z);
        out.delta[i] = tri(m.delta, x, y, z);
        out.epsilon[i] = tri(m.epsilon, x, y, z);
        out.rho[i] = tri(m.rho, x, y, z);
        const double sq = tri(slowq, x, y, z);
        out.q[i] = sq > 0 ? 1.0 / sq : std::numeric_limits<double>::infinity();
      }

  // Water bottom: bilinear in column depth (meters), then back to an index.
  out.water_depth.assign(std::size_t(out.grid.dims[0]) * out.grid.dims[1], 0);
  std::vector<double> depth_m(m.water_depth.size());
  for (std::size_t c = 0; c < depth_m.size(); ++c)
    depth_m[c] = m.water_depth[c] * m.grid.spacing[2];
  Grid3 colgrid = m.grid;
  colgrid.dims[2] = 2;  // reuse trilinear as bilinear on a dummy z axis
  std::vector<double> depth2(depth_m.size() * 2);
  for (std::size_t c = 0; c < depth_m.size(); ++c) {
    depth2[2 * c] = depth_m[c];
    depth2[2 * c + 1] = depth_m[c];
  }
  Trilinear tri2{colgrid};
  for (int ix = 0; ix < out.grid.dims[0]; ++ix)
    for (int iy = 0; iy < out.grid.dims[1]; ++iy) {
      const auto [x, y, z0] = out.grid.coord(ix, iy, 0);
      (void)z0;
      const double d = tri2(depth2, x, y, colgrid.origin[2]);
      const int wd = int(std::floor(d / h_new + 0.5));
      out.water_depth[std::size_t(ix) * out.grid.dims[1] + iy] =
          std::clamp(wd, 0, out.grid.dims[2]);
    }
  return out;
}

} // namespace horst::model
