#include "horst/cli/survey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "horst/common/error.hpp"

namespace horst::cli {

namespace {

constexpr double kObnPitchBase = 375.0;
constexpr double kShotDxBase = 18.75;
constexpr double kShotDyBase = 37.5;

int clamp_index(double pos_m, double h, int n) {
  const int i = int(std::lround(pos_m / h));
  return std::clamp(i, 0, n - 1);
}

} // namespace

std::array<double, 3> survey_pitches(const SurveySpec& spec) {
  return {spec.obn_pitch_m > 0.0 ? spec.obn_pitch_m : kObnPitchBase * spec.scale,
          spec.shot_dx_m > 0.0 ? spec.shot_dx_m : kShotDxBase * spec.scale,
          spec.shot_dy_m > 0.0 ? spec.shot_dy_m : kShotDyBase * spec.scale};
}

model::VtiModel make_base_model(const BaseModelConfig& b) {
  model::VtiModel m;
  m.grid.dims = b.dims;
  m.grid.spacing = {b.h_m, b.h_m, b.h_m};
  const int nx = b.dims[0], ny = b.dims[1], nz = b.dims[2];
  const std::size_t sz = std::size_t(m.grid.size());
  const int wb = std::clamp(int(std::lround(b.water_depth_m / b.h_m)), 0, nz - 1);
  m.water_depth.assign(std::size_t(nx) * std::size_t(ny), wb);
  m.v0.resize(sz);
  m.delta.resize(sz);
  m.epsilon.resize(sz);
  m.q.resize(sz);
  const double q_solid = b.q_solid == 0.0
                             ? std::numeric_limits<double>::infinity()
                             : b.q_solid;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      for (int iz = 0; iz < nz; ++iz) {
        const std::size_t i = std::size_t(m.grid.index(ix, iy, iz));
        const bool water = iz < wb;
        m.v0[i] = water ? b.v_water
                        : b.v_top + b.v_grad * (iz - wb) * b.h_m;
        m.delta[i] = water ? 0.0 : b.delta;
        m.epsilon[i] = water ? 0.0 : b.epsilon;
        m.q[i] = water ? std::numeric_limits<double>::infinity() : q_solid;
      }
  m.rho = model::brocher_density(m.v0, m.grid, m.water_depth);
  m.validate();
  return m;
}

SurveyResult synthesize_survey(const SurveySpec& spec,
                               const model::VtiModel& base) {
  base.validate();
  const Grid3& g = base.grid;
  const double h = g.spacing[0];
  const double ex = (g.dims[0] - 1) * g.spacing[0];
  const double ey = (g.dims[1] - 1) * g.spacing[1];
  const double ez = (g.dims[2] - 1) * g.spacing[2];

  SurveyResult out;
  out.m_true = base;
  out.m_start = base;

  for (std::size_t k = 0; k < spec.anomalies.size(); ++k) {
    const Anomaly& a = spec.anomalies[k];
    if (a.center_m[0] < 0.0 || a.center_m[0] > ex || a.center_m[1] < 0.0 ||
        a.center_m[1] > ey || a.center_m[2] < 0.0 || a.center_m[2] > ez)
      throw ConfigError("survey.anomalies[" + std::to_string(k) +
                        "]: center outside the model volume");
    const int cix = clamp_index(a.center_m[0], g.spacing[0], g.dims[0]);
    const int ciy = clamp_index(a.center_m[1], g.spacing[1], g.dims[1]);
    const int ciz = clamp_index(a.center_m[2], g.spacing[2], g.dims[2]);
    const double peak =
        a.amplitude *
        base.v0[std::size_t(g.index(cix, ciy, ciz))];
    const double inv_2s2 = 1.0 / (2.0 * a.radius_m * a.radius_m);
    for (int ix = 0; ix < g.dims[0]; ++ix)
      for (int iy = 0; iy < g.dims[1]; ++iy)
        for (int iz = 0; iz < g.dims[2]; ++iz) {
          if (base.water(ix, iy, iz)) continue;
          const double dx = ix * g.spacing[0] - a.center_m[0];
          const double dy = iy * g.spacing[1] - a.center_m[1];
          const double dz = iz * g.spacing[2] - a.center_m[2];
          out.m_true.v0[std::size_t(g.index(ix, iy, iz))] +=
              peak * std::exp(-(dx * dx + dy * dy + dz * dz) * inv_2s2);
        }
  }

  const auto [pitch, dx, dy] = survey_pitches(spec);
  const double margin =
      spec.margin_m >= 0.0 ? spec.margin_m : 0.1 * std::min(ex, ey);
  if (2.0 * margin >= std::min(ex, ey))
    throw ConfigError("survey.margin_m: margins leave no survey area");

  out.acq.reciprocal = true;
  int row = 0;
  for (double x = margin; x <= ex - margin + 1e-9; x += pitch, ++row) {
    const double y0 = margin + (row % 2) * 0.5 * pitch;
    for (double y = y0; y <= ey - margin + 1e-9; y += pitch) {
      double z = spec.obn_depth_m;
      if (z < 0.0) {
        const int ix = clamp_index(x, g.spacing[0], g.dims[0]);
        const int iy = clamp_index(y, g.spacing[1], g.dims[1]);
        z = base.water_depth[std::size_t(ix) * g.dims[1] + iy] * g.spacing[2];
      }
      if (z > ez)
        throw ConfigError("survey.obn_depth_m: node below the model volume");
      out.acq.sources.push_back({x, y, z});
    }
  }
  if (out.acq.sources.empty())
    throw ConfigError("survey.obn_pitch_m: no node fits inside the margins");

  double shot_z = spec.shot_depth_m >= 0.0 ? spec.shot_depth_m : 1.5 * h;
  if (shot_z > ez)
    throw ConfigError("survey.shot_depth_m: shots below the model volume");
  for (double x = margin; x <= ex - margin + 1e-9; x += dx)
    for (double y = margin; y <= ey - margin + 1e-9; y += dy)
      out.acq.receivers.push_back({x, y, shot_z});
  if (out.acq.receivers.empty())
    throw ConfigError("survey.shot_dx_m: no shot fits inside the margins");

  return out;
}

} // namespace horst::cli
