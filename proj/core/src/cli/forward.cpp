#include "horst/cli/forward.hpp"

#include <cmath>
#include <limits>

#include "horst/common/error.hpp"

namespace horst::cli {

using cd = std::complex<double>;
using cf = std::complex<float>;

namespace {

template <class Scalar>
fwi::FreqDataset forward_impl(const model::VtiModel& m,
                              const fwi::Acquisition& acq,
                              const model::FrequencyPlan& plan,
                              const fwi::StageParams& par) {
  fwi::FreqDataset out;
  out.acq = acq;
  for (const model::PlanStage& st : plan.stages) {
    const model::VtiModel ms = model::resample_model(m, st.h_m);
    const fwi::StageContext ctx =
        fwi::make_stage_context(ms, st.f_hz, acq, par);
    const std::vector<fwi::cdouble> unit(acq.sources.size(), cd(1.0, 0.0));
    const Eigen::MatrixXcd d = fwi::simulate<Scalar>(ctx, ms, unit);
    fwi::FreqGather g = fwi::FreqGather::sized(
        st.f_hz, int(acq.sources.size()), int(acq.receivers.size()));
    for (int s = 0; s < g.n_src; ++s)
      for (int r = 0; r < g.n_rec; ++r)
        g.at(s, r) = cf(d(r, s));
    out.gathers.push_back(std::move(g));
  }
  out.validate();
  return out;
}

model::VtiModel homogeneous_cube(int n, double h, double v0, double rho) {
  model::VtiModel m;
  m.grid.dims = {n, n, n};
  m.grid.spacing = {h, h, h};
  const std::size_t sz = std::size_t(m.grid.size());
  m.v0.assign(sz, v0);
  m.delta.assign(sz, 0.0);
  m.epsilon.assign(sz, 0.0);
  m.rho.assign(sz, rho);
  m.q.assign(sz, std::numeric_limits<double>::infinity());
  m.water_depth.assign(std::size_t(n) * std::size_t(n), 0);
  m.validate();
  return m;
}

} // namespace

fwi::FreqDataset forward_model(const model::VtiModel& m,
                               const fwi::Acquisition& acq,
                               const model::FrequencyPlan& plan,
                               const fwi::StageParams& par,
                               const std::string& precision) {
  if (precision == "f64") return forward_impl<cd>(m, acq, plan, par);
  if (precision == "f32") return forward_impl<cf>(m, acq, plan, par);
  throw ConfigError("config key solver.precision: must be f32 or f64, got " +
                    precision);
}

OracleCheck green_function_check(int n, double h, double f_hz,
                                 const fd::StencilWeightTable& table,
                                 int pml_width, bool ghost, int min_cells) {
  const double v0 = 1500.0, rho = 1000.0;
  const model::VtiModel m = homogeneous_cube(n, h, v0, rho);

  fwi::StageParams par;
  par.free_surface = ghost;
  par.pml_width = pml_width;
  par.fopt.kind = mf::FactorKind::kFullRank;
  par.table = table;

  const double ex = (n - 1) * h;
  // off the nodes so the coupling kernel is exercised
  const std::array<double, 3> src =
      ghost ? std::array<double, 3>{0.5 * ex + 0.3 * h, 0.5 * ex + 0.2 * h,
                                    0.25 * ex + 0.37 * h}
            : std::array<double, 3>{0.5 * ex + 0.3 * h, 0.5 * ex + 0.2 * h,
                                    0.5 * ex + 0.37 * h};
  fwi::Acquisition acq;
  acq.sources.push_back(src);

  // receivers tile the grid nodes of the annulus: clear of the PML pad and
  // at least min_cells from the source
  const int lo = pml_width + 2;
  const int hi = n - 1 - pml_width - 2;
  const int zlo = ghost ? 2 : lo;
  const double rmin = min_cells * h;
  for (int ix = lo; ix <= hi; ++ix)
    for (int iy = lo; iy <= hi; ++iy)
      for (int iz = zlo; iz <= hi; ++iz) {
        const double dx = ix * h - src[0];
        const double dy = iy * h - src[1];
        const double dz = iz * h - src[2];
        if (dx * dx + dy * dy + dz * dz < rmin * rmin) continue;
        acq.receivers.push_back({ix * h, iy * h, iz * h});
      }
  if (acq.receivers.empty())
    throw ConfigError("green_function_check: empty sampling annulus");

  const fwi::StageContext ctx = fwi::make_stage_context(m, f_hz, acq, par);
  // signature 1/h^3 makes the injected coupling a discrete delta
  const std::vector<fwi::cdouble> sig(1, cd(1.0 / (h * h * h), 0.0));
  const Eigen::MatrixXcd d = fwi::simulate<cd>(ctx, m, sig);

  const double k = 2.0 * M_PI * f_hz / v0;
  const auto free_space = [&](double r) {
    return -rho * std::exp(cd(0.0, k * r)) / (4.0 * M_PI * r);
  };

  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < acq.receivers.size(); ++j) {
    const auto& p = acq.receivers[j];
    const double dx = p[0] - src[0];
    const double dy = p[1] - src[1];
    const double dz = p[2] - src[2];
    cd e = free_space(std::sqrt(dx * dx + dy * dy + dz * dz));
    if (ghost) {
      const double zi = p[2] + src[2];
      e -= free_space(std::sqrt(dx * dx + dy * dy + zi * zi));
    }
    num += std::norm(d(Eigen::Index(j), 0) - e);
    den += std::norm(e);
  }
  if (den == 0.0)
    throw ConfigError("green_function_check: degenerate oracle");
  return {std::sqrt(num / den), int(acq.receivers.size())};
}

double reciprocity_check(int n, double h, double f_hz,
                         const fd::StencilWeightTable& table) {
  model::VtiModel m = homogeneous_cube(n, h, 1550.0, 1900.0);
  // smooth heterogeneous VTI fill so the check is not trivially symmetric
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const std::size_t i = std::size_t(m.grid.index(ix, iy, iz));
        const double sx = std::sin(2.1 * ix / double(n));
        const double sy = std::cos(1.7 * iy / double(n));
        const double sz = iz / double(n);
        m.v0[i] = 1550.0 + 140.0 * sx * sy + 90.0 * sz * sz;
        m.delta[i] = 0.02 + 0.015 * sz;
        m.epsilon[i] = 0.05 + 0.02 * sx;
        m.q[i] = 120.0 + 30.0 * sy * sy;
      }
  m.rho = model::brocher_density(m.v0, m.grid, m.water_depth);

  fwi::StageParams par;
  par.free_surface = true;
  par.fopt.kind = mf::FactorKind::kFullRank;
  par.table = table;

  const double ex = (n - 1) * h;
  fwi::Acquisition acq;
  acq.sources.push_back({0.28 * ex, 0.31 * ex, 0.22 * ex});
  acq.sources.push_back({0.71 * ex, 0.64 * ex, 0.58 * ex});
  acq.receivers = acq.sources;

  const fwi::StageContext ctx = fwi::make_stage_context(m, f_hz, acq, par);
  const std::vector<fwi::cdouble> unit(2, cd(1.0, 0.0));
  const Eigen::MatrixXcd d = fwi::simulate<cd>(ctx, m, unit);
  const double scale = std::max(std::abs(d(1, 0)), std::abs(d(0, 1)));
  if (scale == 0.0)
    throw NumericError("reciprocity_check: zero traces");
  return std::abs(d(1, 0) - d(0, 1)) / scale;
}

} // namespace horst::cli
