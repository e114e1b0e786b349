#include "horst/fwi/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "horst/common/error.hpp"

namespace horst::fwi {

StageContext make_stage_context(const model::VtiModel& m, double f_hz,
                                const Acquisition& acq,
                                const StageParams& par) {
  m.validate();
  if (!(f_hz > 0)) throw ConfigError("stage frequency must be positive");
  if (acq.sources.empty() || acq.receivers.empty())
    throw ConfigError("stage needs at least one source and one receiver");
  StageContext ctx;
  ctx.grid = m.grid;
  ctx.h = m.grid.spacing[0];
  ctx.f_hz = f_hz;
  ctx.f_ref_hz = par.f_ref_hz;
  ctx.omega = cdouble(2.0 * M_PI * f_hz, 0.0);
  ctx.free_surface = par.free_surface;
  const double v_ref =
      std::accumulate(m.v0.begin(), m.v0.end(), 0.0) / double(m.v0.size());
  ctx.pml = fd::make_pml_profile(m.grid, par.pml_width, par.free_surface,
                                 v_ref, par.pml_r0);
  ctx.weights = fd::make_weight_field(m, par.table, f_hz, par.f_ref_hz);
  ctx.tree = mf::build_tree(m.grid);
  {
    // symbolic pattern needs any assembled operator on this grid
    const fd::ImpedanceMatrix a = fd::assemble_operator(
        m, ctx.omega, ctx.pml, ctx.weights, par.free_surface, par.f_ref_hz);
    ctx.symb = mf::symbolic_analysis(ctx.tree, a);
  }
  ctx.fopt = par.fopt;
  ctx.rhs_block = par.rhs_block;
  ctx.estimate_signatures = par.estimate_signatures;
  // Per-coupling amplitude calibration: the scheme's point-source response
  // at the local sampling is divided out, split as sqrt on each end so a
  // source-receiver swap sees the same product. Frozen with the context,
  // like the PML and weights, so later model iterates keep the same map.
  const auto coupling_gain = [&](const std::array<double, 3>& pos_m) {
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) {
      const double u = (pos_m[a] - m.grid.origin[a]) / m.grid.spacing[a];
      c[a] = std::clamp(int(std::llround(u)), 0, m.grid.dims[a] - 1);
    }
    const std::size_t i = std::size_t(m.grid.index(c[0], c[1], c[2]));
    const double ct = std::abs(
        model::kolsky_futterman_velocity(m.v0[i], m.q[i], f_hz, par.f_ref_hz));
    const double g = ct / (f_hz * ctx.h);
    return 1.0 / std::sqrt(fd::axis_amplitude_response(g));
  };
  ctx.src_cpl.reserve(acq.sources.size());
  for (const auto& p : acq.sources) {
    ctx.src_cpl.push_back(fd::make_coupling(m.grid, p, par.free_surface));
    ctx.src_cpl.back().gain = coupling_gain(p);
  }
  ctx.rec_cpl.reserve(acq.receivers.size());
  for (const auto& p : acq.receivers) {
    ctx.rec_cpl.push_back(fd::make_coupling(m.grid, p, par.free_surface));
    ctx.rec_cpl.back().gain = coupling_gain(p);
  }
  return ctx;
}

double misfit(const FreqGather& obs, const Eigen::MatrixXcd& d_sim) {
  if (d_sim.rows() != obs.n_rec || d_sim.cols() != obs.n_src)
    throw ConfigError("misfit: simulated gather shape does not match");
  double j = 0.0;
  for (int s = 0; s < obs.n_src; ++s)
    for (int r = 0; r < obs.n_rec; ++r) {
      if (!obs.live(s, r)) continue;
      const cdouble d = d_sim(r, s) - cdouble(obs.at(s, r));
      j += std::norm(d);
    }
  return 0.5 * j;
}

cdouble estimate_signature(const FreqGather& obs, int s,
                           const Eigen::VectorXcd& unit_trace) {
  if (unit_trace.size() != obs.n_rec)
    throw ConfigError("signature: trace length does not match the gather");
  cdouble num(0.0, 0.0);
  double den = 0.0;
  for (int r = 0; r < obs.n_rec; ++r) {
    if (!obs.live(s, r)) continue;
    num += std::conj(unit_trace[r]) * cdouble(obs.at(s, r));
    den += std::norm(unit_trace[r]);
  }
  if (!(den > 0.0)) return cdouble(0.0, 0.0);
  return num / den;
}

namespace {

// unit wavefields for all sources: columns of A^-1 S, S the Hicks columns
template <class Scalar>
Eigen::MatrixXcd solve_units(const StageContext& ctx,
                             const fd::ImpedanceMatrix& A,
                             const mf::Factorization<Scalar>& fact,
                             mf::SolveStats* stats) {
  const std::int64_t n = A.n;
  const int ns = int(ctx.src_cpl.size());
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, ns);
  for (int s = 0; s < ns; ++s) {
    const auto& c = ctx.src_cpl[s];
    for (std::size_t k = 0; k < c.index.size(); ++k)
      P(c.index[k], s) += cdouble(c.gain * c.coef[k], 0.0);
  }
  mf::SolveOptions sopt;
  sopt.rhs_block = ctx.rhs_block;
  mf::solve_in_place(fact, ctx.tree, P, sopt, stats);
  return P;
}

Eigen::MatrixXcd sample_traces(const StageContext& ctx,
                               const Eigen::MatrixXcd& P) {
  const int ns = int(P.cols());
  const int nr = int(ctx.rec_cpl.size());
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(nr, ns);
  for (int r = 0; r < nr; ++r) {
    const auto& c = ctx.rec_cpl[r];
    for (std::size_t k = 0; k < c.index.size(); ++k)
      d.row(r) += c.gain * c.coef[k] * P.row(c.index[k]);
  }
  return d;
}

} // namespace

template <class Scalar>
Evaluation<Scalar> evaluate(const StageContext& ctx, const model::VtiModel& m,
                            const FreqGather& obs) {
  obs.validate();
  if (obs.n_src != int(ctx.src_cpl.size()) ||
      obs.n_rec != int(ctx.rec_cpl.size()))
    throw ConfigError("evaluate: gather does not match the stage acquisition");
  if (m.grid.dims != ctx.grid.dims)
    throw ConfigError("evaluate: model grid does not match the stage");
  Evaluation<Scalar> ev;
  ev.A = fd::assemble_operator(m, ctx.omega, ctx.pml, ctx.weights,
                               ctx.free_surface, ctx.f_ref_hz);
  ev.fact = mf::factorize<Scalar>(ev.A, ctx.tree, ctx.symb, ctx.fopt);
  ev.fstats = ev.fact.stats;
  ev.P = solve_units(ctx, ev.A, ev.fact, &ev.sstats);
  ev.d_unit = sample_traces(ctx, ev.P);

  const int ns = obs.n_src;
  const int nr = obs.n_rec;
  ev.signature.resize(std::size_t(ns));
  ev.residual = Eigen::MatrixXcd::Zero(nr, ns);
  double j = 0.0;
  for (int s = 0; s < ns; ++s) {
    // a source with no live energy in its unit traces cannot be fitted;
    // it gets signature 0 and sits out this evaluation entirely
    double den = 0.0;
    for (int r = 0; r < nr; ++r)
      if (obs.live(s, r)) den += std::norm(ev.d_unit(r, s));
    if (!(den > 0.0)) {
      ev.signature[std::size_t(s)] = cdouble(0.0, 0.0);
      continue;
    }
    const cdouble sig =
        ctx.estimate_signatures
            ? estimate_signature(obs, s, ev.d_unit.col(s))
            : cdouble(obs.signature[std::size_t(s)]);
    ev.signature[std::size_t(s)] = sig;
    for (int r = 0; r < nr; ++r) {
      if (!obs.live(s, r)) continue;
      const cdouble d = sig * ev.d_unit(r, s) - cdouble(obs.at(s, r));
      ev.residual(r, s) = d;
      j += std::norm(d);
    }
  }
  ev.J = 0.5 * j;
  return ev;
}

template <class Scalar>
Eigen::MatrixXcd simulate(const StageContext& ctx, const model::VtiModel& m,
                          const std::vector<cdouble>& signature,
                          mf::FactorStats* fstats, mf::SolveStats* sstats) {
  if (signature.size() != ctx.src_cpl.size())
    throw ConfigError("simulate: one signature per source required");
  if (m.grid.dims != ctx.grid.dims)
    throw ConfigError("simulate: model grid does not match the stage");
  const fd::ImpedanceMatrix A = fd::assemble_operator(
      m, ctx.omega, ctx.pml, ctx.weights, ctx.free_surface, ctx.f_ref_hz);
  const auto fact = mf::factorize<Scalar>(A, ctx.tree, ctx.symb, ctx.fopt);
  if (fstats) *fstats = fact.stats;
  Eigen::MatrixXcd P = solve_units(ctx, A, fact, sstats);
  Eigen::MatrixXcd d = sample_traces(ctx, P);
  for (int s = 0; s < d.cols(); ++s) d.col(s) *= signature[std::size_t(s)];
  return d;
}

template struct Evaluation<std::complex<float>>;
template struct Evaluation<std::complex<double>>;
template Evaluation<std::complex<float>> evaluate(const StageContext&,
                                                  const model::VtiModel&,
                                                  const FreqGather&);
template Evaluation<std::complex<double>> evaluate(const StageContext&,
                                                   const model::VtiModel&,
                                                   const FreqGather&);
template Eigen::MatrixXcd simulate<std::complex<float>>(
    const StageContext&, const model::VtiModel&, const std::vector<cdouble>&,
    mf::FactorStats*, mf::SolveStats*);
template Eigen::MatrixXcd simulate<std::complex<double>>(
    const StageContext&, const model::VtiModel&, const std::vector<cdouble>&,
    mf::FactorStats*, mf::SolveStats*);

} // namespace horst::fwi
