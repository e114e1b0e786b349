#include "horst/fwi/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "horst/common/error.hpp"
#include "horst/model/model_io.hpp"

namespace horst::fwi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::uint8_t> water_mask(const model::VtiModel& m) {
  const Grid3& g = m.grid;
  std::vector<std::uint8_t> wm(std::size_t(g.size()), 0);
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int iz = 0; iz < g.nz(); ++iz)
        if (m.water(ix, iy, iz)) wm[std::size_t(g.index(ix, iy, iz))] = 1;
  return wm;
}

double live_data_energy(const FreqGather& obs) {
  double e = 0.0;
  for (int s = 0; s < obs.n_src; ++s)
    for (int r = 0; r < obs.n_rec; ++r)
      if (obs.live(s, r)) e += std::norm(cdouble(obs.at(s, r)));
  return 0.5 * e;
}

} // namespace

template <class Scalar>
StageResult invert_frequency(const StageContext& ctx, const model::VtiModel& m0,
                             const FreqGather& obs, const InversionConfig& cfg,
                             int max_iter, int cycle, int stage) {
  if (!(cfg.v_min > 0) || !(cfg.v_max > cfg.v_min))
    throw ConfigError("invert_frequency: bad velocity bounds");
  const auto t0 = Clock::now();
  StageResult res;
  res.m = m0;

  model::VtiModel m = m0;
  const std::int64_t n = ctx.grid.size();
  const std::vector<std::uint8_t> frozen = water_mask(m);
  const auto project = [&](std::vector<double> raw) {
    Eigen::VectorXd v(n);
    for (std::int64_t i = 0; i < n; ++i)
      v[i] = frozen[std::size_t(i)] ? 0.0 : raw[std::size_t(i)];
    return v;
  };
  const auto stepped = [&](const Eigen::VectorXd& d, double a) {
    model::VtiModel t = m;
    for (std::int64_t i = 0; i < n; ++i) {
      if (frozen[std::size_t(i)]) continue;
      t.v0[std::size_t(i)] =
          std::clamp(m.v0[std::size_t(i)] + a * d[i], cfg.v_min, cfg.v_max);
    }
    return t;
  };

  int n_facto = 0;
  try {
    double J;
    Eigen::VectorXd g;
    {
      const auto ev = evaluate<Scalar>(ctx, m, obs);
      ++n_facto;
      g = project(gradient(ctx, m, obs, ev));
      J = ev.J;
    }
    res.rows.push_back({cycle, stage, ctx.f_hz, 0, J,
                        g.lpNorm<Eigen::Infinity>(), 0.0, n_facto,
                        seconds_since(t0)});
    const double floor = cfg.data_floor_rel * live_data_energy(obs);
    if (J <= floor) {
      res.m = std::move(m);
      return res;
    }

    LbfgsMemory mem(cfg.lbfgs_m, cfg.init_step);
    model::VtiModel trial_m;
    Eigen::VectorXd trial_g;
    for (int it = 1; it <= max_iter; ++it) {
      Eigen::VectorXd d = mem.direction(g);
      double dg = d.dot(g);
      if (!(dg < 0.0)) {
        // stale curvature can spoil the direction; retry from steepest
        // descent once, then give up on the stage
        mem.clear();
        d = mem.direction(g);
        dg = d.dot(g);
        if (!(dg < 0.0)) break;
      }
      const auto phi = [&](double a, double* slope) {
        trial_m = stepped(d, a);
        const auto ev = evaluate<Scalar>(ctx, trial_m, obs);
        ++n_facto;
        trial_g = project(gradient(ctx, trial_m, obs, ev));
        *slope = d.dot(trial_g);
        return ev.J;
      };
      const LineSearchResult ls = wolfe_line_search(phi, J, dg, cfg.wolfe);
      if (!(ls.alpha > 0.0)) break;  // nothing decreased: treat as converged

      Eigen::VectorXd s(n);
      for (std::int64_t i = 0; i < n; ++i)
        s[i] = trial_m.v0[std::size_t(i)] - m.v0[std::size_t(i)];
      mem.push(s, trial_g - g);
      m = std::move(trial_m);
      const double j_prev = J;
      J = ls.J;
      g = std::move(trial_g);
      res.rows.push_back({cycle, stage, ctx.f_hz, it, J,
                          g.lpNorm<Eigen::Infinity>(),
                          s.lpNorm<Eigen::Infinity>(), n_facto,
                          seconds_since(t0)});
      if (J <= floor) break;
      if (j_prev - J < cfg.stop_rel * j_prev) break;
    }
    res.m = std::move(m);
  } catch (const NumericError& e) {
    res.aborted = true;
    res.abort_reason = e.what();
    res.m = std::move(m);  // latest accepted iterate survives the abort
  }
  return res;
}

template <class Scalar>
ContinuationResult run_continuation(const model::FrequencyPlan& plan,
                                    const FreqDataset& data,
                                    const model::VtiModel& m0,
                                    const InversionConfig& cfg,
                                    const std::string& out_dir) {
  m0.validate();
  if (plan.stages.empty()) throw ConfigError("continuation plan is empty");
  const double v_min_model =
      *std::min_element(m0.v0.begin(), m0.v0.end());
  plan.validate(v_min_model);
  for (const auto& st : plan.stages)
    if (!data.find(st.f_hz))
      throw ConfigError("dataset has no gather at " + std::to_string(st.f_hz) +
                        " Hz required by the plan");

  ContinuationResult out;
  model::VtiModel m = m0;
  for (int cyc = 1; cyc <= plan.cycles; ++cyc) {
    for (int si = 0; si < int(plan.stages.size()); ++si) {
      const model::PlanStage& st = plan.stages[std::size_t(si)];
      m = model::resample_model(m, st.h_m);
      const FreqGather* obs = data.find(st.f_hz);
      const StageContext ctx =
          make_stage_context(m, st.f_hz, data.acq, cfg.stage);
      StageResult sr =
          invert_frequency<Scalar>(ctx, m, *obs, cfg, st.max_iter, cyc, si);
      out.history.insert(out.history.end(), sr.rows.begin(), sr.rows.end());
      m = std::move(sr.m);
      if (!out_dir.empty())
        model::save_model(m, out_dir + "/model_c" + std::to_string(cyc) +
                                 "_s" + std::to_string(si) + ".fdm");
      if (sr.aborted) {
        out.aborted = true;
        out.abort_reason = sr.abort_reason;
        out.m = std::move(m);
        return out;
      }
    }
  }
  out.m = std::move(m);
  return out;
}

void write_history_csv(const std::vector<HistoryRow>& rows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write history file: " + path);
  out << "cycle,stage,freq_hz,iter,J,grad_norm,step_len,n_facto,wall_s\n";
  out.precision(12);
  for (const auto& r : rows)
    out << r.cycle << ',' << r.stage << ',' << r.freq_hz << ',' << r.iter
        << ',' << r.J << ',' << r.grad_norm << ',' << r.step_len << ','
        << r.n_facto << ',' << r.wall_s << "\n";
  if (!out) throw IoError("write failed for history file: " + path);
}

template StageResult invert_frequency<std::complex<float>>(
    const StageContext&, const model::VtiModel&, const FreqGather&,
    const InversionConfig&, int, int, int);
template StageResult invert_frequency<std::complex<double>>(
    const StageContext&, const model::VtiModel&, const FreqGather&,
    const InversionConfig&, int, int, int);
template ContinuationResult run_continuation<std::complex<float>>(
    const model::FrequencyPlan&, const FreqDataset&, const model::VtiModel&,
    const InversionConfig&, const std::string&);
template ContinuationResult run_continuation<std::complex<double>>(
    const model::FrequencyPlan&, const FreqDataset&, const model::VtiModel&,
    const InversionConfig&, const std::string&);

} // namespace horst::fwi
