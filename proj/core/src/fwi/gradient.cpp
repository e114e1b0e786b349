#include "horst/fwi/gradient.hpp"

#include <array>

#include "horst/common/error.hpp"

namespace horst::fwi {

namespace {

constexpr std::array<std::array<int, 3>, 6> kAxisNbr = {{{1, 0, 0},
                                                         {-1, 0, 0},
                                                         {0, 1, 0},
                                                         {0, -1, 0},
                                                         {0, 0, 1},
                                                         {0, 0, -1}}};
constexpr std::array<std::array<int, 3>, 12> kEdgeNbr = {{{1, 1, 0},
                                                          {1, -1, 0},
                                                          {-1, 1, 0},
                                                          {-1, -1, 0},
                                                          {1, 0, 1},
                                                          {1, 0, -1},
                                                          {-1, 0, 1},
                                                          {-1, 0, -1},
                                                          {0, 1, 1},
                                                          {0, 1, -1},
                                                          {0, -1, 1},
                                                          {0, -1, -1}}};
constexpr std::array<std::array<int, 3>, 8> kCornerNbr = {{{1, 1, 1},
                                                           {1, 1, -1},
                                                           {1, -1, 1},
                                                           {1, -1, -1},
                                                           {-1, 1, 1},
                                                           {-1, 1, -1},
                                                           {-1, -1, 1},
                                                           {-1, -1, -1}}};

} // namespace

template <class Scalar>
std::vector<double> gradient(const StageContext& ctx, const model::VtiModel& m,
                             const FreqGather& obs,
                             const Evaluation<Scalar>& ev,
                             mf::SolveStats* sstats) {
  if (ev.fact.fronts.empty())
    throw ConfigError("gradient requires a factorized evaluation");
  if (m.grid.dims != ctx.grid.dims)
    throw ConfigError("gradient: model grid does not match the stage");
  const Grid3& g = ctx.grid;
  const std::int64_t n = g.size();
  const int ns = obs.n_src;
  const int nr = obs.n_rec;

  // adjoint loads: conjugated residuals scattered through the receiver
  // couplings, one column per source, solved against the same factors
  Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(n, ns);
  for (int s = 0; s < ns; ++s)
    for (int r = 0; r < nr; ++r) {
      const cdouble a = std::conj(ev.residual(r, s));
      if (a == cdouble(0.0, 0.0)) continue;
      const auto& c = ctx.rec_cpl[std::size_t(r)];
      for (std::size_t k = 0; k < c.index.size(); ++k)
        lam(c.index[k], s) += c.gain * c.coef[k] * a;
    }
  mf::SolveOptions sopt;
  sopt.rhs_block = ctx.rhs_block;
  mf::solve_in_place(ev.fact, ctx.tree, lam, sopt, sstats);

  // transposed layouts make the per-entry source reductions contiguous
  Eigen::MatrixXcd lam_t = lam.transpose();
  lam.resize(0, 0);
  Eigen::MatrixXcd ps_t(ns, n);
  for (int s = 0; s < ns; ++s)
    ps_t.row(s) = ev.signature[std::size_t(s)] * ev.P.col(s).transpose();

  const auto pair_sum = [&](std::int64_t i, std::int64_t j) {
    return (lam_t.col(i).array() * ps_t.col(j).array()).sum();
  };

  const fd::AssemblyFields fl = fd::make_assembly_fields(
      m, ctx.omega, ctx.pml, ctx.free_surface, ctx.f_ref_hz);
  const auto& wf = ctx.weights;
  const cdouble om2 = ctx.omega * ctx.omega;

  std::vector<double> grad(std::size_t(n), 0.0);
  const auto valid = [&](int ix, int iy, int iz) {
    return g.contains(ix, iy, iz) && !fl.dirichlet(iz);
  };
  const auto wavg = [&](double fd::StencilWeights::*mem, std::size_t i,
                        std::int64_t j) {
    return 0.5 * (wf.w[i].*mem + wf.w[std::size_t(j)].*mem);
  };
  // d mass / d v0 = -2 mass / v0 and d kappa0 / d v0 = 2 kappa0 / v0; the
  // loops below mirror the assembly entry by entry with those factors
  const auto mass_pair = [&](std::size_t i, std::int64_t j, cdouble coef) {
    const cdouble s = pair_sum(std::int64_t(i), j);
    grad[i] -= (coef * fl.mass[i] * (-2.0 * fl.inv_v0[i]) * s).real();
    grad[std::size_t(j)] -=
        (coef * fl.mass[std::size_t(j)] * (-2.0 * fl.inv_v0[std::size_t(j)]) * s)
            .real();
  };
  const auto ane_accum = [&](const std::array<fd::AneTerm, 2>& t, int cnt,
                             double half, cdouble s) {
    for (int k = 0; k < cnt; ++k) {
      const std::size_t c = std::size_t(t[std::size_t(k)].kcell);
      grad[c] -= (half * t[std::size_t(k)].value * 2.0 * fl.inv_v0[c] * s).real();
    }
  };

  std::array<fd::AneTerm, 2> terms;
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int iz = 0; iz < g.nz(); ++iz) {
        if (fl.dirichlet(iz)) continue;
        const std::size_t i = std::size_t(g.index(ix, iy, iz));

        {
          const cdouble s = pair_sum(std::int64_t(i), std::int64_t(i));
          grad[i] -= (om2 * wf.w[i].wm_center * fl.mass[i] *
                      (-2.0 * fl.inv_v0[i]) * s)
                         .real();
        }
        for (const auto& d : kAxisNbr) {
          const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
          if (!valid(jx, jy, jz)) continue;
          const std::int64_t j = g.index(jx, jy, jz);
          mass_pair(i, j,
                    om2 * wavg(&fd::StencilWeights::wm_face, i, j) * 0.5 / 6.0);
        }
        for (const auto& d : kEdgeNbr) {
          const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
          if (!valid(jx, jy, jz)) continue;
          const std::int64_t j = g.index(jx, jy, jz);
          mass_pair(i, j,
                    om2 * wavg(&fd::StencilWeights::wm_edge, i, j) * 0.5 / 12.0);
        }
        for (const auto& d : kCornerNbr) {
          const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
          if (!valid(jx, jy, jz)) continue;
          const std::int64_t j = g.index(jx, jy, jz);
          mass_pair(i, j,
                    om2 * wavg(&fd::StencilWeights::wm_corner, i, j) * 0.5 / 8.0);
        }

        const std::array<int, 3> ci{ix, iy, iz};
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy) {
            if (dx != 0 && dy != 0) continue;
            for (int dz = -1; dz <= 1; ++dz) {
              const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
              if (dx == 0 && dy == 0 && dz == 0) {
                const cdouble s = pair_sum(std::int64_t(i), std::int64_t(i));
                const int cnt = fd::anelliptic_terms(fl, ci, ci, terms);
                ane_accum(terms, cnt, 1.0, s);
                continue;
              }
              if (!valid(jx, jy, jz)) continue;
              const std::array<int, 3> cj{jx, jy, jz};
              const std::int64_t j = g.index(jx, jy, jz);
              const cdouble s = pair_sum(std::int64_t(i), j);
              int cnt = fd::anelliptic_terms(fl, ci, cj, terms);
              ane_accum(terms, cnt, 0.5, s);
              cnt = fd::anelliptic_terms(fl, cj, ci, terms);
              ane_accum(terms, cnt, 0.5, s);
            }
          }
      }
  return grad;
}

template std::vector<double> gradient(const StageContext&,
                                      const model::VtiModel&,
                                      const FreqGather&,
                                      const Evaluation<std::complex<float>>&,
                                      mf::SolveStats*);
template std::vector<double> gradient(const StageContext&,
                                      const model::VtiModel&,
                                      const FreqGather&,
                                      const Evaluation<std::complex<double>>&,
                                      mf::SolveStats*);

} // namespace horst::fwi
