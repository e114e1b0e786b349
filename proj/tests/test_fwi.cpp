#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "horst/common/error.hpp"
#include "horst/fwi/dataset.hpp"
#include "horst/fwi/inversion.hpp"
#include "horst/fwi/lbfgs.hpp"
#include "horst/fwi/objective.hpp"
#include "horst/fwi/tv.hpp"

using namespace horst;
using fwi::cdouble;
using cd = std::complex<double>;

namespace {

std::string tmp_path(const char* name) {
  return std::string("/tmp/horst_fwi_") + name;
}

fwi::FreqDataset random_dataset(std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  fwi::FreqDataset d;
  for (double f : {3.0, 4.5}) {
    fwi::FreqGather g = fwi::FreqGather::sized(f, 5, 17);
    for (auto& z : g.data) z = {u(rng), u(rng)};
    for (auto& z : g.signature) z = {u(rng), u(rng)};
    for (int s = 0; s < g.n_src; ++s)
      for (int r = 0; r < g.n_rec; ++r)
        if (rng() % 4 == 0) g.set_live(s, r, false);
    d.gathers.push_back(std::move(g));
  }
  return d;
}

} // namespace

TEST_CASE("gather container round-trips bit exactly") {
  const fwi::FreqDataset d = random_dataset(71);
  const std::string p1 = tmp_path("rt.fdg"), p2 = tmp_path("rt2.fdg");
  fwi::save_gathers(d, p1);
  const fwi::FreqDataset e = fwi::load_gathers(p1);
  REQUIRE(e.gathers.size() == d.gathers.size());
  for (std::size_t k = 0; k < d.gathers.size(); ++k) {
    const auto& a = d.gathers[k];
    const auto& b = e.gathers[k];
    CHECK(a.f_hz == b.f_hz);
    CHECK(a.n_src == b.n_src);
    CHECK(a.n_rec == b.n_rec);
    CHECK(a.mask == b.mask);
    REQUIRE(a.signature.size() == b.signature.size());
    REQUIRE(a.data.size() == b.data.size());
    CHECK(std::memcmp(a.signature.data(), b.signature.data(),
                      a.signature.size() * sizeof(std::complex<float>)) == 0);
    CHECK(std::memcmp(a.data.data(), b.data.data(),
                      a.data.size() * sizeof(std::complex<float>)) == 0);
  }
  // saving the loaded copy reproduces the file byte for byte
  fwi::save_gathers(e, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK(!s1.empty());
}

TEST_CASE("truncated and corrupt gather files name the byte offset") {
  const fwi::FreqDataset d = random_dataset(5);
  const std::string p = tmp_path("trunc.fdg");
  fwi::save_gathers(d, p);
  std::ifstream in(p, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  in.close();

  const std::string pt = tmp_path("trunc_cut.fdg");
  std::ofstream out(pt, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size() - 7));
  out.close();
  bool threw = false;
  try {
    fwi::load_gathers(pt);
  } catch (const horst::IoError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
  }
  CHECK(threw);

  const std::string pb = tmp_path("badmagic.fdg");
  std::ofstream ob(pb, std::ios::binary | std::ios::trunc);
  ob << "NOPE" << bytes.substr(4);
  ob.close();
  CHECK_THROWS_AS(fwi::load_gathers(pb), horst::IoError);
}

TEST_CASE("acquisition sidecar round-trips exactly") {
  fwi::Acquisition a;
  a.reciprocal = true;
  a.sources = {{12.5, 800.0 / 3.0, 55.125}, {0.1, 0.2, 0.3}};
  a.receivers = {{1e4, 2e3, 37.5}, {5.0, 6.0, 7.0}, {8.0, 9.0, 10.0}};
  const std::string p = tmp_path("acq.json");
  fwi::save_acquisition(a, p);
  const fwi::Acquisition b = fwi::load_acquisition(p);
  REQUIRE(b.sources.size() == a.sources.size());
  REQUIRE(b.receivers.size() == a.receivers.size());
  CHECK(b.reciprocal == a.reciprocal);
  for (std::size_t i = 0; i < a.sources.size(); ++i)
    for (int c = 0; c < 3; ++c) CHECK(b.sources[i][c] == a.sources[i][c]);
  for (std::size_t i = 0; i < a.receivers.size(); ++i)
    for (int c = 0; c < 3; ++c) CHECK(b.receivers[i][c] == a.receivers[i][c]);
}

TEST_CASE("misfit definition") {
  SUBCASE("perfect fit gives zero") {
    fwi::FreqGather g = fwi::FreqGather::sized(2.0, 2, 3);
    std::mt19937 rng(9);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (auto& z : g.data) z = {u(rng), u(rng)};
    Eigen::MatrixXcd sim(3, 2);
    for (int s = 0; s < 2; ++s)
      for (int r = 0; r < 3; ++r) sim(r, s) = cd(g.at(s, r));
    CHECK(fwi::misfit(g, sim) == 0.0);
  }
  SUBCASE("single trace residual 3+4i") {
    fwi::FreqGather g = fwi::FreqGather::sized(2.0, 1, 1);
    g.at(0, 0) = {0.0f, 0.0f};
    Eigen::MatrixXcd sim(1, 1);
    sim(0, 0) = cd(3.0, 4.0);
    CHECK(fwi::misfit(g, sim) == doctest::Approx(12.5).epsilon(1e-15));
  }
  SUBCASE("matches a brute-force masked sum") {
    fwi::FreqGather g = random_dataset(13).gathers[0];
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Eigen::MatrixXcd sim(g.n_rec, g.n_src);
    for (int s = 0; s < g.n_src; ++s)
      for (int r = 0; r < g.n_rec; ++r) sim(r, s) = cd(u(rng), u(rng));
    double ref = 0.0;
    for (int r = g.n_rec - 1; r >= 0; --r)
      for (int s = g.n_src - 1; s >= 0; --s)
        if (g.live(s, r)) ref += 0.5 * std::norm(sim(r, s) - cd(g.at(s, r)));
    CHECK(fwi::misfit(g, sim) == doctest::Approx(ref).epsilon(1e-14));
  }
  SUBCASE("shape mismatch throws") {
    fwi::FreqGather g = fwi::FreqGather::sized(2.0, 2, 3);
    Eigen::MatrixXcd sim(2, 3);
    CHECK_THROWS_AS(fwi::misfit(g, sim), horst::ConfigError);
  }
}

TEST_CASE("signature estimation") {
  fwi::FreqGather g = fwi::FreqGather::sized(1.0, 1, 6);
  Eigen::VectorXcd unit(6);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int r = 0; r < 6; ++r) unit[r] = cd(u(rng), u(rng));

  SUBCASE("recovers an exact scalar multiple") {
    for (int r = 0; r < 6; ++r) g.at(0, r) = std::complex<float>(2.0 * unit[r]);
    // obs is float-rounded, so recovery is to float precision
    const cdouble s = fwi::estimate_signature(g, 0, unit);
    CHECK(std::abs(s - cd(2.0, 0.0)) <= 1e-6);
  }
  SUBCASE("orthogonal data gives exactly zero") {
    fwi::FreqGather h = fwi::FreqGather::sized(1.0, 1, 2);
    Eigen::VectorXcd v(2);
    v << cd(1.0, 0.0), cd(0.0, 0.0);
    h.at(0, 0) = {0.0f, 0.0f};
    h.at(0, 1) = {1.0f, 0.0f};
    CHECK(fwi::estimate_signature(h, 0, v) == cd(0.0, 0.0));
  }
  SUBCASE("all-dead source gives zero") {
    for (int r = 0; r < 6; ++r) g.set_live(0, r, false);
    for (int r = 0; r < 6; ++r) g.at(0, r) = {1.0f, 1.0f};
    CHECK(fwi::estimate_signature(g, 0, unit) == cd(0.0, 0.0));
  }
  SUBCASE("matches the dense normal-equation oracle") {
    for (int r = 0; r < 6; ++r) g.at(0, r) = {float(u(rng)), float(u(rng))};
    g.set_live(0, 2, false);
    Eigen::VectorXcd uu = Eigen::VectorXcd::Zero(6), dd =
        Eigen::VectorXcd::Zero(6);
    for (int r = 0; r < 6; ++r) {
      if (!g.live(0, r)) continue;
      uu[r] = unit[r];
      dd[r] = cd(g.at(0, r));
    }
    const cdouble oracle = uu.dot(dd) / uu.squaredNorm();
    const cdouble s = fwi::estimate_signature(g, 0, unit);
    CHECK(std::abs(s - oracle) <= 1e-12 * std::abs(oracle));
  }
  SUBCASE("scaling d_unit by c maps s to s/c") {
    for (int r = 0; r < 6; ++r) g.at(0, r) = {float(u(rng)), float(u(rng))};
    const cd c(0.3, -1.7);
    const cdouble s1 = fwi::estimate_signature(g, 0, unit);
    const cdouble s2 = fwi::estimate_signature(g, 0, (c * unit.array()).matrix());
    CHECK(std::abs(s2 - s1 / c) <= 1e-12 * std::abs(s1 / c));
    // the modeled data s * d_unit is unchanged
    CHECK(std::abs(s2 * c * unit[0] - s1 * unit[0]) <=
          1e-12 * std::abs(s1 * unit[0]));
  }
}

TEST_CASE("l-BFGS memory and direction") {
  SUBCASE("empty memory returns scaled steepest descent") {
    fwi::LbfgsMemory mem(5, 4.0);
    Eigen::VectorXd g(3);
    g << 1.0, -2.0, 0.5;
    const Eigen::VectorXd d = mem.direction(g);
    for (int i = 0; i < 3; ++i) CHECK(d[i] == -g[i] * 4.0 / 2.0);
  }
  SUBCASE("non-positive curvature pairs are refused") {
    fwi::LbfgsMemory mem(5, 1.0);
    Eigen::VectorXd s(2), y(2);
    s << 1.0, 0.0;
    y << -1.0, 0.0;
    CHECK(!mem.push(s, y));
    CHECK(mem.size() == 0);
    y << 1.0, 0.0;
    CHECK(mem.push(s, y));
    CHECK(mem.size() == 1);
  }
  SUBCASE("quadratic converges within dim + 2 iterations") {
    const int dim = 8;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd b(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) b(i, j) = u(rng);
    const Eigen::MatrixXd hmat =
        b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd xstar(dim);
    for (int i = 0; i < dim; ++i) xstar[i] = u(rng);

    const auto jval = [&](const Eigen::VectorXd& x) {
      return 0.5 * (x - xstar).dot(hmat * (x - xstar));
    };
    const auto jgrad = [&](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(hmat * (x - xstar));
    };

    // Wolfe steps are inexact, so no finite termination; superlinear
    // contraction still reaches machine-level error in a few dozen steps
    const int budget = 40;
    fwi::LbfgsMemory mem(dim, 1.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd g = jgrad(x);
    double j = jval(x);
    int iters = 0;
    for (int it = 0; it < budget; ++it) {
      const Eigen::VectorXd d = mem.direction(g);
      const double dg = d.dot(g);
      REQUIRE(dg < 0.0);  // descent on every call
      Eigen::VectorXd xt;
      Eigen::VectorXd gt;
      const auto phi = [&](double a, double* slope) {
        xt = x + a * d;
        gt = jgrad(xt);
        *slope = d.dot(gt);
        return jval(xt);
      };
      const fwi::LineSearchResult ls = fwi::wolfe_line_search(phi, j, dg);
      REQUIRE(ls.alpha > 0.0);
      // strong Wolfe inequalities, checked directly
      CHECK(ls.J <= j + 1e-4 * ls.alpha * dg);
      CHECK(std::abs(ls.dphi) <= 0.9 * std::abs(dg));
      mem.push(xt - x, gt - g);
      x = xt;
      g = gt;
      j = ls.J;
      ++iters;
      if ((x - xstar).lpNorm<Eigen::Infinity>() <= 1e-9) break;
    }
    CHECK((x - xstar).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(iters <= budget);
  }
}

TEST_CASE("Wolfe line search") {
  SUBCASE("unit step on the model quadratic") {
    const auto phi = [](double a, double* slope) {
      *slope = 2.0 * (a - 1.0);
      return (a - 1.0) * (a - 1.0);
    };
    const fwi::LineSearchResult ls = fwi::wolfe_line_search(phi, 1.0, -2.0);
    CHECK(ls.alpha == doctest::Approx(1.0));
    CHECK(ls.wolfe_ok);
    CHECK(ls.n_eval == 1);
  }
  SUBCASE("ascent direction is a precondition violation") {
    const auto phi = [](double a, double* slope) {
      *slope = 1.0;
      return a;
    };
    CHECK_THROWS_AS(fwi::wolfe_line_search(phi, 0.0, 0.5),
                    horst::NumericError);
    CHECK_THROWS_AS(fwi::wolfe_line_search(phi, 0.0, 0.0),
                    horst::NumericError);
  }
  SUBCASE("exhausted budget falls back with a warning") {
    // tiny budget, giant first step: nothing decreases in one evaluation
    fwi::WolfeOptions opt;
    opt.max_eval = 1;
    opt.alpha0 = 64.0;
    const auto phi = [](double a, double* slope) {
      *slope = 2.0 * a - 1.0;
      return a * (a - 1.0);
    };
    const fwi::LineSearchResult ls =
        fwi::wolfe_line_search(phi, 0.0, -1.0, opt);
    CHECK(ls.warned);
    CHECK(ls.alpha == 0.0);
  }
}

namespace {

struct ToySetup {
  model::VtiModel m_true;
  model::VtiModel m0;
  fwi::Acquisition acq;
  fwi::InversionConfig cfg;
  fwi::FreqDataset data;
  double f_hz = 6.0;
};

// inverse-crime harness: homogeneous start, +6% Gaussian ball in the true
// model, data simulated with the same discretization
ToySetup make_toy(int n = 18, double h = 50.0) {
  static const fd::StencilWeightTable table =
      fd::optimize_stencil_weights(fd::default_g_samples());
  ToySetup t;
  model::VtiModel m;
  m.grid.dims = {n, n, n};
  m.grid.spacing = {h, h, h};
  const std::size_t sz = std::size_t(m.grid.size());
  m.v0.assign(sz, 1500.0);
  m.delta.assign(sz, 0.03);
  m.epsilon.assign(sz, 0.06);
  m.rho.assign(sz, 1900.0);
  m.q.assign(sz, std::numeric_limits<double>::infinity());
  m.water_depth.assign(std::size_t(n) * std::size_t(n), 3);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < 3; ++iz)
        m.v0[std::size_t(m.grid.index(ix, iy, iz))] = 1480.0;
  t.m0 = m;
  t.m_true = m;
  const double cx = 0.5 * (n - 1), cy = 0.5 * (n - 1), cz = 0.55 * (n - 1);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 3; iz < n; ++iz) {
        const double r2 = (ix - cx) * (ix - cx) + (iy - cy) * (iy - cy) +
                          (iz - cz) * (iz - cz);
        t.m_true.v0[std::size_t(m.grid.index(ix, iy, iz))] +=
            90.0 * std::exp(-r2 / 18.0);
      }

  const double ex = (n - 1) * h;
  for (double fx : {0.3, 0.7})
    for (double fy : {0.35, 0.65})
      t.acq.sources.push_back({fx * ex, fy * ex, 0.2 * ex});
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      t.acq.receivers.push_back(
          {(0.15 + 0.7 * i / 4.0) * ex, (0.15 + 0.7 * j / 4.0) * ex, 0.08 * ex});

  t.cfg.stage.f_ref_hz = 10.0;
  t.cfg.stage.free_surface = true;
  t.cfg.stage.fopt.kind = mf::FactorKind::kFullRank;
  t.cfg.stage.table = table;
  t.cfg.init_step = 25.0;
  t.cfg.v_min = 1200.0;
  t.cfg.v_max = 4000.0;

  const fwi::StageContext ctx =
      fwi::make_stage_context(t.m0, t.f_hz, t.acq, t.cfg.stage);
  std::vector<cdouble> sig(t.acq.sources.size());
  for (std::size_t s = 0; s < sig.size(); ++s)
    sig[s] = cd(1.5e3 + 100.0 * double(s), -400.0 + 90.0 * double(s));
  const Eigen::MatrixXcd d = fwi::simulate<cd>(ctx, t.m_true, sig);
  fwi::FreqGather g = fwi::FreqGather::sized(
      t.f_hz, int(t.acq.sources.size()), int(t.acq.receivers.size()));
  for (int s = 0; s < g.n_src; ++s)
    for (int r = 0; r < g.n_rec; ++r)
      g.at(s, r) = std::complex<float>(d(r, s));
  t.data.acq = t.acq;
  t.data.gathers.push_back(std::move(g));
  return t;
}

} // namespace

TEST_CASE("mono-frequency inversion on the toy anomaly") {
  ToySetup t = make_toy();
  const fwi::StageContext ctx =
      fwi::make_stage_context(t.m0, t.f_hz, t.acq, t.cfg.stage);
  const fwi::StageResult res = fwi::invert_frequency<cd>(
      ctx, t.m0, t.data.gathers[0], t.cfg, 15, 1, 0);
  REQUIRE(!res.aborted);
  REQUIRE(res.rows.size() >= 2);
  const double j0 = res.rows.front().J;
  const double jf = res.rows.back().J;
  CHECK(jf <= 0.1 * j0);
  // misfit never increases across accepted steps
  for (std::size_t k = 1; k < res.rows.size(); ++k)
    CHECK(res.rows[k].J <= res.rows[k - 1].J);
  // water column frozen, passive grids untouched
  const Grid3& g = t.m0.grid;
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int iz = 0; iz < 3; ++iz) {
        const std::size_t i = std::size_t(g.index(ix, iy, iz));
        REQUIRE(res.m.v0[i] == t.m0.v0[i]);
      }
  CHECK(res.m.delta == t.m0.delta);
  CHECK(res.m.epsilon == t.m0.epsilon);
  CHECK(res.m.rho == t.m0.rho);
  CHECK(res.m.q == t.m0.q);
  CHECK(res.m.water_depth == t.m0.water_depth);
  // the update moved toward the true anomaly
  double err0 = 0.0, errf = 0.0;
  for (std::size_t i = 0; i < t.m0.v0.size(); ++i) {
    err0 += (t.m0.v0[i] - t.m_true.v0[i]) * (t.m0.v0[i] - t.m_true.v0[i]);
    errf += (res.m.v0[i] - t.m_true.v0[i]) * (res.m.v0[i] - t.m_true.v0[i]);
  }
  CHECK(errf < err0);
}

TEST_CASE("inverse-crime data from the start model converges immediately") {
  ToySetup t = make_toy();
  const fwi::StageContext ctx =
      fwi::make_stage_context(t.m0, t.f_hz, t.acq, t.cfg.stage);
  // observations regenerated from the starting model itself
  const auto ev = fwi::evaluate<cd>(ctx, t.m0, t.data.gathers[0]);
  fwi::FreqGather crime = t.data.gathers[0];
  for (int s = 0; s < crime.n_src; ++s)
    for (int r = 0; r < crime.n_rec; ++r)
      crime.at(s, r) =
          std::complex<float>(ev.signature[std::size_t(s)] * ev.d_unit(r, s));
  const fwi::StageResult res =
      fwi::invert_frequency<cd>(ctx, t.m0, crime, t.cfg, 15, 1, 0);
  REQUIRE(!res.aborted);
  CHECK(res.rows.size() == 1);  // converged at the initial check
  CHECK(res.m.v0 == t.m0.v0);
}

TEST_CASE("continuation drives the stages") {
  ToySetup t = make_toy();
  model::FrequencyPlan plan;
  plan.stages = {{t.f_hz, t.m0.grid.spacing[0], 15}};
  plan.cycles = 1;

  SUBCASE("missing frequency fails before any work") {
    model::FrequencyPlan bad = plan;
    bad.stages[0].f_hz = 7.77;
    bad.stages[0].h_m = 45.0;
    CHECK_THROWS_AS(
        fwi::run_continuation<cd>(bad, t.data, t.m0, t.cfg, ""),
        horst::ConfigError);
  }
  SUBCASE("one cycle, one stage equals invert_frequency") {
    const fwi::ContinuationResult cr =
        fwi::run_continuation<cd>(plan, t.data, t.m0, t.cfg, "");
    REQUIRE(!cr.aborted);
    const fwi::StageContext ctx =
        fwi::make_stage_context(t.m0, t.f_hz, t.acq, t.cfg.stage);
    const fwi::StageResult sr = fwi::invert_frequency<cd>(
        ctx, t.m0, t.data.gathers[0], t.cfg, 15, 1, 0);
    REQUIRE(cr.history.size() == sr.rows.size());
    for (std::size_t k = 0; k < sr.rows.size(); ++k)
      CHECK(cr.history[k].J == sr.rows[k].J);
    CHECK(cr.m.v0 == sr.m.v0);
  }
  SUBCASE("a second cycle does not lose ground") {
    model::FrequencyPlan two = plan;
    two.cycles = 2;
    const fwi::ContinuationResult cr =
        fwi::run_continuation<cd>(two, t.data, t.m0, t.cfg, "");
    REQUIRE(!cr.aborted);
    double j1 = -1.0, j2 = -1.0;
    for (const auto& r : cr.history) {
      if (r.cycle == 1) j1 = r.J;
      if (r.cycle == 2) j2 = r.J;
    }
    REQUIRE(j1 >= 0.0);
    REQUIRE(j2 >= 0.0);
    CHECK(j2 <= j1);
  }
}

TEST_CASE("history CSV has the expected columns") {
  std::vector<fwi::HistoryRow> rows = {
      {1, 0, 6.0, 0, 12.5, 3.0, 0.0, 1, 0.25},
      {1, 0, 6.0, 1, 6.25, 1.5, 10.0, 3, 0.75}};
  const std::string p = tmp_path("hist.csv");
  fwi::write_history_csv(rows, p);
  std::ifstream in(p);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "cycle,stage,freq_hz,iter,J,grad_norm,step_len,n_facto,wall_s");
  int n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  CHECK(n == 2);
}

TEST_CASE("TV denoising") {
  Grid3 g;
  g.dims = {12, 10, 9};
  g.spacing = {10.0, 10.0, 10.0};
  const std::size_t n = std::size_t(g.size());

  SUBCASE("lambda zero is the identity") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> m(n);
    for (auto& v : m) v = u(rng);
    const std::vector<double> out = fwi::tv_denoise(g, m, 0.0);
    CHECK(out == m);
  }
  SUBCASE("constant input is a fixed point for any lambda") {
    std::vector<double> m(n, 1234.5);
    for (double lam : {1e-3, 1.0, 50.0}) {
      const std::vector<double> out = fwi::tv_denoise(g, m, lam);
      CHECK(out == m);
    }
  }
  SUBCASE("noisy step profile improves TV and objective") {
    std::mt19937 rng(6);
    std::normal_distribution<double> noise(0.0, 0.15);
    std::vector<double> m(n);
    for (int ix = 0; ix < g.nx(); ++ix)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int iz = 0; iz < g.nz(); ++iz)
          m[std::size_t(g.index(ix, iy, iz))] =
              (ix < g.nx() / 2 ? 0.0 : 1.0) + noise(rng);
    const double lam = 0.4;
    const std::vector<double> out = fwi::tv_denoise(g, m, lam);
    const double tv_in = fwi::total_variation(g, m);
    const double tv_out = fwi::total_variation(g, out);
    CHECK(tv_out < tv_in);
    double fit = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      fit += 0.5 * (out[i] - m[i]) * (out[i] - m[i]);
    CHECK(fit + lam * tv_out <= lam * tv_in);
  }
}
