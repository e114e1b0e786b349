#include "horst/cli/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <random>

#include <Eigen/Dense>

#include "horst/common/error.hpp"
#include "horst/fd/assemble.hpp"
#include "horst/fd/hicks.hpp"
#include "horst/fd/pml.hpp"
#include "horst/mf/factorize.hpp"
#include "horst/mf/solve.hpp"
#include "horst/mf/symbolic.hpp"
#include "horst/mf/tree.hpp"

namespace horst::cli {

using cf = std::complex<float>;

namespace {

constexpr double kV0 = 1500.0, kRho = 1000.0;

model::VtiModel cube_model(int n, double h) {
  model::VtiModel m;
  m.grid.dims = {n, n, n};
  m.grid.spacing = {h, h, h};
  const std::size_t sz = std::size_t(m.grid.size());
  m.v0.assign(sz, kV0);
  m.delta.assign(sz, 0.0);
  m.epsilon.assign(sz, 0.0);
  m.rho.assign(sz, kRho);
  m.q.assign(sz, std::numeric_limits<double>::infinity());
  m.water_depth.assign(std::size_t(n) * std::size_t(n), 0);
  return m;
}

// deterministic octant cluster of off-grid points, one per RHS column
Eigen::MatrixXcd clustered_rhs(const Grid3& g, int cols) {
  std::mt19937 rng(20240915u);
  std::uniform_real_distribution<double> u(0.55, 0.9);
  const auto ext = g.extent();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(g.size(), cols);
  for (int c = 0; c < cols; ++c) {
    const std::array<double, 3> pos = {u(rng) * ext[0], u(rng) * ext[1],
                                       u(rng) * ext[2]};
    const fd::CouplingStencil s = fd::make_coupling(g, pos, false);
    for (std::size_t k = 0; k < s.index.size(); ++k)
      B(s.index[k], c) += std::complex<double>(s.coef[k], 0.0);
  }
  return B;
}

mf::FactorKind kind_of(const std::string& mode) {
  if (mode == "fr") return mf::FactorKind::kFullRank;
  if (mode == "blr") return mf::FactorKind::kBlr;
  if (mode == "mp") return mf::FactorKind::kMpBlr;
  throw ConfigError("bench.modes: must be fr, blr or mp, got " + mode);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// least-squares slope of ln(y) against ln(n)
double loglog_slope(const std::vector<std::pair<int, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, y] : pts) {
    const double x = std::log(double(n)), ly = std::log(y);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
  }
  const double m = double(pts.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace

BenchReport bench_scaling(const BenchSpec& spec,
                          const fd::StencilWeightTable& table) {
  BenchReport rep;
  for (const int n : spec.n_list) {
    const model::VtiModel m = cube_model(n, spec.h_m);
    // Identity stretch on every axis: the scaling study needs the same
    // operator pattern at every n, and the smallest cube cannot host two
    // width-8 layers. The 10% spectral shift supplies the damping instead.
    fd::PmlProfile pml;
    pml.width = 0;
    pml.free_surface = false;
    for (int a = 0; a < 3; ++a) pml.gamma[a].assign(std::size_t(n), 0.0);
    const fd::WeightField wf =
        fd::make_weight_field(m, table, spec.f_hz, 10.0);
    const fd::cdouble omega(2.0 * M_PI * spec.f_hz, 0.0);
    const fd::ImpedanceMatrix A =
        fd::assemble_operator(m, omega, pml, wf, false, 10.0);
    const mf::EliminationTree tree = mf::build_tree(m.grid);
    const mf::SymbolicFactor symb = mf::symbolic_analysis(tree, A);
    const Eigen::MatrixXcd B0 = clustered_rhs(m.grid, spec.rhs_cols);

    for (const std::string& mode : spec.modes) {
      // fr ignores the tolerance sweep
      const std::vector<double> eps_sweep =
          mode == "fr" ? std::vector<double>{0.0} : spec.eps_list;
      for (const double eps : eps_sweep) {
        BenchRow row;
        row.n = n;
        row.mode = mode;
        row.eps = eps;
        try {
          mf::FactorOptions opt;
          opt.kind = kind_of(mode);
          if (eps > 0.0) opt.eps = eps;
          const auto t0 = std::chrono::steady_clock::now();
          const auto fact = mf::factorize<cf>(A, tree, symb, opt);
          row.t_factor_s = seconds_since(t0);
          row.fstats = fact.stats;
          Eigen::MatrixXcd B = B0;
          const auto t1 = std::chrono::steady_clock::now();
          mf::solve_in_place(fact, tree, B, {}, &row.sstats);
          row.t_solve_s = seconds_since(t1);
          row.ok = true;
        } catch (const std::bad_alloc&) {
          row.note = "out of memory";
        } catch (const std::exception& e) {
          row.note = e.what();
        }
        rep.rows.push_back(std::move(row));
      }
    }
  }

  // per-group exponents over sizes that completed
  std::vector<std::pair<std::string, double>> groups;
  for (const BenchRow& r : rep.rows) {
    const auto key = std::make_pair(r.mode, r.eps);
    bool seen = false;
    for (const auto& g : groups)
      if (g == key) seen = true;
    if (!seen) groups.push_back(key);
  }
  for (const auto& [mode, eps] : groups) {
    std::vector<std::pair<int, double>> flops, bytes;
    for (const BenchRow& r : rep.rows)
      if (r.ok && r.mode == mode && r.eps == eps) {
        flops.push_back({r.n, double(r.fstats.flops)});
        bytes.push_back({r.n, double(r.fstats.factor_bytes)});
      }
    if (flops.size() < 2) continue;
    ExponentFit fit;
    fit.mode = mode;
    fit.eps = eps;
    fit.flops_exp = loglog_slope(flops);
    fit.bytes_exp = loglog_slope(bytes);
    fit.points = int(flops.size());
    rep.fits.push_back(fit);
  }
  return rep;
}

void write_bench_csv(const BenchReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write bench table: " + path);
  out.precision(9);
  out << "n,mode,eps,ok,t_factor_s,t_solve_s,note," << mf::stats_csv_header()
      << "\n";
  for (const BenchRow& row : r.rows) {
    out << row.n << ',' << row.mode << ',' << row.eps << ','
        << (row.ok ? 1 : 0) << ',' << row.t_factor_s << ',' << row.t_solve_s
        << ',' << row.note << ',' << mf::stats_csv_row(row.fstats, row.sstats)
        << "\n";
  }
  if (!out) throw IoError("cannot write bench table: " + path);
}

void write_bench_fits_csv(const BenchReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write bench fits: " + path);
  out.precision(9);
  out << "mode,eps,flops_exp,bytes_exp,points\n";
  for (const ExponentFit& f : r.fits)
    out << f.mode << ',' << f.eps << ',' << f.flops_exp << ',' << f.bytes_exp
        << ',' << f.points << "\n";
  if (!out) throw IoError("cannot write bench fits: " + path);
}

} // namespace horst::cli
