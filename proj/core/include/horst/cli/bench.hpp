#ifndef HORST_CLI_BENCH_HPP
#define HORST_CLI_BENCH_HPP

#include <string>
#include <vector>

#include "horst/cli/config.hpp"
#include "horst/fd/stencil.hpp"
#include "horst/mf/stats.hpp"

namespace horst::cli {

/// One factorize-plus-solve measurement on an n^3 cube.
struct BenchRow {
  int n = 0;
  std::string mode;
  double eps = 0.0;
  bool ok = false;
  std::string note;  // failure reason when not ok
  mf::FactorStats fstats;
  mf::SolveStats sstats;
  double t_factor_s = 0.0;
  double t_solve_s = 0.0;
};

/// Log-log slope of a stat against n, per (mode, eps) group.
struct ExponentFit {
  std::string mode;
  double eps = 0.0;
  double flops_exp = 0.0;
  double bytes_exp = 0.0;
  int points = 0;  // rows entering the fit
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<ExponentFit> fits;
};

/// The scaling matrix: for each cube size and mode, assemble the Helmholtz
/// operator on a homogeneous model with 6-face absorbers, factorize in
/// 32-bit complex storage, solve one octant-clustered multi-source block.
/// Flop and byte tallies come from the solver's own counters, which do
/// not depend on the storage scalar. A row that runs out of memory is
/// reported and the sweep continues. fr rows ignore eps and run once.
BenchReport bench_scaling(const BenchSpec& spec,
                          const fd::StencilWeightTable& table);

/// rows as CSV (run parameters, then the shared stat columns).
void write_bench_csv(const BenchReport& r, const std::string& path);

/// fitted exponents as CSV: mode, eps, flops_exp, bytes_exp, points.
void write_bench_fits_csv(const BenchReport& r, const std::string& path);

} // namespace horst::cli

#endif
