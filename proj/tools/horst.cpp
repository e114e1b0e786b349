#include <algorithm>
#include <complex>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "horst/cli/bench.hpp"
#include "horst/cli/config.hpp"
#include "horst/cli/forward.hpp"
#include "horst/cli/slices.hpp"
#include "horst/cli/survey.hpp"
#include "horst/common/error.hpp"
#include "horst/common/parallel.hpp"
#include "horst/fwi/inversion.hpp"
#include "horst/fwi/tv.hpp"
#include "horst/model/model_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace horst;

std::string out_path(const cli::RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.paths.output_dir) / name).string();
}

int run_weights(const cli::RunConfig& cfg) {
  const fd::StencilWeightTable table =
      fd::optimize_stencil_weights(fd::default_g_samples());
  const std::string path = out_path(cfg, "weights.csv");
  table.save_csv(path);
  const auto angles = fd::dispersion_angles();
  const double opt =
      fd::max_dispersion_error(table.interpolate(4.0), 4.0, angles);
  const double cls = fd::max_dispersion_error(
      fd::StencilWeights::classical7(), 4.0, angles);
  std::cout << "wrote " << path << " (" << table.g.size() << " rows)\n"
            << "max phase error at 4 points per wavelength: optimized "
            << opt * 100.0 << "%, classical " << cls * 100.0 << "%\n";
  return 0;
}

int run_survey(const cli::RunConfig& cfg) {
  model::VtiModel base;
  if (cfg.paths.model.empty()) {
    base = cli::make_base_model(cfg.survey.base);
  } else {
    cli::require_file(cfg.paths.model, "paths.model");
    base = model::load_model(cfg.paths.model);
  }
  const cli::SurveyResult res = cli::synthesize_survey(cfg.survey, base);
  model::save_model(res.m_true, out_path(cfg, "true_model.fdm"));
  model::save_model(res.m_start, out_path(cfg, "starting_model.fdm"));
  fwi::save_acquisition(res.acq, out_path(cfg, "acquisition.json"));
  std::cout << "survey: " << res.acq.sources.size() << " nodes, "
            << res.acq.receivers.size() << " shots, "
            << cfg.survey.anomalies.size() << " anomalies\n"
            << "wrote true_model.fdm, starting_model.fdm, acquisition.json"
            << " under " << cfg.paths.output_dir << "\n";
  return 0;
}

int run_forward(const cli::RunConfig& cfg) {
  cli::require_file(cfg.paths.model, "paths.model");
  cli::require_file(cfg.paths.acquisition, "paths.acquisition");
  const model::VtiModel m = model::load_model(cfg.paths.model);
  fwi::Acquisition acq = fwi::load_acquisition(cfg.paths.acquisition);
  const fd::StencilWeightTable table = cli::resolve_weight_table(cfg);
  const double v_min = *std::min_element(m.v0.begin(), m.v0.end());
  const model::FrequencyPlan plan = cli::frequency_plan(cfg, v_min);
  const fwi::StageParams par = cli::stage_params(cfg, table);
  const fwi::FreqDataset ds =
      cli::forward_model(m, acq, plan, par, cfg.solver.precision);
  const std::string path = cfg.paths.dataset.empty()
                               ? out_path(cfg, "dataset.fdg")
                               : cfg.paths.dataset;
  fwi::save_gathers(ds, path);
  std::cout << "forward: " << ds.gathers.size() << " frequencies, "
            << acq.sources.size() << " sources, " << acq.receivers.size()
            << " receivers\nwrote " << path << "\n";
  return 0;
}

template <class Scalar>
int run_invert_t(const cli::RunConfig& cfg) {
  cli::require_file(cfg.paths.model, "paths.model");
  cli::require_file(cfg.paths.dataset, "paths.dataset");
  cli::require_file(cfg.paths.acquisition, "paths.acquisition");
  const model::VtiModel m0 = model::load_model(cfg.paths.model);
  fwi::FreqDataset data = fwi::load_gathers(cfg.paths.dataset);
  data.acq = fwi::load_acquisition(cfg.paths.acquisition);
  const fd::StencilWeightTable table = cli::resolve_weight_table(cfg);
  const double v_min = *std::min_element(m0.v0.begin(), m0.v0.end());
  const model::FrequencyPlan plan = cli::frequency_plan(cfg, v_min);
  const fwi::InversionConfig icfg = cli::inversion_config(cfg, table);

  fwi::ContinuationResult res = fwi::run_continuation<Scalar>(
      plan, data, m0, icfg, cfg.paths.output_dir);
  fwi::write_history_csv(res.history, out_path(cfg, "history.csv"));

  if (cfg.inversion.tv_lambda > 0.0) {
    model::save_model(res.m, out_path(cfg, "final_model_raw.fdm"));
    res.m.v0 =
        fwi::tv_denoise(res.m.grid, res.m.v0, cfg.inversion.tv_lambda);
    model::save_model(res.m, out_path(cfg, "final_model.fdm"));
  } else {
    model::save_model(res.m, out_path(cfg, "final_model.fdm"));
  }

  if (!res.history.empty()) {
    const fwi::HistoryRow& last = res.history.back();
    std::cout << "invert: " << res.history.size() << " history rows, final J "
              << last.J << " at " << last.freq_hz << " Hz\n";
  }
  std::cout << "wrote final_model.fdm, history.csv under "
            << cfg.paths.output_dir << "\n";
  if (res.aborted) {
    std::cerr << "numeric failure: " << res.abort_reason
              << " (latest accepted model kept)\n";
    return 3;
  }
  return 0;
}

int run_invert(const cli::RunConfig& cfg) {
  if (cfg.solver.precision == "f32")
    return run_invert_t<std::complex<float>>(cfg);
  return run_invert_t<std::complex<double>>(cfg);
}

int run_bench(const cli::RunConfig& cfg) {
  const fd::StencilWeightTable table = cli::resolve_weight_table(cfg);
  const cli::BenchReport rep = cli::bench_scaling(cfg.bench, table);
  cli::write_bench_csv(rep, out_path(cfg, "bench.csv"));
  cli::write_bench_fits_csv(rep, out_path(cfg, "bench_fits.csv"));
  for (const cli::BenchRow& r : rep.rows)
    if (!r.ok)
      std::cout << "n=" << r.n << " mode=" << r.mode << " failed: " << r.note
                << "\n";
  for (const cli::ExponentFit& f : rep.fits)
    std::cout << "fit mode=" << f.mode << " eps=" << f.eps << ": flops ~ n^"
              << f.flops_exp << ", bytes ~ n^" << f.bytes_exp << " ("
              << f.points << " sizes)\n";
  std::cout << "wrote bench.csv, bench_fits.csv under "
            << cfg.paths.output_dir << "\n";
  return 0;
}

int run_slice(const cli::RunConfig& cfg) {
  cli::require_file(cfg.paths.model, "paths.model");
  const model::VtiModel m = model::load_model(cfg.paths.model);
  const std::string base = out_path(
      cfg, "slice_" + cfg.slice.axis + std::to_string(cfg.slice.index) + "_" +
               cfg.slice.field);
  cli::export_slices(m, cfg.slice, base);
  std::cout << "wrote " << base << ".pgm and .csv"
            << (cfg.slice.overlay ? " and _overlay.pgm" : "") << "\n";
  return 0;
}

int run_validate(const cli::RunConfig& cfg) {
  (void)cfg;
  const fd::StencilWeightTable table =
      fd::optimize_stencil_weights(fd::default_g_samples());
  bool ok = true;
  const auto report = [&](const char* name, double val, double tol) {
    const bool pass = val <= tol;
    ok = ok && pass;
    std::cout << name << ": " << val << " (tolerance " << tol << ") "
              << (pass ? "PASS" : "FAIL") << "\n";
  };
  const cli::OracleCheck g =
      cli::green_function_check(32, 50.0, 7.5, table, 8, false);
  report("free-space kernel, relative L2", g.rel_l2, 0.05);
  const cli::OracleCheck gh =
      cli::green_function_check(32, 50.0, 7.5, table, 8, true);
  report("surface-ghost kernel, relative L2", gh.rel_l2, 0.05);
  const double rc = cli::reciprocity_check(18, 50.0, 6.0, table);
  report("reciprocity, relative trace gap", rc, 1e-6);
  if (!ok) {
    std::cerr << "numeric failure: analytic oracle outside tolerance\n";
    return 3;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-domain waveform modeling and inversion"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  int threads = -1;
  bool deterministic = false;

  for (const char* name : {"weights", "survey", "forward", "invert", "bench",
                           "slice", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--set", sets, "dotted-key override, key=value");
    sub->add_option("--threads", threads, "worker thread count");
    sub->add_flag("--deterministic", deterministic,
                  "bit-reproducible schedules");
  }
  app.get_subcommand("weights")->description("optimize the stencil-weight table");
  app.get_subcommand("survey")->description("synthesize an inverse-crime survey");
  app.get_subcommand("forward")->description("model synthetic gathers");
  app.get_subcommand("invert")->description("run the frequency continuation");
  app.get_subcommand("bench")->description("factorization scaling study");
  app.get_subcommand("slice")->description("export a model section");
  app.get_subcommand("validate")->description("run the analytic-oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cli::RunConfig cfg = cli::load_config_with_overrides(config_path, sets);
    if (threads >= 0) cfg.threads = threads;
    if (deterministic) cfg.deterministic = true;
    cfg.validate();
    const int n_threads = resolve_threads(cfg.threads);
    if (n_threads > 1 && !cfg.deterministic)
      std::cout << "threads: " << n_threads << "\n";
    std::filesystem::create_directories(cfg.paths.output_dir);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "weights") return run_weights(cfg);
    if (cmd == "survey") return run_survey(cfg);
    if (cmd == "forward") return run_forward(cfg);
    if (cmd == "invert") return run_invert(cfg);
    if (cmd == "bench") return run_bench(cfg);
    if (cmd == "slice") return run_slice(cfg);
    return run_validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::bad_alloc&) {
    std::cerr << "numeric failure: out of memory\n";
    return 3;
  }
}
