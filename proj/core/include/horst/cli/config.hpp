#ifndef HORST_CLI_CONFIG_HPP
#define HORST_CLI_CONFIG_HPP

#include <array>
#include <string>
#include <vector>

#include "horst/fd/stencil.hpp"
#include "horst/fwi/inversion.hpp"
#include "horst/mf/factorize.hpp"
#include "horst/model/vti_model.hpp"

namespace horst::cli {

/// A smooth Gaussian velocity perturbation baked into the true model.
/// amplitude is the fractional peak relative to the base v0 at the
/// anomaly center, radius_m is the Gaussian sigma.
struct Anomaly {
  std::array<double, 3> center_m{0.0, 0.0, 0.0};
  double radius_m = 0.0;
  double amplitude = 0.0;
};

/// Base model built when no model file is supplied to `survey`: a water
/// layer over a linear v(z) gradient, constant anisotropy in the solid,
/// densities from the velocity polynomial. q_solid 0 means lossless.
struct BaseModelConfig {
  std::array<int, 3> dims{48, 48, 24};
  double h_m = 50.0;
  double water_depth_m = 150.0;
  double v_water = 1480.0;
  double v_top = 1600.0;
  double v_grad = 0.6;  // m/s per meter below the water bottom
  double delta = 0.03;
  double epsilon = 0.06;
  double q_solid = 0.0;
};

/// Synthetic survey geometry. Field-survey defaults (ocean-bottom nodes
/// on a staggered 375 m grid, an 18.75 m x 37.5 m shot carpet) are
/// multiplied by `scale`; explicit pitches override the scaled defaults.
/// Nodes are the reciprocal sources, shots the receivers.
struct SurveySpec {
  double scale = 0.125;
  double obn_pitch_m = 0.0;   // 0: 375 * scale
  double shot_dx_m = 0.0;     // 0: 18.75 * scale
  double shot_dy_m = 0.0;     // 0: 37.5 * scale
  double margin_m = -1.0;     // <0: 10% of the smaller lateral extent
  double obn_depth_m = -1.0;  // <0: on the water bottom, per column
  double shot_depth_m = -1.0; // <0: 1.5 grid cells below the surface
  std::vector<Anomaly> anomalies;
  BaseModelConfig base;
};

/// One exported section: axis is the constant coordinate, index the plane.
struct SliceSpec {
  std::string axis = "z";
  int index = 0;
  std::string field = "v0";
  bool overlay = false;  // add a velocity-gradient-magnitude image
};

/// Scaling-study matrix: cube sizes times factorization modes times
/// low-rank tolerances, one clustered multi-source solve per cell.
struct BenchSpec {
  std::vector<int> n_list{16, 24, 32};
  std::vector<std::string> modes{"fr", "blr"};
  std::vector<double> eps_list{1e-5};
  int rhs_cols = 64;
  double h_m = 50.0;
  double f_hz = 7.5;
};

/// Whole-run configuration, one JSON file plus --set overrides.
struct RunConfig {
  struct Paths {
    std::string model;
    std::string dataset;
    std::string acquisition;
    std::string weights;  // optional precomputed stencil-weight table
    std::string output_dir = ".";
  } paths;

  struct Plan {
    std::vector<double> freqs_hz;
    double ppw = 4.0;
    double ppw_min = 3.8;
    int cycles = 1;
    int max_iter = 15;
  } plan;

  struct Solver {
    std::string mode = "blr";  // fr | blr | mp
    std::string precision = "f64";
    double eps_blr = 1e-5;
    double eps_mp = 0.0;  // 0: reuse eps_blr
    int rhs_block = 32;
    int leaf_max = 128;
  } solver;

  struct Physics {
    bool free_surface = true;
    int pml_width = 8;
    double pml_r0 = 1e-4;
    double f_ref_hz = 10.0;
  } physics;

  struct Inversion {
    int lbfgs_m = 5;
    double init_step = 30.0;  // first-step size in m/s
    double v_min = 1000.0;
    double v_max = 8000.0;
    double stop_rel = 1e-3;
    double tv_lambda = 0.0;
  } inversion;

  SurveySpec survey;
  SliceSpec slice;
  BenchSpec bench;

  int threads = 0;  // 0: HORST_THREADS, then hardware
  bool deterministic = false;

  /// Range-checks every knob; messages name the offending key.
  void validate() const;
};

/// Parse a config file. Missing file is a ConfigError (the path is part
/// of the run definition), malformed JSON an IoError naming the parser
/// message, unknown or mistyped keys ConfigErrors naming the key.
RunConfig load_config(const std::string& path);

/// Config with every default, no file involved.
RunConfig default_config();

/// Apply `--set key=value` overrides (dotted keys, JSON literals or bare
/// scalars; a bare comma list becomes an array) onto a file's JSON before
/// it is materialized. Order matters, later wins.
RunConfig load_config_with_overrides(const std::string& path,
                                     const std::vector<std::string>& sets);

/// The resolved factorization options for the configured solver mode.
mf::FactorOptions factor_options(const RunConfig& c);

/// The stencil-weight table: loaded from paths.weights when given,
/// otherwise optimized on the default ladder (deterministic either way).
fd::StencilWeightTable resolve_weight_table(const RunConfig& c);

/// Per-stage discretization knobs from the config.
fwi::StageParams stage_params(const RunConfig& c,
                              const fd::StencilWeightTable& table);

/// Full inversion configuration from the config.
fwi::InversionConfig inversion_config(const RunConfig& c,
                                      const fd::StencilWeightTable& table);

/// Continuation plan from the configured frequencies: intervals from the
/// catalog at the model's minimum velocity. Throws when freqs are empty.
model::FrequencyPlan frequency_plan(const RunConfig& c, double v_min_model);

/// ConfigError naming `key` unless the path exists as a regular file.
void require_file(const std::string& path, const std::string& key);

} // namespace horst::cli

#endif
