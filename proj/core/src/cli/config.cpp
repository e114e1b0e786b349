#include "horst/cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "horst/common/error.hpp"

namespace horst::cli {

using nlohmann::json;

namespace {

json anomaly_proto() {
  return json{{"center_m", json::array({0.0, 0.0, 0.0})},
              {"radius_m", 0.0},
              {"amplitude", 0.0}};
}

// the full default tree; doubles as the known-key schema
json schema() {
  json j;
  j["paths"] = {{"model", ""},
                {"dataset", ""},
                {"acquisition", ""},
                {"weights", ""},
                {"output_dir", "."}};
  j["plan"] = {{"freqs_hz", json::array()},
               {"ppw", 4.0},
               {"ppw_min", 3.8},
               {"cycles", 1},
               {"max_iter", 15}};
  j["solver"] = {{"mode", "blr"},    {"precision", "f64"},
                 {"eps_blr", 1e-5},  {"eps_mp", 0.0},
                 {"rhs_block", 32},  {"leaf_max", 128}};
  j["physics"] = {{"free_surface", true},
                  {"pml_width", 8},
                  {"pml_r0", 1e-4},
                  {"f_ref_hz", 10.0}};
  j["inversion"] = {{"lbfgs_m", 5},    {"init_step", 30.0},
                    {"v_min", 1000.0}, {"v_max", 8000.0},
                    {"stop_rel", 1e-3}, {"tv_lambda", 0.0}};
  j["survey"] = {{"scale", 0.125},
                 {"obn_pitch_m", 0.0},
                 {"shot_dx_m", 0.0},
                 {"shot_dy_m", 0.0},
                 {"margin_m", -1.0},
                 {"obn_depth_m", -1.0},
                 {"shot_depth_m", -1.0},
                 {"anomalies", json::array({anomaly_proto()})},
                 {"base",
                  {{"dims", json::array({48, 48, 24})},
                   {"h_m", 50.0},
                   {"water_depth_m", 150.0},
                   {"v_water", 1480.0},
                   {"v_top", 1600.0},
                   {"v_grad", 0.6},
                   {"delta", 0.03},
                   {"epsilon", 0.06},
                   {"q_solid", 0.0}}}};
  j["slice"] = {{"axis", "z"}, {"index", 0}, {"field", "v0"},
                {"overlay", false}};
  j["bench"] = {{"n_list", json::array({16, 24, 32})},
                {"modes", json::array({"fr", "blr"})},
                {"eps_list", json::array({1e-5})},
                {"rhs_cols", 64},
                {"h_m", 50.0},
                {"f_hz", 7.5}};
  j["threads"] = 0;
  j["deterministic"] = false;
  return j;
}

// schema() carries an anomaly prototype for key checking; the defaults
// start with none
json defaults() {
  json j = schema();
  j["survey"]["anomalies"] = json::array();
  return j;
}

std::string joined(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// every user key must exist in the schema; array-of-object prototypes
// check each element
void check_unknown(const json& user, const json& sch,
                   const std::string& prefix) {
  if (user.is_object()) {
    if (!sch.is_object())
      throw ConfigError("config key " + prefix + ": unexpected object");
    for (const auto& [k, v] : user.items()) {
      if (!sch.contains(k))
        throw ConfigError("unknown config key: " + joined(prefix, k));
      check_unknown(v, sch.at(k), joined(prefix, k));
    }
    return;
  }
  if (user.is_array() && sch.is_array() && !sch.empty() &&
      sch.at(0).is_object()) {
    for (std::size_t i = 0; i < user.size(); ++i)
      check_unknown(user.at(i), sch.at(0),
                    prefix + "[" + std::to_string(i) + "]");
  }
}

void merge_into(json& dst, const json& src, const std::string& prefix) {
  if (src.is_object()) {
    for (const auto& [k, v] : src.items()) {
      json& d = dst.at(k);
      if (d.is_object() && v.is_object())
        merge_into(d, v, joined(prefix, k));
      else if (d.is_object() != v.is_object())
        throw ConfigError("config key " + joined(prefix, k) +
                          ": expected " +
                          std::string(d.is_object() ? "an object" : "a value"));
      else
        d = v;
    }
    return;
  }
  dst = src;
}

double num_at(const json& j, const char* a, const char* b) {
  const json& v = j.at(a).at(b);
  if (!v.is_number())
    throw ConfigError(std::string("config key ") + a + "." + b +
                      ": expected a number");
  return v.get<double>();
}

int int_at(const json& j, const char* a, const char* b) {
  const double d = num_at(j, a, b);
  if (d != std::floor(d))
    throw ConfigError(std::string("config key ") + a + "." + b +
                      ": expected an integer");
  return int(d);
}

bool bool_at(const json& j, const char* a, const char* b) {
  const json& v = j.at(a).at(b);
  if (!v.is_boolean())
    throw ConfigError(std::string("config key ") + a + "." + b +
                      ": expected a boolean");
  return v.get<bool>();
}

std::string str_at(const json& j, const char* a, const char* b) {
  const json& v = j.at(a).at(b);
  if (!v.is_string())
    throw ConfigError(std::string("config key ") + a + "." + b +
                      ": expected a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& v, const std::string& key) {
  if (!v.is_array())
    throw ConfigError("config key " + key + ": expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("config key " + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

RunConfig materialize(const json& j) {
  RunConfig c;
  c.paths.model = str_at(j, "paths", "model");
  c.paths.dataset = str_at(j, "paths", "dataset");
  c.paths.acquisition = str_at(j, "paths", "acquisition");
  c.paths.weights = str_at(j, "paths", "weights");
  c.paths.output_dir = str_at(j, "paths", "output_dir");

  c.plan.freqs_hz = num_list(j.at("plan").at("freqs_hz"), "plan.freqs_hz");
  c.plan.ppw = num_at(j, "plan", "ppw");
  c.plan.ppw_min = num_at(j, "plan", "ppw_min");
  c.plan.cycles = int_at(j, "plan", "cycles");
  c.plan.max_iter = int_at(j, "plan", "max_iter");

  c.solver.mode = str_at(j, "solver", "mode");
  c.solver.precision = str_at(j, "solver", "precision");
  c.solver.eps_blr = num_at(j, "solver", "eps_blr");
  c.solver.eps_mp = num_at(j, "solver", "eps_mp");
  c.solver.rhs_block = int_at(j, "solver", "rhs_block");
  c.solver.leaf_max = int_at(j, "solver", "leaf_max");

  c.physics.free_surface = bool_at(j, "physics", "free_surface");
  c.physics.pml_width = int_at(j, "physics", "pml_width");
  c.physics.pml_r0 = num_at(j, "physics", "pml_r0");
  c.physics.f_ref_hz = num_at(j, "physics", "f_ref_hz");

  c.inversion.lbfgs_m = int_at(j, "inversion", "lbfgs_m");
  c.inversion.init_step = num_at(j, "inversion", "init_step");
  c.inversion.v_min = num_at(j, "inversion", "v_min");
  c.inversion.v_max = num_at(j, "inversion", "v_max");
  c.inversion.stop_rel = num_at(j, "inversion", "stop_rel");
  c.inversion.tv_lambda = num_at(j, "inversion", "tv_lambda");

  const json& sv = j.at("survey");
  c.survey.scale = num_at(j, "survey", "scale");
  c.survey.obn_pitch_m = num_at(j, "survey", "obn_pitch_m");
  c.survey.shot_dx_m = num_at(j, "survey", "shot_dx_m");
  c.survey.shot_dy_m = num_at(j, "survey", "shot_dy_m");
  c.survey.margin_m = num_at(j, "survey", "margin_m");
  c.survey.obn_depth_m = num_at(j, "survey", "obn_depth_m");
  c.survey.shot_depth_m = num_at(j, "survey", "shot_depth_m");
  c.survey.anomalies.clear();
  for (const auto& a : sv.at("anomalies")) {
    Anomaly an;
    const auto ctr =
        num_list(a.at("center_m"), "survey.anomalies[].center_m");
    if (ctr.size() != 3)
      throw ConfigError(
          "config key survey.anomalies[].center_m: expected 3 numbers");
    an.center_m = {ctr[0], ctr[1], ctr[2]};
    if (!a.at("radius_m").is_number() || !a.at("amplitude").is_number())
      throw ConfigError("config key survey.anomalies[]: expected numbers");
    an.radius_m = a.at("radius_m").get<double>();
    an.amplitude = a.at("amplitude").get<double>();
    c.survey.anomalies.push_back(an);
  }
  const json& base = sv.at("base");
  {
    const auto dims = num_list(base.at("dims"), "survey.base.dims");
    if (dims.size() != 3)
      throw ConfigError("config key survey.base.dims: expected 3 integers");
    c.survey.base.dims = {int(dims[0]), int(dims[1]), int(dims[2])};
  }
  c.survey.base.h_m = base.at("h_m").get<double>();
  c.survey.base.water_depth_m = base.at("water_depth_m").get<double>();
  c.survey.base.v_water = base.at("v_water").get<double>();
  c.survey.base.v_top = base.at("v_top").get<double>();
  c.survey.base.v_grad = base.at("v_grad").get<double>();
  c.survey.base.delta = base.at("delta").get<double>();
  c.survey.base.epsilon = base.at("epsilon").get<double>();
  c.survey.base.q_solid = base.at("q_solid").get<double>();

  c.slice.axis = str_at(j, "slice", "axis");
  c.slice.index = int_at(j, "slice", "index");
  c.slice.field = str_at(j, "slice", "field");
  c.slice.overlay = bool_at(j, "slice", "overlay");

  c.bench.n_list.clear();
  for (const double n : num_list(j.at("bench").at("n_list"), "bench.n_list"))
    c.bench.n_list.push_back(int(n));
  c.bench.modes.clear();
  for (const auto& m : j.at("bench").at("modes")) {
    if (!m.is_string())
      throw ConfigError("config key bench.modes: expected strings");
    c.bench.modes.push_back(m.get<std::string>());
  }
  c.bench.eps_list = num_list(j.at("bench").at("eps_list"), "bench.eps_list");
  c.bench.rhs_cols = int_at(j, "bench", "rhs_cols");
  c.bench.h_m = num_at(j, "bench", "h_m");
  c.bench.f_hz = num_at(j, "bench", "f_hz");

  if (!j.at("threads").is_number())
    throw ConfigError("config key threads: expected a number");
  c.threads = j.at("threads").get<int>();
  if (!j.at("deterministic").is_boolean())
    throw ConfigError("config key deterministic: expected a boolean");
  c.deterministic = j.at("deterministic").get<bool>();

  c.validate();
  return c;
}

void check_mode(const std::string& mode, const std::string& key) {
  if (mode != "fr" && mode != "blr" && mode != "mp")
    throw ConfigError("config key " + key + ": must be fr, blr or mp, got " +
                      mode);
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed config file " + path + ": " + e.what());
  }
}

// value side of --set: JSON literal, else a bare comma list, else a string
json parse_override_value(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::exception&) {
  }
  if (v.find(',') != std::string::npos) {
    try {
      return json::parse("[" + v + "]");
    } catch (const json::exception&) {
    }
  }
  return json(v);
}

void apply_set(json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key=value, got: " + kv);
  std::string key = kv.substr(0, eq);
  std::string ptr = "/" + key;
  for (auto& ch : ptr)
    if (ch == '.') ch = '/';
  json override_tree;
  override_tree[json::json_pointer(ptr)] = parse_override_value(kv.substr(eq + 1));
  check_unknown(override_tree, schema(), "");
  merge_into(j, override_tree, "");
}

} // namespace

void RunConfig::validate() const {
  const auto bad = [](const std::string& key, const std::string& what) {
    throw ConfigError("config key " + key + ": " + what);
  };
  for (const double f : plan.freqs_hz)
    if (!(f > 0.0)) bad("plan.freqs_hz", "frequencies must be positive");
  for (std::size_t i = 1; i < plan.freqs_hz.size(); ++i)
    if (!(plan.freqs_hz[i] > plan.freqs_hz[i - 1]))
      bad("plan.freqs_hz", "frequencies must be strictly ascending");
  if (!(plan.ppw >= 2.0 && plan.ppw <= 40.0)) bad("plan.ppw", "must be in [2, 40]");
  if (!(plan.ppw_min >= 2.0 && plan.ppw_min <= plan.ppw))
    bad("plan.ppw_min", "must be in [2, ppw]");
  if (plan.cycles < 1) bad("plan.cycles", "must be at least 1");
  if (plan.max_iter < 1) bad("plan.max_iter", "must be at least 1");

  check_mode(solver.mode, "solver.mode");
  if (solver.precision != "f32" && solver.precision != "f64")
    bad("solver.precision", "must be f32 or f64");
  if (!(solver.eps_blr > 0.0 && solver.eps_blr <= 0.1))
    bad("solver.eps_blr", "must be in (0, 0.1]");
  if (solver.eps_mp < 0.0 || solver.eps_mp > 0.1)
    bad("solver.eps_mp", "must be in [0, 0.1]");
  if (solver.rhs_block < 1 || solver.rhs_block > 4096)
    bad("solver.rhs_block", "must be in [1, 4096]");
  if (solver.leaf_max < 8 || solver.leaf_max > 8192)
    bad("solver.leaf_max", "must be in [8, 8192]");

  if (physics.pml_width < 8 || physics.pml_width > 64)
    bad("physics.pml_width", "must be in [8, 64]");
  if (!(physics.pml_r0 > 0.0 && physics.pml_r0 < 1.0))
    bad("physics.pml_r0", "must be in (0, 1)");
  if (!(physics.f_ref_hz > 0.0)) bad("physics.f_ref_hz", "must be positive");

  if (inversion.lbfgs_m < 1 || inversion.lbfgs_m > 100)
    bad("inversion.lbfgs_m", "must be in [1, 100]");
  if (!(inversion.init_step > 0.0)) bad("inversion.init_step", "must be positive");
  if (!(inversion.v_min > 0.0)) bad("inversion.v_min", "must be positive");
  if (!(inversion.v_max > inversion.v_min))
    bad("inversion.v_max", "must exceed v_min");
  if (!(inversion.stop_rel >= 0.0 && inversion.stop_rel < 1.0))
    bad("inversion.stop_rel", "must be in [0, 1)");
  if (inversion.tv_lambda < 0.0) bad("inversion.tv_lambda", "must not be negative");

  if (!(survey.scale > 0.0)) bad("survey.scale", "must be positive");
  if (survey.obn_pitch_m < 0.0) bad("survey.obn_pitch_m", "must not be negative");
  if (survey.shot_dx_m < 0.0) bad("survey.shot_dx_m", "must not be negative");
  if (survey.shot_dy_m < 0.0) bad("survey.shot_dy_m", "must not be negative");
  for (std::size_t i = 0; i < survey.anomalies.size(); ++i) {
    const Anomaly& a = survey.anomalies[i];
    const std::string key = "survey.anomalies[" + std::to_string(i) + "]";
    if (!(a.radius_m > 0.0)) bad(key + ".radius_m", "must be positive");
    if (!(std::abs(a.amplitude) <= 1.0))
      bad(key + ".amplitude", "must be in [-1, 1]");
  }
  for (const int d : survey.base.dims)
    if (d < 2) bad("survey.base.dims", "must be at least 2 per axis");
  if (!(survey.base.h_m > 0.0)) bad("survey.base.h_m", "must be positive");
  if (survey.base.water_depth_m < 0.0)
    bad("survey.base.water_depth_m", "must not be negative");
  if (!(survey.base.v_water > 0.0)) bad("survey.base.v_water", "must be positive");
  if (!(survey.base.v_top > 0.0)) bad("survey.base.v_top", "must be positive");
  if (!(survey.base.q_solid == 0.0 || survey.base.q_solid >= 2.0))
    bad("survey.base.q_solid", "must be 0 (lossless) or at least 2");

  if (slice.axis != "x" && slice.axis != "y" && slice.axis != "z")
    bad("slice.axis", "must be x, y or z");
  if (slice.index < 0) bad("slice.index", "must not be negative");
  if (slice.field != "v0" && slice.field != "delta" &&
      slice.field != "epsilon" && slice.field != "rho" && slice.field != "q")
    bad("slice.field", "must be one of v0, delta, epsilon, rho, q");

  if (bench.n_list.empty()) bad("bench.n_list", "must not be empty");
  for (const int n : bench.n_list)
    if (n < 8 || n > 256) bad("bench.n_list", "sizes must be in [8, 256]");
  if (bench.modes.empty()) bad("bench.modes", "must not be empty");
  for (const auto& m : bench.modes) check_mode(m, "bench.modes");
  for (const double e : bench.eps_list)
    if (!(e > 0.0 && e <= 0.1)) bad("bench.eps_list", "must be in (0, 0.1]");
  if (bench.rhs_cols < 1 || bench.rhs_cols > 4096)
    bad("bench.rhs_cols", "must be in [1, 4096]");
  if (!(bench.h_m > 0.0)) bad("bench.h_m", "must be positive");
  if (!(bench.f_hz > 0.0)) bad("bench.f_hz", "must be positive");

  if (threads < 0) bad("threads", "must not be negative");
  if (paths.output_dir.empty()) bad("paths.output_dir", "must not be empty");
}

RunConfig default_config() { return materialize(defaults()); }

RunConfig load_config(const std::string& path) {
  return load_config_with_overrides(path, {});
}

RunConfig load_config_with_overrides(const std::string& path,
                                     const std::vector<std::string>& sets) {
  json j = defaults();
  if (!path.empty()) {
    const json user = parse_file(path);
    if (!user.is_object())
      throw ConfigError("config file " + path + ": top level must be an object");
    check_unknown(user, j, "");
    merge_into(j, user, "");
  }
  for (const auto& kv : sets) apply_set(j, kv);
  return materialize(j);
}

mf::FactorOptions factor_options(const RunConfig& c) {
  mf::FactorOptions o;
  if (c.solver.mode == "fr") o.kind = mf::FactorKind::kFullRank;
  else if (c.solver.mode == "blr") o.kind = mf::FactorKind::kBlr;
  else o.kind = mf::FactorKind::kMpBlr;
  o.eps = c.solver.eps_blr;
  o.eps_mp = c.solver.eps_mp;
  return o;
}

fd::StencilWeightTable resolve_weight_table(const RunConfig& c) {
  if (!c.paths.weights.empty()) {
    require_file(c.paths.weights, "paths.weights");
    return fd::StencilWeightTable::load_csv(c.paths.weights);
  }
  return fd::optimize_stencil_weights(fd::default_g_samples());
}

fwi::StageParams stage_params(const RunConfig& c,
                              const fd::StencilWeightTable& table) {
  fwi::StageParams p;
  p.f_ref_hz = c.physics.f_ref_hz;
  p.free_surface = c.physics.free_surface;
  p.pml_width = c.physics.pml_width;
  p.pml_r0 = c.physics.pml_r0;
  p.fopt = factor_options(c);
  p.rhs_block = c.solver.rhs_block;
  p.estimate_signatures = true;
  p.table = table;
  return p;
}

fwi::InversionConfig inversion_config(const RunConfig& c,
                                      const fd::StencilWeightTable& table) {
  fwi::InversionConfig ic;
  ic.stage = stage_params(c, table);
  ic.lbfgs_m = c.inversion.lbfgs_m;
  ic.init_step = c.inversion.init_step;
  ic.stop_rel = c.inversion.stop_rel;
  ic.v_min = c.inversion.v_min;
  ic.v_max = c.inversion.v_max;
  return ic;
}

model::FrequencyPlan frequency_plan(const RunConfig& c, double v_min_model) {
  if (c.plan.freqs_hz.empty())
    throw ConfigError("config key plan.freqs_hz: must not be empty");
  return model::make_plan(c.plan.freqs_hz, v_min_model, c.plan.ppw,
                          c.plan.ppw_min, c.plan.cycles, c.plan.max_iter);
}

void require_file(const std::string& path, const std::string& key) {
  if (path.empty())
    throw ConfigError("config key " + key + ": a file path is required");
  if (!std::filesystem::is_regular_file(path))
    throw ConfigError("config key " + key + ": file not found: " + path);
}

} // namespace horst::cli
