#ifndef HORST_FWI_INVERSION_HPP
#define HORST_FWI_INVERSION_HPP

#include <string>
#include <vector>

#include "horst/fwi/gradient.hpp"
#include "horst/fwi/lbfgs.hpp"
#include "horst/fwi/objective.hpp"

namespace horst::fwi {

/// Optimization knobs shared by every stage of a continuation run. The
/// discretization side lives in StageParams; only v0 is ever updated, and
/// it stays inside [v_min, v_max] with the water column frozen.
struct InversionConfig {
  StageParams stage;
  int lbfgs_m = 5;
  double init_step = 30.0;  // first-iteration step size, m/s
  WolfeOptions wolfe;
  double stop_rel = 1e-3;         // stop when (J_prev - J) / J_prev drops below
  double data_floor_rel = 1e-12;  // converged when J <= this * (1/2)||d_obs||^2
  double v_min = 1000.0;
  double v_max = 8000.0;
};

struct HistoryRow {
  int cycle = 0;
  int stage = 0;
  double freq_hz = 0.0;
  int iter = 0;
  double J = 0.0;
  double grad_norm = 0.0;  // inf-norm of the projected gradient
  double step_len = 0.0;   // inf-norm of the applied model change, m/s
  int n_facto = 0;         // factorizations so far in this stage
  double wall_s = 0.0;
};

struct StageResult {
  model::VtiModel m;
  std::vector<HistoryRow> rows;
  bool aborted = false;
  std::string abort_reason;
};

/// One mono-frequency inversion under a frozen stage context: at most
/// max_iter l-BFGS iterations, each trial model re-factorized, signatures
/// re-estimated per evaluation, stopping on the relative misfit decrease
/// or the data floor. Solver failures abort the stage with the latest
/// accepted model preserved in the result.
template <class Scalar>
StageResult invert_frequency(const StageContext& ctx, const model::VtiModel& m0,
                             const FreqGather& obs, const InversionConfig& cfg,
                             int max_iter, int cycle = 1, int stage = 0);

struct ContinuationResult {
  model::VtiModel m;
  std::vector<HistoryRow> history;
  bool aborted = false;
  std::string abort_reason;
};

/// Frequency continuation: cycles over the plan's ascending stages,
/// resampling the model to each stage interval and carrying it forward.
/// Every plan frequency must exist in the dataset before any work starts.
/// With a non-empty out_dir each stage's final model is written there as
/// model_c<cycle>_s<stage>.fdm.
template <class Scalar>
ContinuationResult run_continuation(const model::FrequencyPlan& plan,
                                    const FreqDataset& data,
                                    const model::VtiModel& m0,
                                    const InversionConfig& cfg,
                                    const std::string& out_dir = "");

void write_history_csv(const std::vector<HistoryRow>& rows,
                       const std::string& path);

extern template StageResult invert_frequency<std::complex<float>>(
    const StageContext&, const model::VtiModel&, const FreqGather&,
    const InversionConfig&, int, int, int);
extern template StageResult invert_frequency<std::complex<double>>(
    const StageContext&, const model::VtiModel&, const FreqGather&,
    const InversionConfig&, int, int, int);
extern template ContinuationResult run_continuation<std::complex<float>>(
    const model::FrequencyPlan&, const FreqDataset&, const model::VtiModel&,
    const InversionConfig&, const std::string&);
extern template ContinuationResult run_continuation<std::complex<double>>(
    const model::FrequencyPlan&, const FreqDataset&, const model::VtiModel&,
    const InversionConfig&, const std::string&);

} // namespace horst::fwi

#endif
