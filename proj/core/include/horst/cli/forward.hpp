#ifndef HORST_CLI_FORWARD_HPP
#define HORST_CLI_FORWARD_HPP

#include <string>

#include "horst/cli/config.hpp"
#include "horst/fwi/dataset.hpp"
#include "horst/fwi/objective.hpp"
#include "horst/model/vti_model.hpp"

namespace horst::cli {

/// Synthetic data for every stage of one plan cycle: resample the model
/// to the stage interval, freeze a stage context, solve all reciprocal
/// sources with unit signatures, sample the receivers. All traces live.
/// precision selects the factorization scalar, f32 or f64.
fwi::FreqDataset forward_model(const model::VtiModel& m,
                               const fwi::Acquisition& acq,
                               const model::FrequencyPlan& plan,
                               const fwi::StageParams& par,
                               const std::string& precision = "f64");

/// One analytic-oracle comparison: relative L2 misfit of the solved
/// field against the closed-form prediction over the sampled annulus.
struct OracleCheck {
  double rel_l2 = 0.0;
  int n_samples = 0;
};

/// Point source in a homogeneous isotropic lossless cube against the
/// free-space kernel rho * exp(ikr)/(4 pi r). ghost false runs 6-face
/// absorbers; ghost true turns the free surface on, puts the source at a
/// quarter depth and adds the sign-flipped image-source term. Samples
/// keep min_cells from the source (and the image path's surface point)
/// and stay clear of the absorbing frame.
OracleCheck green_function_check(int n, double h, double f_hz,
                                 const fd::StencilWeightTable& table,
                                 int pml_width, bool ghost,
                                 int min_cells = 5);

/// Swap one source/receiver pair on a heterogeneous VTI configuration
/// and return the relative trace disagreement; the assembled operator is
/// complex symmetric, so this isolates the coupling transposes.
double reciprocity_check(int n, double h, double f_hz,
                         const fd::StencilWeightTable& table);

} // namespace horst::cli

#endif
