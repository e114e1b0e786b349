#ifndef HORST_FWI_OBJECTIVE_HPP
#define HORST_FWI_OBJECTIVE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "horst/fd/assemble.hpp"
#include "horst/fd/hicks.hpp"
#include "horst/fd/pml.hpp"
#include "horst/fwi/dataset.hpp"
#include "horst/mf/factorize.hpp"
#include "horst/mf/solve.hpp"
#include "horst/mf/symbolic.hpp"
#include "horst/mf/tree.hpp"
#include "horst/model/vti_model.hpp"

namespace horst::fwi {

using fd::cdouble;

/// Discretization knobs fixed for one mono-frequency stage.
struct StageParams {
  double f_ref_hz = 10.0;
  bool free_surface = true;
  int pml_width = 8;
  double pml_r0 = 1e-4;
  mf::FactorOptions fopt;
  int rhs_block = 32;
  bool estimate_signatures = true;
  fd::StencilWeightTable table;  // interpolation source for the weight field
};

/// Everything about a stage that must not move under model perturbations:
/// grid, PML profile (reference velocity taken once), dispersion weights,
/// elimination tree with its symbolic factorization, and the acquisition
/// couplings. Objective and gradient evaluations at trial models all run
/// against one frozen context, which keeps the gradient exactly the
/// derivative of the number the line search sees.
struct StageContext {
  Grid3 grid;
  double h = 0.0;
  double f_hz = 0.0;
  double f_ref_hz = 10.0;
  cdouble omega{0.0, 0.0};
  bool free_surface = true;
  fd::PmlProfile pml;
  fd::WeightField weights;
  mf::EliminationTree tree;
  mf::SymbolicFactor symb;
  mf::FactorOptions fopt;
  int rhs_block = 32;
  bool estimate_signatures = true;
  std::vector<fd::CouplingStencil> src_cpl;
  std::vector<fd::CouplingStencil> rec_cpl;
};

/// Freeze a stage context from the stage-start model. The PML reference
/// velocity is the volume mean of v0; weights come from the table at each
/// node's points-per-wavelength.
StageContext make_stage_context(const model::VtiModel& m, double f_hz,
                                const Acquisition& acq, const StageParams& par);

/// Least-squares data misfit over live traces: J = 1/2 sum |sim - obs|^2.
/// d_sim is (n_rec, n_src), one column per source, signatures applied.
double misfit(const FreqGather& obs, const Eigen::MatrixXcd& d_sim);

/// Complex least-squares signature for one source from its unit-signature
/// traces: s = <d_unit, d_obs> / <d_unit, d_unit> over live traces. A
/// source with no live traces (or an identically zero d_unit) returns 0.
cdouble estimate_signature(const FreqGather& obs, int s,
                           const Eigen::VectorXcd& unit_trace);

/// One objective evaluation at a model: assembled operator, factorization,
/// unit wavefields, signatures, masked residuals and J. Kept whole so the
/// adjoint solve of the gradient can reuse the factorization.
template <class Scalar>
struct Evaluation {
  double J = 0.0;
  std::vector<cdouble> signature;  // per source, zeros mark excluded sources
  Eigen::MatrixXcd d_unit;         // (n_rec, n_src) unit-signature traces
  Eigen::MatrixXcd residual;       // (n_rec, n_src), dead traces zeroed
  Eigen::MatrixXcd P;              // (n, n_src) unit wavefields
  fd::ImpedanceMatrix A;
  mf::Factorization<Scalar> fact;
  mf::FactorStats fstats;
  mf::SolveStats sstats;
};

/// Evaluate J at model m under the frozen context. Signatures are
/// re-estimated per call when the context says so (alternating mode),
/// otherwise taken from the gather.
template <class Scalar>
Evaluation<Scalar> evaluate(const StageContext& ctx, const model::VtiModel& m,
                            const FreqGather& obs);

/// Forward modeling only: traces (n_rec, n_src) for the given per-source
/// signatures.
template <class Scalar>
Eigen::MatrixXcd simulate(const StageContext& ctx, const model::VtiModel& m,
                          const std::vector<cdouble>& signature,
                          mf::FactorStats* fstats = nullptr,
                          mf::SolveStats* sstats = nullptr);

extern template struct Evaluation<std::complex<float>>;
extern template struct Evaluation<std::complex<double>>;
extern template Evaluation<std::complex<float>> evaluate(
    const StageContext&, const model::VtiModel&, const FreqGather&);
extern template Evaluation<std::complex<double>> evaluate(
    const StageContext&, const model::VtiModel&, const FreqGather&);
extern template Eigen::MatrixXcd simulate<std::complex<float>>(
    const StageContext&, const model::VtiModel&, const std::vector<cdouble>&,
    mf::FactorStats*, mf::SolveStats*);
extern template Eigen::MatrixXcd simulate<std::complex<double>>(
    const StageContext&, const model::VtiModel&, const std::vector<cdouble>&,
    mf::FactorStats*, mf::SolveStats*);

} // namespace horst::fwi

#endif
