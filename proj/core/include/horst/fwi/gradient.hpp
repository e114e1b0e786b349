#ifndef HORST_FWI_GRADIENT_HPP
#define HORST_FWI_GRADIENT_HPP

#include <vector>

#include "horst/fwi/objective.hpp"

namespace horst::fwi {

/// Adjoint-state misfit gradient with respect to the vertical velocity,
/// one value per grid cell:
///
///   g = -Re sum_s lambda_s^T (dA/dv0) p_s,
///
/// where p_s is the signature-scaled forward wavefield and lambda_s solves
/// A lambda_s = sum_r conj(residual_sr) R_r (the conjugated residuals
/// injected through the transpose of the receiver coupling; A is complex
/// symmetric, so the forward factorization serves the adjoint unchanged).
/// dA/dv0 carries the kappa0 chain rule of both the mass term and the
/// anelliptic term; dispersion weights and PML are frozen in the context,
/// so this is the exact derivative of what evaluate() returns. Sources are
/// reduced in index order, which keeps the result deterministic.
template <class Scalar>
std::vector<double> gradient(const StageContext& ctx, const model::VtiModel& m,
                             const FreqGather& obs,
                             const Evaluation<Scalar>& ev,
                             mf::SolveStats* sstats = nullptr);

extern template std::vector<double> gradient(const StageContext&,
                                             const model::VtiModel&,
                                             const FreqGather&,
                                             const Evaluation<std::complex<float>>&,
                                             mf::SolveStats*);
extern template std::vector<double> gradient(const StageContext&,
                                             const model::VtiModel&,
                                             const FreqGather&,
                                             const Evaluation<std::complex<double>>&,
                                             mf::SolveStats*);

} // namespace horst::fwi

#endif
