#ifndef HORST_FWI_TV_HPP
#define HORST_FWI_TV_HPP

#include <vector>

#include "horst/common/grid.hpp"

namespace horst::fwi {

/// Isotropic total variation with forward differences (one-sided zeros on
/// the far faces).
double total_variation(const Grid3& g, const std::vector<double>& u);

/// Proximal TV denoising: argmin_u 1/2 ||u - m||^2 + lambda TV(u), solved
/// by the dual projection iteration on the constraint |p| <= 1. Runs until
/// the duality gap drops below gap_tol or max_iter sweeps, whichever comes
/// first. lambda = 0 returns the input unchanged.
std::vector<double> tv_denoise(const Grid3& g, const std::vector<double>& m,
                               double lambda, int max_iter = 100,
                               double gap_tol = 1e-6);

} // namespace horst::fwi

#endif
