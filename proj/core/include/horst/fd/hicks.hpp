#ifndef HORST_FD_HICKS_HPP
#define HORST_FD_HICKS_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "horst/common/grid.hpp"

namespace horst::fd {

/// Kaiser-windowed sinc coupling between an off-grid point and the mesh.
/// One stencil serves both injection (scatter) and sampling (gather) with
/// the same coefficients, so the two operators are exact transposes.
/// The gain calibrates the scheme's point-source amplitude response; it
/// multiplies both directions, which keeps the transpose pairing and
/// source-receiver reciprocity exact.
struct CouplingStencil {
  std::vector<int64_t> index;  // grid node indices, strictly increasing
  std::vector<double> coef;
  double gain = 1.0;
};

struct HicksParams {
  int radius = 4;
  double b = 6.31;  // Kaiser shape parameter
};

/// Build the stencil for a point given in meters. With free_surface the
/// pressure-release plane sits at iz = 0: kernel weights above it fold
/// back with odd symmetry and the plane itself receives nothing. Nodes
/// falling outside the grid on the other faces are dropped. A point on a
/// node collapses to that single node with unit weight.
CouplingStencil make_coupling(const Grid3& grid,
                              const std::array<double, 3>& pos_m,
                              bool free_surface,
                              const HicksParams& par = {});

/// Scatter: out[index[k]] += gain * amp * coef[k].
void inject(const CouplingStencil& s, std::complex<double> amp,
            std::vector<std::complex<double>>& out);

/// Gather: gain * sum coef[k] * field[index[k]]. Transpose of inject.
std::complex<double> sample(const CouplingStencil& s,
                            const std::vector<std::complex<double>>& field);

} // namespace horst::fd

#endif
