#ifndef HORST_FD_ASSEMBLE_HPP
#define HORST_FD_ASSEMBLE_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "horst/common/grid.hpp"
#include "horst/fd/pml.hpp"
#include "horst/fd/stencil.hpp"
#include "horst/model/vti_model.hpp"

namespace horst::fd {

using cdouble = std::complex<double>;

/// Sparse impedance operator in compressed-column form. Values are complex
/// symmetric by construction (the pattern is, too), so columns double as
/// rows. Pattern is the full 27-node box clipped to the grid, with
/// structural zeros kept so the pattern does not depend on material values.
struct ImpedanceMatrix {
  Grid3 grid;
  cdouble omega{0.0, 0.0};
  bool free_surface = false;
  std::int64_t n = 0;
  std::vector<std::int64_t> colptr;
  std::vector<std::int32_t> rowind;
  std::vector<cdouble> val;

  std::int64_t nnz() const { return std::int64_t(rowind.size()); }
  void multiply(const cdouble* x, cdouble* y) const;  // y = A x
  void multiply(const std::vector<cdouble>& x, std::vector<cdouble>& y) const;
  double norm_inf() const;  // max absolute row sum
  void dump_triplets(std::ostream& os) const;  // "row col re im" lines
};

/// Per-node interpolated dispersion weights, frozen once per stage from a
/// reference model so that operator derivatives taken during inversion see
/// constant weights.
struct WeightField {
  Grid3 grid;
  std::vector<StencilWeights> w;
};

/// Interpolate table weights at each node's local points-per-wavelength
/// |c_tilde|/(f*h). Below the table floor is a hard error; above the table
/// ceiling clamps.
WeightField make_weight_field(const model::VtiModel& m, const StencilWeightTable& t,
                              double f_hz, double f_ref_hz);

/// Node-centred coefficient fields entering the operator, kept so that the
/// misfit gradient can re-walk the same loops with material derivatives.
/// All PML stretches are baked in at a fixed omega.
struct AssemblyFields {
  Grid3 grid;
  cdouble omega{0.0, 0.0};
  bool free_surface = false;
  double h = 0.0;
  std::array<std::vector<cdouble>, 3> ca;     // per-axis elliptic coefficient
  std::vector<cdouble> cbar;                  // isotropic mean of ca
  std::array<std::vector<cdouble>, 3> ga;     // 1/(rho s_a), flux factors
  std::array<std::vector<cdouble>, 3> inv_s;  // 1/s_a at nodes
  std::vector<cdouble> mass;                  // s_x s_y s_z / kappa0
  std::vector<cdouble> kappa0;
  std::vector<cdouble> f_ane;                 // anelliptic prefactor
  std::vector<double> inv_v0;

  bool dirichlet(int iz) const { return free_surface && iz == 0; }
};

AssemblyFields make_assembly_fields(const model::VtiModel& m, cdouble omega,
                                    const PmlProfile& pml, bool free_surface,
                                    double f_ref_hz);

/// One kappa0-bearing term of the anelliptic entry T(i,j): the cell whose
/// kappa0 it samples and the term's value.
struct AneTerm {
  std::int64_t kcell = -1;
  cdouble value{0.0, 0.0};
};

/// Decompose T(i,j) into its per-horizontal-axis terms; returns the count
/// (0..2). Same caller contract as the assembly: cj inside the grid, the
/// offset confined to the vertical coordinate planes of the 27-box. The
/// misfit gradient re-walks entries through this to pick up the kappa0
/// chain rule without duplicating the formula.
int anelliptic_terms(const AssemblyFields& f, const std::array<int, 3>& ci,
                     const std::array<int, 3>& cj, std::array<AneTerm, 2>& out);

ImpedanceMatrix assemble_operator(const AssemblyFields& f,
                                  const WeightField& w);

ImpedanceMatrix assemble_operator(const model::VtiModel& m, cdouble omega,
                                  const PmlProfile& pml, const WeightField& w,
                                  bool free_surface, double f_ref_hz);

} // namespace horst::fd

#endif
