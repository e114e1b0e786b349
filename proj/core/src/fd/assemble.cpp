#include "horst/fd/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "horst/common/error.hpp"

namespace horst::fd {

namespace {

const std::array<std::array<int, 3>, 6> kAxisNbr = {{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

const std::array<std::array<int, 3>, 12> kEdgeNbr = {{
    {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
    {1, 0, 1}, {-1, 0, -1}, {1, 0, -1}, {-1, 0, 1},
    {0, 1, 1}, {0, -1, -1}, {0, 1, -1}, {0, -1, 1}}};

const std::array<std::array<int, 3>, 8> kCornerNbr = {{
    {1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1},
    {-1, 1, 1}, {-1, 1, -1}, {-1, -1, 1}, {-1, -1, -1}}};

} // namespace

void ImpedanceMatrix::multiply(const cdouble* x, cdouble* y) const {
  for (std::int64_t i = 0; i < n; ++i) y[i] = cdouble(0.0, 0.0);
  for (std::int64_t j = 0; j < n; ++j) {
    const cdouble xj = x[j];
    for (std::int64_t k = colptr[j]; k < colptr[j + 1]; ++k)
      y[rowind[k]] += val[k] * xj;
  }
}

void ImpedanceMatrix::multiply(const std::vector<cdouble>& x,
                               std::vector<cdouble>& y) const {
  y.assign(static_cast<size_t>(n), cdouble(0.0, 0.0));
  multiply(x.data(), y.data());
}

double ImpedanceMatrix::norm_inf() const {
  std::vector<double> row_sum(static_cast<size_t>(n), 0.0);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t k = colptr[j]; k < colptr[j + 1]; ++k)
      row_sum[static_cast<size_t>(rowind[k])] += std::abs(val[k]);
  double m = 0.0;
  for (double s : row_sum) m = std::max(m, s);
  return m;
}

void ImpedanceMatrix::dump_triplets(std::ostream& os) const {
  char buf[128];
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t k = colptr[j]; k < colptr[j + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n",
                    static_cast<long long>(rowind[k]),
                    static_cast<long long>(j), val[k].real(), val[k].imag());
      os << buf;
    }
}

WeightField make_weight_field(const model::VtiModel& m, const StencilWeightTable& t,
                              double f_hz, double f_ref_hz) {
  if (f_hz <= 0.0) throw ConfigError("frequency must be positive");
  if (t.rows.empty()) throw ConfigError("empty weight table");
  WeightField wf;
  wf.grid = m.grid;
  const std::int64_t n = m.grid.size();
  wf.w.resize(static_cast<size_t>(n));
  const double h = m.grid.spacing[0];
  const double g_min = t.g.front();
  const double g_max = t.g.back();
  for (std::int64_t i = 0; i < n; ++i) {
    const auto ct = model::kolsky_futterman_velocity(m.v0[i], m.q[i], f_hz, f_ref_hz);
    double g = std::abs(ct) / (f_hz * h);
    if (g < g_min * (1.0 - 1e-9))
      throw ConfigError("local sampling of " + std::to_string(g) +
                        " points per wavelength is below the supported " +
                        std::to_string(g_min));
    g = std::min(g, g_max);
    wf.w[i] = t.interpolate(g);
  }
  return wf;
}

AssemblyFields make_assembly_fields(const model::VtiModel& m, cdouble omega,
                                    const PmlProfile& pml, bool free_surface,
                                    double f_ref_hz) {
  m.validate();
  const Grid3& g = m.grid;
  const double h = g.spacing[0];
  if (std::abs(g.spacing[1] - h) > 1e-9 * h ||
      std::abs(g.spacing[2] - h) > 1e-9 * h)
    throw ConfigError("operator assembly requires cubic cells");
  if (omega.real() <= 0.0)
    throw ConfigError("Re(omega) must be positive");
  const double f_hz = omega.real() / (2.0 * M_PI);

  AssemblyFields fl;
  fl.grid = g;
  fl.omega = omega;
  fl.free_surface = free_surface;
  fl.h = h;
  const size_t n = static_cast<size_t>(g.size());
  for (int a = 0; a < 3; ++a) {
    fl.ca[a].resize(n);
    fl.ga[a].resize(n);
    fl.inv_s[a].resize(n);
  }
  fl.cbar.resize(n);
  fl.mass.resize(n);
  fl.kappa0.resize(n);
  fl.f_ane.resize(n);
  fl.inv_v0.resize(n);

  const cdouble om2 = omega * omega;
  for (int ix = 0; ix < g.nx(); ++ix) {
    const cdouble sx = pml.stretch(0, ix, omega);
    for (int iy = 0; iy < g.ny(); ++iy) {
      const cdouble sy = pml.stretch(1, iy, omega);
      for (int iz = 0; iz < g.nz(); ++iz) {
        const cdouble sz = pml.stretch(2, iz, omega);
        const size_t i = static_cast<size_t>(g.index(ix, iy, iz));
        const cdouble ct =
            model::kolsky_futterman_velocity(m.v0[i], m.q[i], f_hz, f_ref_hz);
        const cdouble k0 = m.rho[i] * ct * ct;
        const cdouble sp = sx * sy * sz;
        const double horiz = 1.0 + 2.0 * m.epsilon[i];
        const cdouble base = sp / m.rho[i];
        fl.ca[0][i] = horiz * base / (sx * sx);
        fl.ca[1][i] = horiz * base / (sy * sy);
        fl.ca[2][i] = base / (sz * sz);
        fl.cbar[i] = (fl.ca[0][i] + fl.ca[1][i] + fl.ca[2][i]) / 3.0;
        fl.ga[0][i] = 1.0 / (m.rho[i] * sx);
        fl.ga[1][i] = 1.0 / (m.rho[i] * sy);
        fl.ga[2][i] = 1.0 / (m.rho[i] * sz);
        fl.inv_s[0][i] = 1.0 / sx;
        fl.inv_s[1][i] = 1.0 / sy;
        fl.inv_s[2][i] = 1.0 / sz;
        fl.kappa0[i] = k0;
        fl.mass[i] = sp / k0;
        fl.f_ane[i] = sp * 2.0 * (m.epsilon[i] - m.delta[i]) / om2;
        fl.inv_v0[i] = 1.0 / m.v0[i];
      }
    }
  }
  return fl;
}

// The anelliptic entry of f_i * (X+Y)(kappa0 * Z) is built from
// conservative one-axis differences; cj must be in the grid and the
// horizontal step must stay inside it (callers guarantee both).
int anelliptic_terms(const AssemblyFields& f, const std::array<int, 3>& ci,
                     const std::array<int, 3>& cj, std::array<AneTerm, 2>& out) {
  const Grid3& g = f.grid;
  const double inv_h2 = 1.0 / (f.h * f.h);
  const double inv_h4 = inv_h2 * inv_h2;
  const size_t i = static_cast<size_t>(g.index(ci[0], ci[1], ci[2]));
  const int dz = cj[2] - ci[2];
  const auto line_avg = [&](const std::vector<cdouble>& v, size_t at, int ix,
                            int iy, int iz) {
    if (!g.contains(ix, iy, iz)) return v[at];
    return 0.5 * (v[at] + v[static_cast<size_t>(g.index(ix, iy, iz))]);
  };
  int n = 0;
  for (int a = 0; a < 2; ++a) {
    const int o = 1 - a;
    if (cj[o] != ci[o]) continue;
    const int da = cj[a] - ci[a];
    std::array<int, 3> p = ci, q = ci, mcell = ci;
    p[a] += 1;
    q[a] -= 1;
    mcell[a] += da;
    const cdouble gp = line_avg(f.ga[a], i, p[0], p[1], p[2]);
    const cdouble gm = line_avg(f.ga[a], i, q[0], q[1], q[2]);
    cdouble axw;
    if (da == 1)
      axw = gp;
    else if (da == -1)
      axw = gm;
    else
      axw = -(gp + gm);
    const size_t mi =
        static_cast<size_t>(g.index(mcell[0], mcell[1], mcell[2]));
    std::array<int, 3> zp = mcell, zm = mcell;
    zp[2] += 1;
    zm[2] -= 1;
    const cdouble bp = line_avg(f.ga[2], mi, zp[0], zp[1], zp[2]);
    const cdouble bm = line_avg(f.ga[2], mi, zm[0], zm[1], zm[2]);
    cdouble bzw;
    if (dz == 1)
      bzw = bp;
    else if (dz == -1)
      bzw = bm;
    else
      bzw = -(bp + bm);
    out[n].kcell = std::int64_t(mi);
    out[n].value = f.f_ane[i] * f.inv_s[a][i] * axw * f.kappa0[mi] *
                   f.inv_s[2][mi] * bzw * inv_h4;
    ++n;
  }
  return n;
}

namespace {

struct RowBuilder {
  const AssemblyFields& f;
  const WeightField& wf;
  const Grid3& g;
  double inv_h2;
  double inv_h4;

  RowBuilder(const AssemblyFields& fl, const WeightField& w)
      : f(fl), wf(w), g(fl.grid) {
    inv_h2 = 1.0 / (fl.h * fl.h);
    inv_h4 = inv_h2 * inv_h2;
  }

  bool valid(int ix, int iy, int iz) const {
    return g.contains(ix, iy, iz) && !f.dirichlet(iz);
  }

  // one-sided average of a nodal field along a line end
  cdouble line_avg(const std::vector<cdouble>& v, size_t i, int ix, int iy,
                   int iz) const {
    if (!g.contains(ix, iy, iz)) return v[i];
    return 0.5 * (v[i] + v[static_cast<size_t>(g.index(ix, iy, iz))]);
  }
  double wavg(double StencilWeights::*mem, size_t i, int ix, int iy,
              int iz) const {
    if (!g.contains(ix, iy, iz)) return wf.w[i].*mem;
    return 0.5 *
           (wf.w[i].*mem + wf.w[static_cast<size_t>(g.index(ix, iy, iz))].*mem);
  }

  // anelliptic cross-term entry T(i,j), summed over its per-axis terms
  cdouble t_entry(const std::array<int, 3>& ci,
                  const std::array<int, 3>& cj) const {
    std::array<AneTerm, 2> t;
    const int n = anelliptic_terms(f, ci, cj, t);
    cdouble s(0.0, 0.0);
    for (int k = 0; k < n; ++k) s += t[k].value;
    return s;
  }

  // full 27-slot row for an interior node; acc is indexed
  // (dx+1)*9 + (dy+1)*3 + (dz+1)
  void build(int ix, int iy, int iz, std::array<cdouble, 27>& acc) const {
    acc.fill(cdouble(0.0, 0.0));
    const size_t i = static_cast<size_t>(g.index(ix, iy, iz));
    const cdouble om2 = f.omega * f.omega;
    auto slot = [](int dx, int dy, int dz) {
      return (dx + 1) * 9 + (dy + 1) * 3 + (dz + 1);
    };
    const int center = slot(0, 0, 0);

    // axis lines carry the full per-axis coefficient; the isotropic part
    // is weighted, the anisotropic deviation is not
    for (const auto& d : kAxisNbr) {
      const int a = d[0] != 0 ? 0 : (d[1] != 0 ? 1 : 2);
      const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
      const cdouble cbm = line_avg(f.cbar, i, jx, jy, jz);
      const cdouble cam = line_avg(f.ca[a], i, jx, jy, jz);
      const double w1 = wavg(&StencilWeights::w1, i, jx, jy, jz);
      const cdouble mu = (w1 * cbm + (cam - cbm)) * inv_h2;
      acc[center] -= mu;
      if (valid(jx, jy, jz)) acc[slot(d[0], d[1], d[2])] += mu;
    }
    for (const auto& d : kEdgeNbr) {
      const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
      const cdouble mu = wavg(&StencilWeights::w2, i, jx, jy, jz) *
                         line_avg(f.cbar, i, jx, jy, jz) * 0.25 * inv_h2;
      acc[center] -= mu;
      if (valid(jx, jy, jz)) acc[slot(d[0], d[1], d[2])] += mu;
    }
    for (const auto& d : kCornerNbr) {
      const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
      const cdouble mu = wavg(&StencilWeights::w3, i, jx, jy, jz) *
                         line_avg(f.cbar, i, jx, jy, jz) * 0.25 * inv_h2;
      acc[center] -= mu;
      if (valid(jx, jy, jz)) acc[slot(d[0], d[1], d[2])] += mu;
    }

    // distributed mass
    acc[center] += om2 * wf.w[i].wm_center * f.mass[i];
    for (const auto& d : kAxisNbr) {
      const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
      if (!valid(jx, jy, jz)) continue;
      acc[slot(d[0], d[1], d[2])] +=
          om2 * wavg(&StencilWeights::wm_face, i, jx, jy, jz) *
          line_avg(f.mass, i, jx, jy, jz) / 6.0;
    }
    for (const auto& d : kEdgeNbr) {
      const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
      if (!valid(jx, jy, jz)) continue;
      acc[slot(d[0], d[1], d[2])] +=
          om2 * wavg(&StencilWeights::wm_edge, i, jx, jy, jz) *
          line_avg(f.mass, i, jx, jy, jz) / 12.0;
    }
    for (const auto& d : kCornerNbr) {
      const int jx = ix + d[0], jy = iy + d[1], jz = iz + d[2];
      if (!valid(jx, jy, jz)) continue;
      acc[slot(d[0], d[1], d[2])] +=
          om2 * wavg(&StencilWeights::wm_corner, i, jx, jy, jz) *
          line_avg(f.mass, i, jx, jy, jz) / 8.0;
    }

    // anelliptic cross term, symmetrized in place; its pattern is the two
    // vertical coordinate planes of the box
    const std::array<int, 3> ci{ix, iy, iz};
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx != 0 && dy != 0) continue;
        for (int dz = -1; dz <= 1; ++dz) {
          const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
          if (dx == 0 && dy == 0 && dz == 0) {
            acc[center] += t_entry(ci, ci);
            continue;
          }
          if (!valid(jx, jy, jz)) continue;
          const std::array<int, 3> cj{jx, jy, jz};
          acc[slot(dx, dy, dz)] +=
              0.5 * (t_entry(ci, cj) + t_entry(cj, ci));
        }
      }
  }
};

} // namespace

ImpedanceMatrix assemble_operator(const AssemblyFields& f,
                                  const WeightField& w) {
  const Grid3& g = f.grid;
  if (w.grid.dims != g.dims)
    throw ConfigError("weight field grid does not match the model grid");
  ImpedanceMatrix A;
  A.grid = g;
  A.omega = f.omega;
  A.free_surface = f.free_surface;
  A.n = g.size();
  A.colptr.assign(static_cast<size_t>(A.n) + 1, 0);

  // structural count per column: every in-grid non-boundary box neighbour
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int iz = 0; iz < g.nz(); ++iz) {
        const std::int64_t i = g.index(ix, iy, iz);
        if (f.dirichlet(iz)) {
          A.colptr[i + 1] = 1;
          continue;
        }
        int cnt = 0;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
              if (g.contains(jx, jy, jz) && !f.dirichlet(jz)) ++cnt;
            }
        A.colptr[i + 1] = cnt;
      }
  for (std::int64_t i = 0; i < A.n; ++i) A.colptr[i + 1] += A.colptr[i];
  A.rowind.resize(static_cast<size_t>(A.colptr[A.n]));
  A.val.resize(static_cast<size_t>(A.colptr[A.n]));

  RowBuilder rb(f, w);
  std::array<cdouble, 27> acc{};
  std::vector<std::pair<std::int32_t, cdouble>> col;
  col.reserve(27);
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int iz = 0; iz < g.nz(); ++iz) {
        const std::int64_t i = g.index(ix, iy, iz);
        std::int64_t p = A.colptr[i];
        if (f.dirichlet(iz)) {
          // kept as an explicit row scaled like the stiffness diagonal
          A.rowind[p] = static_cast<std::int32_t>(i);
          A.val[p] = 6.0 * std::abs(f.cbar[static_cast<size_t>(i)]) *
                     rb.inv_h2;
          continue;
        }
        rb.build(ix, iy, iz, acc);
        col.clear();
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
              if (!g.contains(jx, jy, jz) || f.dirichlet(jz)) continue;
              col.emplace_back(static_cast<std::int32_t>(g.index(jx, jy, jz)),
                               acc[(dx + 1) * 9 + (dy + 1) * 3 + (dz + 1)]);
            }
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [r, v] : col) {
          A.rowind[p] = r;
          A.val[p] = v;
          ++p;
        }
      }
  return A;
}

ImpedanceMatrix assemble_operator(const model::VtiModel& m, cdouble omega,
                                  const PmlProfile& pml, const WeightField& w,
                                  bool free_surface, double f_ref_hz) {
  const AssemblyFields f =
      make_assembly_fields(m, omega, pml, free_surface, f_ref_hz);
  return assemble_operator(f, w);
}

} // namespace horst::fd
