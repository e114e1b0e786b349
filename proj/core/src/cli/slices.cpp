#include "horst/cli/slices.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "horst/common/error.hpp"

namespace horst::cli {

namespace {

const std::vector<double>& field_of(const model::VtiModel& m,
                                    const std::string& name) {
  if (name == "v0") return m.v0;
  if (name == "delta") return m.delta;
  if (name == "epsilon") return m.epsilon;
  if (name == "rho") return m.rho;
  if (name == "q") return m.q;
  throw ConfigError("slice.field: unknown field " + name);
}

// central differences inside, one-sided on the faces; exact for ramps
double grad_mag(const model::VtiModel& m, int ix, int iy, int iz) {
  const Grid3& g = m.grid;
  const auto d1 = [&](int i, int n, double h, const auto& at) {
    if (n < 2) return 0.0;
    if (i == 0) return (at(1) - at(0)) / h;
    if (i == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(i + 1) - at(i - 1)) / (2.0 * h);
  };
  const double gx = d1(ix, g.dims[0], g.spacing[0], [&](int i) {
    return m.v0[std::size_t(g.index(i, iy, iz))];
  });
  const double gy = d1(iy, g.dims[1], g.spacing[1], [&](int i) {
    return m.v0[std::size_t(g.index(ix, i, iz))];
  });
  const double gz = d1(iz, g.dims[2], g.spacing[2], [&](int i) {
    return m.v0[std::size_t(g.index(ix, iy, i))];
  });
  return std::sqrt(gx * gx + gy * gy + gz * gz);
}

} // namespace

SliceData extract_slice(const model::VtiModel& m, const SliceSpec& spec) {
  m.validate();
  const Grid3& g = m.grid;
  const int axis = spec.axis == "x" ? 0 : spec.axis == "y" ? 1 : 2;
  if (spec.index < 0 || spec.index >= g.dims[axis])
    throw ConfigError("slice.index: plane " + std::to_string(spec.index) +
                      " outside axis " + spec.axis + " of size " +
                      std::to_string(g.dims[axis]));
  const std::vector<double>& f = field_of(m, spec.field);

  const int ua = axis == 0 ? 1 : 0;
  const int va = axis == 2 ? 1 : 2;
  SliceData s;
  s.nu = g.dims[ua];
  s.nv = g.dims[va];
  s.values.resize(std::size_t(s.nu) * std::size_t(s.nv));
  if (spec.overlay) s.overlay.resize(s.values.size());
  std::array<int, 3> c{0, 0, 0};
  c[axis] = spec.index;
  for (int u = 0; u < s.nu; ++u)
    for (int v = 0; v < s.nv; ++v) {
      c[ua] = u;
      c[va] = v;
      const std::size_t k = std::size_t(u) * s.nv + v;
      s.values[k] = f[std::size_t(g.index(c[0], c[1], c[2]))];
      if (spec.overlay) s.overlay[k] = grad_mag(m, c[0], c[1], c[2]);
    }
  return s;
}

void write_pgm(const std::vector<double>& values, int nu, int nv,
               const std::string& path) {
  if (values.size() != std::size_t(nu) * std::size_t(nv))
    throw ConfigError("write_pgm: shape mismatch");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path);
  out << "P5\n" << nv << " " << nu << "\n255\n";
  const double span = hi - lo;
  for (const double v : values) {
    int px = 128;
    if (span > 0.0) {
      const double c = std::isfinite(v) ? v : (v > 0.0 ? hi : lo);
      px = int(std::lround(255.0 * (c - lo) / span));
      px = std::clamp(px, 0, 255);
    }
    out.put(char(px));
  }
  if (!out) throw IoError("cannot write image: " + path);
}

void write_slice_csv(const SliceData& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write slice table: " + path);
  out.precision(17);
  for (int u = 0; u < s.nu; ++u) {
    for (int v = 0; v < s.nv; ++v) {
      if (v) out << ',';
      out << s.values[std::size_t(u) * s.nv + v];
    }
    out << "\n";
  }
  if (!out) throw IoError("cannot write slice table: " + path);
}

void export_slices(const model::VtiModel& m, const SliceSpec& spec,
                   const std::string& base_path) {
  const SliceData s = extract_slice(m, spec);
  write_pgm(s.values, s.nu, s.nv, base_path + ".pgm");
  write_slice_csv(s, base_path + ".csv");
  if (spec.overlay)
    write_pgm(s.overlay, s.nu, s.nv, base_path + "_overlay.pgm");
}

} // namespace horst::cli
