#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "horst/common/error.hpp"
#include "horst/fd/hicks.hpp"

using horst::ConfigError;
using horst::Grid3;
using horst::fd::CouplingStencil;
using horst::fd::HicksParams;
using horst::fd::inject;
using horst::fd::make_coupling;
using horst::fd::sample;
using cd = std::complex<double>;

namespace {

Grid3 make_grid(int n, double h) {
  Grid3 g;
  g.dims = {n, n, n};
  g.spacing = {h, h, h};
  g.origin = {0, 0, 0};
  return g;
}

// reference windowed-sinc weight, written out independently
double oracle_kernel(double x, int r, double b) {
  if (std::abs(x) > r) return 0.0;
  const double s =
      std::abs(x) < 1e-12 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
  const double arg = 1.0 - (x / r) * (x / r);
  return s * std::cyl_bessel_i(0.0, b * std::sqrt(arg)) /
         std::cyl_bessel_i(0.0, b);
}

} // namespace

TEST_CASE("point on a node collapses to that node") {
  const Grid3 g = make_grid(16, 50.0);
  const auto s = make_coupling(g, {350.0, 500.0, 200.0}, false);
  REQUIRE(s.index.size() == 1);
  CHECK(s.index[0] == g.index(7, 10, 4));
  CHECK(s.coef[0] == 1.0);

  std::vector<cd> field(g.size(), cd(0.0, 0.0));
  field[size_t(g.index(7, 10, 4))] = cd(3.25, -1.5);
  CHECK(sample(s, field) == cd(3.25, -1.5));
}

TEST_CASE("off-node weights match the separable windowed sinc") {
  const Grid3 g = make_grid(24, 10.0);
  const HicksParams par;
  const std::array<double, 3> pos{107.3, 119.9, 111.4};
  const auto s = make_coupling(g, pos, false, par);
  // full 9^3 support here, all inside the grid
  CHECK(s.index.size() == (2 * par.radius) * (2 * par.radius) *
                              (2 * par.radius));
  double sum = 0.0;
  for (size_t k = 0; k < s.index.size(); ++k) {
    const auto c = g.cell(s.index[k]);
    const double w = oracle_kernel(c[0] - pos[0] / 10.0, par.radius, par.b) *
                     oracle_kernel(c[1] - pos[1] / 10.0, par.radius, par.b) *
                     oracle_kernel(c[2] - pos[2] / 10.0, par.radius, par.b);
    CHECK(s.coef[k] == doctest::Approx(w).epsilon(1e-13));
    sum += s.coef[k];
  }
  // windowed sinc nearly partitions unity
  CHECK(sum == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("axis-aligned fractional offset stays on one grid line") {
  const Grid3 g = make_grid(20, 25.0);
  // x offset only, y and z on nodes
  const auto s = make_coupling(g, {25.0 * 9.5, 25.0 * 11, 25.0 * 6}, false);
  CHECK(s.index.size() == 8);
  for (auto idx : s.index) {
    const auto c = g.cell(idx);
    CHECK(c[1] == 11);
    CHECK(c[2] == 6);
  }
}

TEST_CASE("injection and sampling are exact transposes") {
  const Grid3 g = make_grid(18, 30.0);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<CouplingStencil> pts;
  for (int t = 0; t < 6; ++t) {
    std::array<double, 3> pos{};
    for (int a = 0; a < 3; ++a)
      pos[a] = 30.0 * (4.0 + 9.0 * std::abs(u(rng)));
    pts.push_back(make_coupling(g, pos, t % 2 == 0));
  }
  std::vector<cd> p(g.size());
  for (auto& v : p) v = cd(u(rng), u(rng));
  std::vector<cd> w(pts.size());
  for (auto& v : w) v = cd(u(rng), u(rng));

  // gains scale both directions, so the pairing survives any values
  for (size_t t = 0; t < pts.size(); ++t) pts[t].gain = 0.5 + 0.1 * double(t);

  cd lhs(0.0, 0.0);
  for (size_t t = 0; t < pts.size(); ++t) lhs += w[t] * sample(pts[t], p);
  std::vector<cd> inj(g.size(), cd(0.0, 0.0));
  for (size_t t = 0; t < pts.size(); ++t) inject(pts[t], w[t], inj);
  cd rhs(0.0, 0.0);
  for (size_t i = 0; i < p.size(); ++i) rhs += inj[i] * p[i];
  CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(lhs));
}

TEST_CASE("coupling gain defaults to identity and scales sampling linearly") {
  const Grid3 g = make_grid(16, 25.0);
  CouplingStencil s = make_coupling(g, {25.0 * 7.3, 25.0 * 6.1, 25.0 * 8.9}, false);
  CHECK(s.gain == 1.0);
  std::vector<cd> p(g.size(), cd(2.0, -1.0));
  const cd base = sample(s, p);
  s.gain = 0.25;
  CHECK(std::abs(sample(s, p) - 0.25 * base) <= 1e-15 * std::abs(base));
}

TEST_CASE("near-surface stencil folds with odd symmetry") {
  const Grid3 g = make_grid(20, 10.0);
  const HicksParams par;
  const std::array<double, 3> pos{96.6, 103.8, 23.0};  // 2.3 cells deep
  const auto s = make_coupling(g, pos, true, par);

  // fold the free-space kernel by hand
  std::map<int64_t, double> expect;
  const std::array<double, 3> gc{9.66, 10.38, 2.3};
  for (int jx = 5; jx <= 14; ++jx)
    for (int jy = 6; jy <= 15; ++jy)
      for (int jz = -6; jz <= 7; ++jz) {
        const double w = oracle_kernel(jx - gc[0], par.radius, par.b) *
                         oracle_kernel(jy - gc[1], par.radius, par.b) *
                         oracle_kernel(jz - gc[2], par.radius, par.b);
        if (w == 0.0) continue;
        int z = jz;
        double v = w;
        if (z < 0) {
          z = -z;
          v = -v;
        }
        if (z == 0) continue;
        expect[g.index(jx, jy, z)] += v;
      }
  REQUIRE(s.index.size() == expect.size());
  for (size_t k = 0; k < s.index.size(); ++k) {
    auto it = expect.find(s.index[k]);
    REQUIRE(it != expect.end());
    CHECK(s.coef[k] == doctest::Approx(it->second).epsilon(1e-12));
    const auto c = g.cell(s.index[k]);
    CHECK(c[2] >= 1);  // nothing on the pressure-release plane
  }
}

TEST_CASE("deep points ignore the free-surface flag") {
  const Grid3 g = make_grid(20, 10.0);
  const std::array<double, 3> pos{96.6, 103.8, 97.7};
  const auto a = make_coupling(g, pos, false);
  const auto b = make_coupling(g, pos, true);
  REQUIRE(a.index.size() == b.index.size());
  for (size_t k = 0; k < a.index.size(); ++k) {
    CHECK(a.index[k] == b.index[k]);
    CHECK(a.coef[k] == b.coef[k]);
  }
}

TEST_CASE("points outside the grid are rejected") {
  const Grid3 g = make_grid(12, 10.0);
  CHECK_THROWS_AS(make_coupling(g, {-20.0, 50.0, 50.0}, false), ConfigError);
  CHECK_THROWS_AS(make_coupling(g, {50.0, 50.0, 150.0}, false), ConfigError);
}

TEST_CASE("construction is deterministic") {
  const Grid3 g = make_grid(16, 12.5);
  const std::array<double, 3> pos{71.1, 88.8, 93.2};
  const auto a = make_coupling(g, pos, true);
  const auto b = make_coupling(g, pos, true);
  REQUIRE(a.index.size() == b.index.size());
  for (size_t k = 0; k < a.index.size(); ++k) {
    CHECK(a.index[k] == b.index[k]);
    CHECK(a.coef[k] == b.coef[k]);
  }
}
