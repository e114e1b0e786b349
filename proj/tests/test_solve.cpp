#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "horst/common/error.hpp"
#include "horst/fd/assemble.hpp"
#include "horst/fd/pml.hpp"
#include "horst/fd/stencil.hpp"
#include "horst/mf/factorize.hpp"
#include "horst/mf/solve.hpp"
#include "horst/model/vti_model.hpp"

using namespace horst;
using namespace horst::mf;
using horst::model::VtiModel;
using cd = std::complex<double>;

namespace {

VtiModel homog(int n, double h, double v) {
  VtiModel m;
  m.grid.dims = {n, n, n};
  m.grid.spacing = {h, h, h};
  const size_t sz = size_t(m.grid.size());
  m.v0.assign(sz, v);
  m.epsilon.assign(sz, 0.1);
  m.delta.assign(sz, 0.04);
  m.rho.assign(sz, 1000.0);
  m.q.assign(sz, std::numeric_limits<double>::infinity());
  m.water_depth.assign(size_t(n) * n, 0);
  return m;
}

fd::PmlProfile zero_pml(const Grid3& g) {
  fd::PmlProfile p;
  for (int a = 0; a < 3; ++a) p.gamma[a].assign(size_t(g.dims[a]), 0.0);
  p.free_surface = false;
  return p;
}

fd::ImpedanceMatrix assemble_op(const VtiModel& m, double f_hz) {
  fd::WeightField wf;
  wf.grid = m.grid;
  wf.w.assign(size_t(m.grid.size()), fd::StencilWeights::classical7());
  return fd::assemble_operator(m, {2.0 * M_PI * f_hz, 0.0}, zero_pml(m.grid),
                               wf, false, 10.0);
}

struct Fixture {
  VtiModel m;
  fd::ImpedanceMatrix A;
  EliminationTree t;
  SymbolicFactor sy;
  Factorization<cd> F;

  explicit Fixture(int n, double f_hz = 9.0, int leaf = 64)
      : m(homog(n, 14.0, 1500.0)),
        A(assemble_op(m, f_hz)),
        t(build_tree(m.grid, leaf)),
        sy(symbolic_analysis(t, A)),
        F(factorize<cd>(A, t, sy, {})) {}
};

} // namespace

TEST_CASE("block width does not change the solution") {
  Fixture fx(12);
  const std::int64_t n = fx.A.n;
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd B(n, 10);
  for (int j = 0; j < 10; ++j)
    for (std::int64_t i = 0; i < n; ++i) B(i, j) = cd(g(rng), g(rng));

  Eigen::MatrixXcd X1 = B, X4 = B, Xall = B;
  SolveOptions o1, o4, oa;
  o1.rhs_block = 1;
  o4.rhs_block = 4;
  oa.rhs_block = 64;
  solve_in_place(fx.F, fx.t, X1, o1);
  solve_in_place(fx.F, fx.t, X4, o4);
  solve_in_place(fx.F, fx.t, Xall, oa);
  CHECK((X1 - X4).norm() / X1.norm() <= 1e-12);
  CHECK((X1 - Xall).norm() / X1.norm() <= 1e-12);
  CHECK(scaled_residual(fx.A, X4, B) <= 1e-13);
}

TEST_CASE("pruned forward pass agrees and saves work") {
  Fixture fx(16, 9.0, 48);
  const auto& g = fx.m.grid;
  // sources confined to one octant
  std::vector<std::int64_t> src;
  for (int x = 1; x < 7; x += 2)
    for (int y = 1; y < 7; y += 2)
      for (int z = 1; z < 7; z += 2) src.push_back(g.index(x, y, z));
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(fx.A.n, int(src.size()));
  for (size_t j = 0; j < src.size(); ++j) B(src[j], int(j)) = 1.0;

  SolveOptions on, off;
  off.prune = false;
  SolveStats sn{}, sf{};
  Eigen::MatrixXcd Xp = B, Xu = B;
  solve_in_place(fx.F, fx.t, Xp, on, &sn);
  solve_in_place(fx.F, fx.t, Xu, off, &sf);
  CHECK((Xp - Xu).cwiseAbs().maxCoeff() <= 1e-13 * Xu.cwiseAbs().maxCoeff());
  CHECK(scaled_residual(fx.A, Xp, B) <= 1e-13);

  CHECK(sf.forward_visits == sf.node_blocks);
  CHECK(sn.forward_visits < sf.forward_visits / 2); // one octant: deep skip
  CHECK(sn.backward_visits == sn.node_blocks);      // backward is never pruned
}

TEST_CASE("column ordering groups sources by subtree") {
  Fixture fx(16, 9.0, 48);
  const auto& g = fx.m.grid;
  std::mt19937 rng(11);
  // two distant clusters, columns interleaved adversarially
  std::vector<std::int64_t> src;
  for (int k = 0; k < 16; ++k) {
    const int x = (k % 2) ? 2 + int(rng() % 4) : 10 + int(rng() % 4);
    const int y = (k % 2) ? 2 + int(rng() % 4) : 10 + int(rng() % 4);
    const int z = 2 + int(rng() % 4);
    src.push_back(g.index(x, y, z));
  }
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(fx.A.n, int(src.size()));
  for (size_t j = 0; j < src.size(); ++j) B(src[j], int(j)) = 1.0;

  SolveOptions w, wo;
  w.rhs_block = 8;
  wo.rhs_block = 8;
  wo.order_columns = false;
  SolveStats sw{}, swo{};
  Eigen::MatrixXcd Xw = B, Xwo = B;
  solve_in_place(fx.F, fx.t, Xw, w, &sw);
  solve_in_place(fx.F, fx.t, Xwo, wo, &swo);
  CHECK((Xw - Xwo).cwiseAbs().maxCoeff() <= 1e-13 * Xw.cwiseAbs().maxCoeff());
  CHECK(sw.forward_visits < swo.forward_visits); // grouping pays
}

TEST_CASE("solutions honor operator symmetry") {
  Fixture fx(14);
  const auto& g = fx.m.grid;
  const std::int64_t a = g.index(3, 4, 5), b = g.index(10, 9, 8);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(fx.A.n, 2);
  B(a, 0) = 1.0;
  B(b, 1) = 1.0;
  Eigen::MatrixXcd X = B;
  solve_in_place(fx.F, fx.t, X);
  const cd pab = X(b, 0), pba = X(a, 1);
  CHECK(std::abs(pab - pba) <= 1e-12 * std::abs(pab));
}

TEST_CASE("zero and mixed columns") {
  Fixture fx(12);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(fx.A.n, 3);
  B(fx.A.n / 2, 0) = 1.0; // col 1 all zero
  B(fx.A.n / 3, 2) = cd(0.0, 2.0);
  Eigen::MatrixXcd X = B;
  solve_in_place(fx.F, fx.t, X);
  CHECK(X.col(1).norm() == 0.0);
  CHECK(scaled_residual(fx.A, X, B) <= 1e-13);

  // an entirely zero right-hand side short-circuits
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(fx.A.n, 2);
  SolveStats st{};
  solve_in_place(fx.F, fx.t, Z, {}, &st);
  CHECK(Z.norm() == 0.0);
  CHECK(st.forward_visits == 0);
  CHECK(st.backward_visits == 0);
}

TEST_CASE("scaled residual definition") {
  Fixture fx(10);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(fx.A.n, 1);
  B(17, 0) = cd(1.0, -2.0);
  // x = 0: residual reduces to |b| / |b|
  Eigen::MatrixXcd X0 = Eigen::MatrixXcd::Zero(fx.A.n, 1);
  CHECK(scaled_residual(fx.A, X0, B) == doctest::Approx(1.0));
  CHECK_THROWS_AS(scaled_residual(fx.A, Eigen::MatrixXcd::Zero(3, 1), B),
                  ConfigError);
}

TEST_CASE("shape guards") {
  Fixture fx(10);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(17, 1);
  CHECK_THROWS_AS(solve_in_place(fx.F, fx.t, bad), ConfigError);
}
