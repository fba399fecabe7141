#include "hjb/mdp.hpp"

#include <doctest.h>

#include <cmath>

using namespace hjb;

namespace {

LagrangianSpec spec01() { return make_lagrangian(3.0, 0.1, RunningCost::zero()); }

} // namespace

TEST_CASE("velocity sets") {
  VelocitySet u = VelocitySet::uniform_1d(2.0, 0.5);
  CHECK(u.size() == 9);
  CHECK(u[0].norm() == 0.0);  // sorted by speed, zero first
  bool has_max = false;
  for (const Vec2& v : u.items) has_max |= v[0] == 2.0;
  CHECK(has_max);

  VelocitySet g = VelocitySet::graded_1d(1.0, 0.25, 8.0, 2.0);
  // magnitudes {0.25,0.5,0.75,1,2,4,8} both signs plus zero
  CHECK(g.size() == 15);
  g.ensure_cap(10.0);
  CHECK(g.size() == 17);
}

TEST_CASE("spec example: h=0.1, eps=0.1, vmax=2 gives nonnegative weights") {
  // The cap 2*eps/h equals 2 here, so the uniform set saturates it exactly.
  auto grid = build_grid(make_interval(1.0), 0.1);
  DiscreteMdp mdp = assemble_mdp(grid, spec01(), 2.0, 0.25);
  CHECK(mdp.cap() == doctest::Approx(2.0));
  for (int i = 0; i < mdp.nodes(); ++i)
    for (int k : mdp.admissible_set(i)) {
      const auto row = mdp.probability_row(i, k);
      double sum = 0.0;
      for (int t = 0; t < row.n; ++t) {
        CHECK(row.w[t] >= -1e-15);
        sum += row.w[t];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("interior stencil at v=0 is symmetric pure diffusion") {
  auto grid = build_grid(make_interval(1.0), 0.1);
  DiscreteMdp mdp = assemble_mdp(grid, spec01(), 2.0, 0.5);
  const int mid = grid->origin;
  int v0 = -1;
  for (int k = 0; k < mdp.velocities().size(); ++k)
    if (mdp.velocities()[k].norm() == 0.0) v0 = k;
  REQUIRE(v0 >= 0);
  const auto st = mdp.stencil(mid, v0);
  REQUIRE(st.n == 2);
  CHECK(st.rate[0] == doctest::Approx(st.rate[1]));
  CHECK(st.rate[0] == doctest::Approx(0.1 / 0.01));  // eps/h^2
}

TEST_CASE("boundary admissibility pins the confining velocity") {
  auto grid = build_grid(make_interval(1.0), 0.1);
  DiscreteMdp mdp = assemble_mdp(grid, spec01(), 2.0, 0.5);
  const int right = grid->size() - 1;
  const auto& adm = mdp.admissible_set(right);
  REQUIRE(adm.size() == 1);
  // At x = +a every v > 0 (and every sub-cap speed) upwinds out of the grid;
  // only v = -2 eps/h keeps the stencil inside.
  CHECK(mdp.velocities()[adm[0]][0] == doctest::Approx(-mdp.cap()));
  for (int k = 0; k < mdp.velocities().size(); ++k)
    if (mdp.velocities()[k][0] > 0) CHECK(!mdp.admissible(right, k));
  // Its one-sided diffusion leg carries the full rate 2 eps/h^2.
  const auto st = mdp.stencil(right, adm[0]);
  REQUIRE(st.n == 1);
  CHECK(st.idx[0] == right - 1);
  CHECK(st.rate[0] == doctest::Approx(2.0 * 0.1 / 0.01));

  const int left = 0;
  const auto& adml = mdp.admissible_set(left);
  REQUIRE(adml.size() == 1);
  CHECK(mdp.velocities()[adml[0]][0] == doctest::Approx(mdp.cap()));
}

TEST_CASE("row coefficients annihilate constants") {
  auto grid = build_grid(make_interval(1.0), 0.1);
  DiscreteMdp mdp = assemble_mdp(grid, spec01(), 2.0, 0.5);
  const VectorXd ones = VectorXd::Constant(grid->size(), 3.7);
  for (int i = 0; i < mdp.nodes(); ++i)
    for (int k : mdp.admissible_set(i))
      CHECK(mdp.generator_row(i, k, ones) == 0.0);
}

TEST_CASE("assembly errors") {
  auto grid = build_grid(make_interval(1.0), 0.1);
  // CFL violation: a velocity beyond 2 eps/h would make a weight negative.
  CHECK_THROWS_WITH_AS(assemble_mdp(grid, spec01(), VelocitySet::uniform_1d(3.0, 0.5)),
                       doctest::Contains("cap"), Error);
  // Time step above the natural one drives the self-weight negative.
  MdpOptions opts;
  opts.dt_override = 1.0;
  CHECK_THROWS_WITH_AS(assemble_mdp(grid, spec01(), 2.0, 0.5, opts),
                       doctest::Contains("self-weight"), Error);
  // Without the pinned cap velocities the wall nodes have no admissible row.
  VelocitySet small = VelocitySet::uniform_1d(1.0, 0.5);
  CHECK_THROWS_WITH_AS(DiscreteMdp(grid, spec01(), small),
                       doctest::Contains("admissible"), Error);
  // The state-constraint chain is a p > 2 construction.
  CHECK_THROWS_AS(assemble_mdp(grid, make_lagrangian(2.0, 0.1, RunningCost::zero()),
                               2.0, 0.5),
                  Error);
}

TEST_CASE("stage costs and pairing") {
  LagrangianSpec spec = make_lagrangian(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  auto grid = build_grid(make_interval(1.0), 0.1);
  DiscreteMdp mdp = assemble_mdp(grid, spec, 2.0, 0.5);
  for (int k : mdp.admissible_set(grid->origin)) {
    const Vec2& v = mdp.velocities()[k];
    CHECK(mdp.stage_cost(grid->origin, k) ==
          doctest::Approx(lagrangian_value(spec, point1d(0.0), v)));
    CHECK(mdp.pairing(grid->origin, k) ==
          doctest::Approx(radial_gradient_pairing(spec, point1d(0.0), v)));
  }
}

TEST_CASE("two-dimensional disk chain") {
  auto grid = build_grid(make_disk(1.0), 0.125);
  LagrangianSpec spec = make_lagrangian(3.0, 0.2, RunningCost::zero());
  VelocitySet vels = VelocitySet::uniform_2d(1.0, 0.5);
  vels.ensure_cap(2.0 * 0.2 / grid->h);
  DiscreteMdp mdp = assemble_mdp(grid, spec, vels);
  // Every node (including tips with a frozen axis) has an admissible row and
  // a probability row summing to one.
  for (int i = 0; i < mdp.nodes(); ++i) {
    REQUIRE(!mdp.admissible_set(i).empty());
    const auto row = mdp.probability_row(i, mdp.admissible_set(i).front());
    double sum = 0.0;
    for (int t = 0; t < row.n; ++t) {
      CHECK(row.w[t] >= -1e-15);
      sum += row.w[t];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
