#include "hjb/hjb_solver.hpp"

#include "hjb/ergodic_lp.hpp"
#include "hjb/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace hjb;

namespace {

DiscreteMdp make_mdp(const RunningCost& f, double h = 0.02, int budget = 512,
                     double eps = 0.1) {
  LagrangianSpec spec = make_lagrangian(3.0, eps, f);
  auto grid = build_grid(make_interval(1.0), h);
  return assemble_mdp(grid, spec, default_velocity_set(spec, *grid, budget));
}

} // namespace

TEST_CASE("constant shift passes through the discounted solve exactly") {
  const double delta = 0.3, K = 2.5;
  DiscreteMdp m0 = make_mdp(RunningCost::zero());
  DiscreteMdp mk = make_mdp(RunningCost::constant(K));
  ValueField u0 = solve_discounted(m0, delta);
  ValueField uk = solve_discounted(mk, delta);
  CHECK((uk.u - u0.u.array().matrix()).cwiseAbs().maxCoeff() ==
        doctest::Approx(K / delta).epsilon(1e-12));
  CHECK((uk.u - u0.u).cwiseAbs().minCoeff() ==
        doctest::Approx(K / delta).epsilon(1e-12));
}

TEST_CASE("discrete comparison: f1 <= f2 gives u1 <= u2") {
  DiscreteMdp m0 = make_mdp(RunningCost::zero());
  DiscreteMdp mb = make_mdp(RunningCost::bump(1.0, 0.5));  // bump >= 0 pointwise
  ValueField u0 = solve_discounted(m0, 0.2);
  ValueField ub = solve_discounted(mb, 0.2);
  CHECK((ub.u - u0.u).minCoeff() >= -1e-10);
}

TEST_CASE("discounted bounds and residual trace") {
  DiscreteMdp m = make_mdp(RunningCost::bump(1.0, 0.5));
  ValueField f = solve_discounted(m, 0.1);
  CHECK(f.residual <= 1e-10);
  // delta*u >= min f = 0 here (bump is nonnegative).
  CHECK((0.1 * f.u.array()).minCoeff() >= -1e-10);
  // Howard improvement: the Bellman violation shrinks monotonically.
  for (std::size_t k = 1; k < f.residual_history.size(); ++k)
    CHECK(f.residual_history[k] <= f.residual_history[k - 1] * (1.0 + 1e-9));
}

TEST_CASE("two-discount band (vanishing discount rate)") {
  DiscreteMdp m = make_mdp(RunningCost::zero());
  const int z = m.grid().origin;
  ValueField a = solve_discounted(m, 0.1);
  ValueField b = solve_discounted(m, 0.05);
  ValueField c = solve_discounted(m, 0.025);
  // |delta u(0) + c_h| = O(delta): successive values shrink about linearly.
  EigenResult eig = ergodic_lp_solve(m);
  const double e1 = std::abs(0.1 * a.u[z] + eig.c);
  const double e2 = std::abs(0.05 * b.u[z] + eig.c);
  const double e3 = std::abs(0.025 * c.u[z] + eig.c);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
  CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("discount eigen estimate agrees with the ergodic route") {
  LagrangianSpec spec = make_lagrangian(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  DiscountEstimate est = discount_eigen_estimate(spec, make_interval(1.0),
                                                 {0.1, 0.05, 0.025, 0.0125}, 0.02);
  DiscreteMdp m = make_mdp(RunningCost::bump(1.0, 0.5));
  EigenResult eig = ergodic_lp_solve(m);
  CHECK(std::abs(est.c - eig.c) <= std::max(10.0 * est.band, 1e-5));

  // f -> f + K shifts the estimate by exactly -K.
  LagrangianSpec specK = make_lagrangian(3.0, 0.1, RunningCost::constant(4.0));
  LagrangianSpec spec0 = make_lagrangian(3.0, 0.1, RunningCost::zero());
  DiscountEstimate eK = discount_eigen_estimate(specK, make_interval(1.0),
                                                {0.1, 0.05, 0.025}, 0.05);
  DiscountEstimate e0 = discount_eigen_estimate(spec0, make_interval(1.0),
                                                {0.1, 0.05, 0.025}, 0.05);
  CHECK(eK.c - (e0.c - 4.0) == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(discount_eigen_estimate(spec, make_interval(1.0), {0.1, 0.2, 0.3},
                                          0.05),
                  Error);
}

TEST_CASE("nested domains") {
  LagrangianSpec spec = make_lagrangian(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  // theta = 0: identical problems, gap identically zero.
  NestedDomainReport same = nested_domain_gap(spec, make_interval(1.0), 0.0, 0.1, 0.02);
  CHECK(same.max_gap == doctest::Approx(0.0).epsilon(1e-12));

  NestedDomainReport rep = nested_domain_gap(spec, make_interval(1.0), 0.1, 0.1, 0.02);
  CHECK(rep.min_gap >= -1e-9);
  CHECK(rep.max_gap > 0.0);

  NestedSweep sweep =
      nested_domain_sweep(spec, make_interval(1.0), {0.04, 0.16}, 0.1, 0.02);
  CHECK(sweep.fitted_exponent >= 0.35);
}

TEST_CASE("modulus of continuity") {
  // Constant field: flagged degenerate.
  DiscreteMdp m0 = make_mdp(RunningCost::zero());
  ValueField flat;
  flat.grid = m0.grid_ptr();
  flat.u = VectorXd::Constant(m0.nodes(), 1.0);
  CHECK(modulus_of_continuity(flat).degenerate);

  // Solved p = 3 field: the wall layer keeps the fitted exponent near
  // alpha = 1/2; smooth interiors can only raise it.
  DiscreteMdp mb = make_mdp(RunningCost::bump(1.0, 0.5), 0.005, 1024);
  ValueField f = solve_discounted(mb, 0.1);
  ModulusFit fit = modulus_of_continuity(f);
  CHECK(!fit.degenerate);
  CHECK(fit.exponent >= 0.4);
  CHECK(fit.exponent <= 1.05);
}

TEST_CASE("velocity truncation auto-doubling") {
  LagrangianSpec spec = make_lagrangian(3.0, 0.1, RunningCost::zero());
  auto grid = build_grid(make_interval(1.0), 0.02);
  // Start far below the wall-layer scale: the optimizer saturates the set and
  // vmax doubles (capped at 2 eps / h = 10).
  AdaptiveSolve s = solve_discounted_adaptive(grid, spec, 0.1, 1.0, 0.1);
  CHECK(s.doublings >= 1);
  CHECK(s.vmax_used > 1.0);
  CHECK(s.field.residual <= 1e-10);
}
