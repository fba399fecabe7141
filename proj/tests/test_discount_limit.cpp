#include "hjb/discount_limit.hpp"

#include "hjb/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace hjb;

namespace {

const double kH = 1.0 / 40;
const std::vector<double> kLams = {0.16, 0.08, 0.04, 0.02, 0.01};

LagrangianSpec spec_zero() { return make_lagrangian(3.0, 0.1, RunningCost::zero()); }
LagrangianSpec spec_bump() {
  return make_lagrangian(3.0, 0.1, RunningCost::bump(1.0, 0.5));
}

} // namespace

TEST_CASE("changing-domain solve reduces to the fixed domain at gamma = 0") {
  LagrangianSpec spec = spec_bump();
  auto grid = build_grid(make_interval(1.0), kH);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 512));
  EigenResult eig = ergodic_lp_solve(mdp);
  ChangingDomainSolve s =
      changing_domain_solve(spec, make_interval(1.0), 0.0, 0.05, kH, eig.c, false, {}, 512);
  ValueField direct = solve_discounted(mdp, 0.05);
  const VectorXd expect = direct.u.array() + eig.c / 0.05;
  CHECK((s.normalized - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Lemma-4.1 style bands on the scaled problems") {
  LagrangianSpec spec = spec_zero();
  auto grid = build_grid(make_interval(1.0), kH);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 512));
  EigenResult eig = ergodic_lp_solve(mdp);
  double prev_rate = 0.0;
  for (double lam : {0.1, 0.05}) {
    ChangingDomainSolve s =
        changing_domain_solve(spec, make_interval(1.0), 1.0, lam, kH, eig.c, true, {}, 512);
    const double rate = s.band_c_lambda / lam;
    CHECK(rate < 5.0);  // |lambda u + c(lambda)| <= C lambda with moderate C
    if (prev_rate > 0) CHECK(rate <= 2.0 * prev_rate);
    prev_rate = rate;
    CHECK(s.band_c0 / (lam + std::abs(1.0 * lam)) < 5.0);
  }
}

TEST_CASE("ugamma limit: gamma = 0 recovers the ergodic field") {
  DiscountLimitResult lim = ugamma_limit(spec_bump(), make_interval(1.0), 0.0, kLams,
                                         kH, {}, 512);
  CHECK(lim.cauchy_decreasing);
  CHECK(lim.ergodic_residual <= 5e-4);

  LagrangianSpec spec = spec_bump();
  auto grid = build_grid(make_interval(1.0), kH);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 512));
  EigenResult eig = ergodic_lp_solve(mdp);
  // Normalized identically (both vanish at the origin), the limit field and
  // the ergodic solution agree within the extrapolation budget.
  VectorXd aligned = lim.u_gamma.array() - lim.u_gamma[grid->origin];
  CHECK((aligned - eig.u).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("constant shift cancels in the corrected limit") {
  DiscountLimitResult l0 = ugamma_limit(spec_zero(), make_interval(1.0), 0.5,
                                        {0.08, 0.04, 0.02}, kH, {}, 512);
  LagrangianSpec specK = make_lagrangian(3.0, 0.1, RunningCost::constant(2.0));
  DiscountLimitResult lK = ugamma_limit(specK, make_interval(1.0), 0.5,
                                        {0.08, 0.04, 0.02}, kH, {}, 512);
  CHECK((l0.u_gamma - lK.u_gamma).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("u^gamma decreases in gamma") {
  DiscountLimitResult plus = ugamma_limit(spec_bump(), make_interval(1.0), 1.0, kLams,
                                          kH, {}, 512);
  DiscountLimitResult minus = ugamma_limit(spec_bump(), make_interval(1.0), -1.0, kLams,
                                           kH, {}, 512);
  CHECK((minus.u_gamma - plus.u_gamma).minCoeff() >= -1e-6);
}

TEST_CASE("C(gamma): zero at zero, decreasing, midpoint concave") {
  CGammaCurve curve = c_of_gamma(spec_bump(), make_interval(1.0),
                                 {-0.5, -0.25, 0.0, 0.25, 0.5}, kLams, kH, {}, 512);
  for (std::size_t k = 0; k < curve.gammas.size(); ++k)
    if (curve.gammas[k] == 0.0) CHECK(curve.values[k] == 0.0);
  CHECK(curve.max_increase <= 1e-9);
  CHECK(curve.min_midpoint_concavity >= -1e-6);
  for (double d : curve.defects) CHECK(d <= 1e-3);
}

TEST_CASE("back-forth relation at f = 0") {
  BackForthReport rep = back_forth_check(spec_zero(), make_interval(1.0),
                                         {-0.5, -0.25, 0.0, 0.25, 0.5}, kLams, kH, {},
                                         512);
  CHECK(rep.mismatch_plus <= 0.02);
  CHECK(rep.mismatch_minus <= 0.02);
  CHECK(rep.ordering_slack <= 1e-3);
  // Linearity of C at constant f: C(gamma) ~ -gamma c'(0).
  CHECK(rep.linearity_defect <= 0.02 * std::abs(rep.c_plus) + 1e-4);
}

TEST_CASE("measure identities") {
  MeasureIdentityReport rep = measure_identity_check(
      spec_zero(), make_interval(1.0), 0.25, kLams, kH, 3, 7, {}, 512);
  CHECK(rep.residual_a <= 1e-4);
  CHECK(rep.residual_b <= 1e-3);
  // The maximality inequality holds within the pipeline's extrapolation
  // accuracy for the sampled optimal-face measures.
  CHECK(rep.slack_c <= 1e-3);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ugamma_limit(spec_zero(), make_interval(1.0), 0.0, {0.1}, kH),
                  Error);
  CHECK_THROWS_AS(ugamma_limit(spec_zero(), make_interval(1.0), 0.0, {0.04, 0.08},
                               kH),
                  Error);
  CHECK_THROWS_AS(c_of_gamma(spec_zero(), make_interval(1.0), {0.25, 0.5}, kLams, kH),
                  Error);
  CHECK_THROWS_AS(
      changing_domain_solve(spec_zero(), make_interval(1.0), -30.0, 0.05, kH, 0.0),
      Error);
}
