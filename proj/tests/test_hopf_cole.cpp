#include "hjb/hopf_cole.hpp"

#include "hjb/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hjb;

namespace {
constexpr double kPi = std::numbers::pi_v<double>;
}

TEST_CASE("principal eigenpair on the interval: cosine ground state") {
  LinearEigenpair pair =
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, 1.0 / 64);
  const double exact = kPi * kPi / 4.0;
  CHECK(std::abs(pair.c - exact) / exact < 2e-4);  // O(h^2)
  CHECK(pair.positive);
  CHECK(pair.residual <= 1e-11);
  // Eigenfunction is the L2-normalized cosine.
  const Grid& g = *pair.grid;
  for (int i = 0; i < g.size(); i += 17) {
    const double w = std::cos(kPi * g.nodes[i][0] / 2.0);
    CHECK(pair.w[i] == doctest::Approx(w).epsilon(2e-3));
  }
}

TEST_CASE("constant potential shifts the eigenvalue only") {
  LinearEigenpair p0 =
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, 1.0 / 48);
  LinearEigenpair pk =
      principal_eigenpair(make_interval(1.0), RunningCost::constant(3.0), 1.0, 1.0 / 48);
  CHECK(pk.c - p0.c == doctest::Approx(3.0).epsilon(1e-10));
  CHECK((pk.w - p0.w).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("closed-form rescaling in the half-width and epsilon") {
  // c = eps^2 pi^2 / (4 a^2) for f = 0 on (-a, a).
  LinearEigenpair pair =
      principal_eigenpair(make_interval(2.0), RunningCost::zero(), 0.5, 2.0 / 80);
  const double exact = 0.25 * kPi * kPi / 16.0;
  CHECK(std::abs(pair.c - exact) / exact < 5e-4);
}

TEST_CASE("grid convergence order of the eigenvalue is near two") {
  const double exact = kPi * kPi / 4.0;
  std::vector<double> hs = {1.0 / 32, 1.0 / 64, 1.0 / 128}, errs;
  for (double h : hs)
    errs.push_back(std::abs(
        principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, h).c - exact));
  const double order = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
  CHECK(order >= 1.8);
}

TEST_CASE("rayleigh quotient: equality at the eigenpair, minimality elsewhere") {
  LinearEigenpair pair =
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, 1.0 / 64);
  const Grid& g = *pair.grid;
  CHECK(rayleigh_quotient(pair.w, RunningCost::zero(), 1.0, g) ==
        doctest::Approx(pair.c).epsilon(1e-10));

  // Normalized parabola trial: quotient strictly above the ground value.
  VectorXd trial = VectorXd::Zero(g.size());
  for (int i = 0; i < g.size(); ++i)
    trial[i] = (1.0 - g.nodes[i][0]) * (1.0 + g.nodes[i][0]);
  trial /= std::sqrt(g.h * trial.squaredNorm());
  const double quot = rayleigh_quotient(trial, RunningCost::zero(), 1.0, g);
  CHECK(quot >= pair.c - 1e-10);
  CHECK(quot >= kPi * kPi / 4.0 - 1e-3);

  // Twenty random admissible trials stay above the computed eigenvalue.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int t = 0; t < 20; ++t) {
    VectorXd r = VectorXd::Zero(g.size());
    for (int i = 0; i < g.size(); ++i)
      if (g.interior[i]) r[i] = unit(rng) * (1.0 - std::abs(g.nodes[i][0]));
    r /= std::sqrt(g.h * r.squaredNorm());
    CHECK(rayleigh_quotient(r, RunningCost::zero(), 1.0, g) >= pair.c - 1e-10);
  }

  VectorXd bad = pair.w * 2.0;
  CHECK_THROWS_AS(rayleigh_quotient(bad, RunningCost::zero(), 1.0, g), Error);
}

TEST_CASE("hopf-cole transform") {
  LinearEigenpair pair =
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, 1.0 / 64);
  HopfColeField field = hopf_cole_transform(pair, RunningCost::zero());
  const Grid& g = *pair.grid;
  // v(0) = -log w(0) vanishes for the normalized cosine ground state.
  CHECK(std::abs(field.vhat[g.origin]) <= 2e-3);
  // Walls are blow-up points; interior defect of the quadratic equation is
  // small away from the boundary layer.
  CHECK(field.blown_up.front());
  CHECK(field.blown_up.back());
  CHECK(field.interior_defect <= 0.05);

  LinearEigenpair broken = pair;
  broken.w[g.origin + 1] = -1.0;
  CHECK_THROWS_AS(hopf_cole_transform(broken, RunningCost::zero()), Error);
}

TEST_CASE("shape derivative closed form and field variants") {
  LinearEigenpair pair =
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, 1.0 / 128);
  const double sd = shape_derivative(pair, make_interval(1.0), identity_field);
  CHECK(std::abs(sd - (-kPi * kPi / 2.0)) / (kPi * kPi / 2.0) < 0.01);
  CHECK(shape_derivative(pair, make_interval(1.0), zero_field) == 0.0);
  // Constant f does not move the eigenfunction, so the derivative is equal.
  LinearEigenpair pk =
      principal_eigenpair(make_interval(1.0), RunningCost::constant(4.0), 1.0, 1.0 / 128);
  CHECK(shape_derivative(pk, make_interval(1.0), identity_field) ==
        doctest::Approx(sd).epsilon(1e-8));
}

TEST_CASE("quadratic eigencurve: derivatives against the dilation law") {
  QuadraticCurve curve =
      eigencurve_p2(make_interval(1.0), RunningCost::zero(), 1.0,
                    {-0.125, -0.0625, 0.0, 0.0625, 0.125}, 1.0 / 64);
  const double c0 = kPi * kPi / 4.0;
  CHECK(curve.d1 == doctest::Approx(-2.0 * c0).epsilon(5e-3));
  CHECK(curve.d2 == doctest::Approx(6.0 * c0).epsilon(0.03));
  CHECK(curve.crosscheck <= 0.01);

  // Generic running cost: the two derivative routes stay within one percent.
  QuadraticCurve cosine =
      eigencurve_p2(make_interval(1.0), RunningCost::cosine(1.0, 2.0), 1.0,
                    {-0.125, -0.0625, 0.0, 0.0625, 0.125}, 1.0 / 64);
  CHECK(cosine.crosscheck <= 0.01);
}

TEST_CASE("two-dimensional disk eigenvalue (lattice smoke)") {
  // Principal Dirichlet eigenvalue of the unit disk: (j_{0,1})^2 with the
  // first Bessel zero 2.404826; the stair-step lattice boundary makes this a
  // loose first-order check.
  LinearEigenpair pair =
      principal_eigenpair(make_disk(1.0), RunningCost::zero(), 1.0, 1.0 / 40);
  const double exact = 2.404825557695773 * 2.404825557695773;
  CHECK(std::abs(pair.c - exact) / exact < 0.08);
  CHECK(pair.positive);
}

TEST_CASE("coarse grids are rejected") {
  CHECK_THROWS_AS(
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, 0.25), Error);
}
