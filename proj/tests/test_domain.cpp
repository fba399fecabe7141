#include "hjb/domain.hpp"
#include "hjb/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace hjb;

TEST_CASE("domain construction") {
  Domain iv = make_interval(1.0);
  CHECK(iv.dim() == 1);
  CHECK(iv.contains(point1d(0.999)));
  CHECK(!iv.contains(point1d(1.001)));
  Domain disk = make_disk(2.0);
  CHECK(disk.dim() == 2);
  CHECK(disk.contains(Vec2(1.2, 1.2)));
  CHECK_THROWS_AS(make_interval(-1.0), Error);
  CHECK_THROWS_AS(make_disk(0.0), Error);
  // A radial profile with a zero sample violates the positivity invariant.
  CHECK_THROWS_WITH_AS(make_radial({1.0, 0.0, 1.0, 1.0}),
                       doctest::Contains("strictly positive"), Error);
}

TEST_CASE("scale_domain") {
  Domain iv = make_interval(1.0);
  Domain s = scale_domain(iv, 0.2);
  CHECK(s.scale * s.half_width == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(scale_domain(iv, 0.0).scale == 1.0);
  // Composition multiplies factors: 1.1^2 = 1.21 exactly up to one ulp.
  Domain twice = scale_domain(scale_domain(iv, 0.1), 0.1);
  CHECK(twice.scale == doctest::Approx(1.21).epsilon(1e-15));
  CHECK_THROWS_AS(scale_domain(iv, -1.0), Error);
  // Round trip r then 1/(1+r) - 1 returns within one ulp of the original.
  const double r = 0.37;
  Domain rt = scale_domain(scale_domain(iv, r), 1.0 / (1.0 + r) - 1.0);
  CHECK(std::abs(rt.scale - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
}

TEST_CASE("condition A on intervals and disks") {
  ConditionAReport iv = check_condition_A(make_interval(1.0), {1e-3, 1e-2, 1e-1});
  CHECK(std::abs(iv.kappa_distance - 1.0) < 1e-12);
  CHECK(iv.kappa_ball == doctest::Approx(1.0));
  CHECK(iv.kappa == doctest::Approx(1.0));

  ConditionAReport dk = check_condition_A(make_disk(2.0), {1e-3, 1e-2, 1e-1});
  CHECK(dk.kappa_distance == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(dk.kappa == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("condition A on a radial star profile") {
  // rho(theta) = 1 + 0.5 cos^2(theta): brute-force kappa lies in (0, min rho].
  const int m = 128;
  std::vector<double> profile(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * std::numbers::pi * k / m;
    profile[k] = 1.0 + 0.5 * std::cos(th) * std::cos(th);
  }
  Domain star = make_radial(profile);
  ConditionAReport rep = check_condition_A(star, {1e-3, 1e-2, 1e-1}, 512);
  CHECK(rep.kappa > 0.0);
  CHECK(rep.kappa <= 1.0 + 1e-9);  // min rho = 1
  CHECK(rep.kappa_ball == doctest::Approx(1.0).epsilon(1e-9));

  // Independent brute-force oracle over a finer probe family.
  double oracle = std::numeric_limits<double>::infinity();
  for (double r : {0.003, 0.03, 0.3}) {
    for (int k = 0; k < 257; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 257.0;
      const double rho = star.boundary_radius(th);
      const Vec2 x((1 + r) * rho * std::cos(th), (1 + r) * rho * std::sin(th));
      oracle = std::min(oracle, star.distance_outside(x) / r);
    }
  }
  CHECK(rep.kappa_distance == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("interval grids") {
  auto g = build_grid(make_interval(1.0), 0.5);
  CHECK(g->size() == 5);
  CHECK(g->nodes.front()[0] == doctest::Approx(-1.0));
  CHECK(g->nodes.back()[0] == doctest::Approx(1.0));
  CHECK(g->boundary(0));
  CHECK(g->boundary(4));
  CHECK(g->interior[2]);
  CHECK(g->origin == 2);
  CHECK(g->nodes[g->origin][0] == 0.0);

  auto g2 = build_grid(make_interval(1.2), 0.1);
  CHECK(g2->size() == 25);

  CHECK_THROWS_AS(build_grid(make_interval(1.0), 0.9), Error);
  CHECK_THROWS_AS(build_grid(make_radial({1.0, 1.0, 1.0}), 0.1), Error);
}

TEST_CASE("disk grid matches the lattice enumeration oracle") {
  auto g = build_grid(make_disk(1.0), 0.25);
  // Oracle: lattice points with |x| <= 1 at spacing 1/4.
  int count = 0, boundary = 0;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j)
      if (i * i + j * j <= 16) {
        ++count;
        const bool inner = (i - 1) * (i - 1) + j * j <= 16 &&
                           (i + 1) * (i + 1) + j * j <= 16 &&
                           i * i + (j - 1) * (j - 1) <= 16 &&
                           i * i + (j + 1) * (j + 1) <= 16;
        if (!inner) ++boundary;
      }
  CHECK(g->size() == count);
  int gb = 0;
  for (int i = 0; i < g->size(); ++i)
    if (g->boundary(i)) ++gb;
  CHECK(gb == boundary);
  CHECK(g->origin >= 0);
  // Interior and boundary masks partition the nodes.
  for (int i = 0; i < g->size(); ++i) CHECK(g->interior[i] != g->boundary(i));
}

TEST_CASE("nested lattice alignment") {
  auto base = build_grid(make_interval(1.0), 0.01);
  const double lam = snap_lambda_to_lattice(make_interval(1.0), base->h, 1.0, 0.08);
  auto outer = build_grid(scale_domain(make_interval(1.0), lam), base->h);
  CHECK(outer->h == doctest::Approx(base->h).epsilon(1e-14));
  // Every interior node of the inner grid appears on the outer lattice.
  for (int i = 0; i < base->size(); ++i) {
    const int j = outer->lattice_index(base->axis_steps(i, 0), 0);
    REQUIRE(j >= 0);
    CHECK(outer->nodes[j][0] == doctest::Approx(base->nodes[i][0]).epsilon(1e-14));
  }
}

TEST_CASE("scaling schedule") {
  ScalingSchedule s = make_schedule(1.0, default_lambda_samples());
  CHECK(s.r(0.25) == doctest::Approx(0.25));
  CHECK(s.lambdas.size() == 11);
  CHECK_THROWS_AS(make_schedule(-4.0, {0.3}), Error);  // 1 + r <= 0
}
