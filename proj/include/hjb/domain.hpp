#pragma once
// Star-shaped domains (with respect to the origin), their dilations
// (1+r)*Omega, the quantitative star-shapedness constant kappa, and the
// scaling schedules r(lambda) = gamma*lambda used by the eigenvalue curves.

#include "hjb/error.hpp"
#include "hjb/types.hpp"

#include <vector>

namespace hjb {

struct Domain {
  enum class Kind { Interval, Disk, RadialStar };

  Kind kind = Kind::Interval;
  double half_width = 1.0;      // interval (-a, a)
  double radius = 1.0;          // disk of radius R
  std::vector<double> profile;  // radial profile rho(theta_k), theta_k = 2 pi k / m
  double scale = 1.0;           // multiplicative dilation applied to the base region

  int dim() const { return kind == Kind::Interval ? 1 : 2; }

  // Distance from the origin to the boundary along direction theta, including
  // the dilation factor. The profile is interpolated piecewise-linearly.
  double boundary_radius(double theta) const;

  // Radius of the largest centered ball strictly inside the region.
  double inradius() const;

  // Diameter-scale bound: radius of a centered ball containing the region.
  double outer_radius() const;

  bool contains(const Vec2& x) const;

  // dist(x, closure of the region); zero inside.
  double distance_outside(const Vec2& x) const;
};

Domain make_interval(double a);
Domain make_disk(double R);
Domain make_radial(std::vector<double> profile);

// Dilation by 1+r; factors compose multiplicatively.
Domain scale_domain(const Domain& d, double r);

struct ConditionAReport {
  double kappa_distance = 0.0;  // largest kappa with dist(x, closure) >= kappa*r on (1+r)boundary
  double kappa_ball = 0.0;      // supremum of radii of centered balls inside the region
  double kappa = 0.0;           // min of the two (the working constant)
};

// Verifies the quantitative star-shapedness condition by sampling boundary
// points and probe dilations. Throws ConditionAViolated if the origin is not
// interior or a probe produces a nonpositive separation rate.
ConditionAReport check_condition_A(const Domain& d, const std::vector<double>& r_probe,
                                   int boundary_samples = 256);

struct ScalingSchedule {
  double gamma = 1.0;            // slope of r at 0: r(lambda) = gamma * lambda
  std::vector<double> lambdas;   // samples in a symmetric interval around 0

  double r(double lambda) const { return gamma * lambda; }
};

ScalingSchedule make_schedule(double gamma, std::vector<double> lambdas);

// Default symmetric sample list {0, ±0.02, ±0.04, ±0.08, ±0.16, ±0.32}.
std::vector<double> default_lambda_samples();

} // namespace hjb
