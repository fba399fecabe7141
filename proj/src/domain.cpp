#include "hjb/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hjb {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

} // namespace

double Domain::boundary_radius(double theta) const {
  switch (kind) {
    case Kind::Interval:
      return scale * half_width;
    case Kind::Disk:
      return scale * radius;
    case Kind::RadialStar: {
      const int m = static_cast<int>(profile.size());
      double t = std::fmod(theta, 2.0 * kPi);
      if (t < 0) t += 2.0 * kPi;
      const double pos = t / (2.0 * kPi) * m;
      const int k = static_cast<int>(pos) % m;
      const double frac = pos - std::floor(pos);
      const double rho = (1.0 - frac) * profile[k] + frac * profile[(k + 1) % m];
      return scale * rho;
    }
  }
  return 0.0;
}

double Domain::inradius() const {
  switch (kind) {
    case Kind::Interval:
      return scale * half_width;
    case Kind::Disk:
      return scale * radius;
    case Kind::RadialStar:
      return scale * *std::min_element(profile.begin(), profile.end());
  }
  return 0.0;
}

double Domain::outer_radius() const {
  switch (kind) {
    case Kind::Interval:
      return scale * half_width;
    case Kind::Disk:
      return scale * radius;
    case Kind::RadialStar:
      return scale * *std::max_element(profile.begin(), profile.end());
  }
  return 0.0;
}

bool Domain::contains(const Vec2& x) const {
  switch (kind) {
    case Kind::Interval:
      return std::abs(x[0]) <= scale * half_width;
    case Kind::Disk:
      return x.norm() <= scale * radius;
    case Kind::RadialStar: {
      const double r = x.norm();
      if (r == 0.0) return true;
      return r <= boundary_radius(std::atan2(x[1], x[0]));
    }
  }
  return false;
}

double Domain::distance_outside(const Vec2& x) const {
  switch (kind) {
    case Kind::Interval:
      return std::max(0.0, std::abs(x[0]) - scale * half_width);
    case Kind::Disk:
      return std::max(0.0, x.norm() - scale * radius);
    case Kind::RadialStar: {
      if (contains(x)) return 0.0;
      // Distance to the boundary polyline through the sampled profile.
      const int m = static_cast<int>(profile.size());
      const int refine = 4;  // subdivide each profile interval
      double best = std::numeric_limits<double>::infinity();
      Vec2 prev;
      for (int k = 0; k <= m * refine; ++k) {
        const double theta = 2.0 * kPi * k / (m * refine);
        const double rho = boundary_radius(theta);
        const Vec2 pt(rho * std::cos(theta), rho * std::sin(theta));
        if (k > 0) best = std::min(best, point_segment_distance(x, prev, pt));
        prev = pt;
      }
      return best;
    }
  }
  return 0.0;
}

Domain make_interval(double a) {
  if (!(a > 0)) fail(ErrorKind::InvalidDomain, "interval half-width must be positive");
  Domain d;
  d.kind = Domain::Kind::Interval;
  d.half_width = a;
  return d;
}

Domain make_disk(double R) {
  if (!(R > 0)) fail(ErrorKind::InvalidDomain, "disk radius must be positive");
  Domain d;
  d.kind = Domain::Kind::Disk;
  d.radius = R;
  return d;
}

Domain make_radial(std::vector<double> profile) {
  if (profile.size() < 3)
    fail(ErrorKind::InvalidDomain, "radial profile needs at least three samples");
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (!(profile[k] > 0)) {
      std::ostringstream os;
      os << "radial profile must be strictly positive; sample " << k << " is "
         << profile[k];
      fail(ErrorKind::InvalidDomain, os.str());
    }
  }
  Domain d;
  d.kind = Domain::Kind::RadialStar;
  d.profile = std::move(profile);
  return d;
}

Domain scale_domain(const Domain& d, double r) {
  if (!(1.0 + r > 0.0)) fail(ErrorKind::InvalidScale, "dilation factor 1+r must be positive");
  Domain out = d;
  out.scale = d.scale * (1.0 + r);
  return out;
}

ConditionAReport check_condition_A(const Domain& d, const std::vector<double>& r_probe,
                                   int boundary_samples) {
  if (!(d.inradius() > 0))
    fail(ErrorKind::ConditionAViolated, "origin is not interior to the domain");
  ConditionAReport rep;
  rep.kappa_ball = d.inradius();

  double kappa = std::numeric_limits<double>::infinity();
  if (d.kind == Domain::Kind::Interval) {
    // dist((1+r)(+-a), [-a,a]) = r a exactly, for every probe r.
    kappa = d.scale * d.half_width;
  } else {
    const std::vector<double> probes =
        r_probe.empty() ? std::vector<double>{1e-3, 1e-2, 1e-1} : r_probe;
    for (double r : probes) {
      if (!(r > 0)) fail(ErrorKind::InvalidParameter, "condition-A probes must be positive");
      for (int k = 0; k < boundary_samples; ++k) {
        const double theta = 2.0 * kPi * k / boundary_samples;
        const double rho = d.boundary_radius(theta);
        const Vec2 x((1.0 + r) * rho * std::cos(theta), (1.0 + r) * rho * std::sin(theta));
        kappa = std::min(kappa, d.distance_outside(x) / r);
      }
    }
  }
  rep.kappa_distance = kappa;
  rep.kappa = std::min(rep.kappa_distance, rep.kappa_ball);
  if (!(rep.kappa > 0))
    fail(ErrorKind::ConditionAViolated, "separation rate kappa is not positive");
  return rep;
}

ScalingSchedule make_schedule(double gamma, std::vector<double> lambdas) {
  for (double lam : lambdas)
    if (!(1.0 + gamma * lam > 0.0))
      fail(ErrorKind::InvalidScale, "schedule sample leaves 1 + r(lambda) nonpositive");
  ScalingSchedule s;
  s.gamma = gamma;
  s.lambdas = std::move(lambdas);
  std::sort(s.lambdas.begin(), s.lambdas.end());
  return s;
}

std::vector<double> default_lambda_samples() {
  return {-0.32, -0.16, -0.08, -0.04, -0.02, 0.0, 0.02, 0.04, 0.08, 0.16, 0.32};
}

} // namespace hjb
