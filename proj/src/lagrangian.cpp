#include "hjb/lagrangian.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hjb {

double RunningCost::value(const Vec2& x) const {
  switch (kind) {
    case Kind::Constant:
      return offset;
    case Kind::Affine:
      return offset + slope.dot(x);
    case Kind::Bump:
      return offset + amplitude * std::exp(-x.squaredNorm() / (sigma * sigma));
    case Kind::Cosine:
      return offset + amplitude * std::cos(omega * x[0]);
  }
  return offset;
}

Vec2 RunningCost::gradient(const Vec2& x) const {
  switch (kind) {
    case Kind::Constant:
      return Vec2::Zero();
    case Kind::Affine:
      return slope;
    case Kind::Bump: {
      const double s2 = sigma * sigma;
      return (-2.0 * amplitude / s2) * std::exp(-x.squaredNorm() / s2) * x;
    }
    case Kind::Cosine:
      return Vec2(-amplitude * omega * std::sin(omega * x[0]), 0.0);
  }
  return Vec2::Zero();
}

RunningCost RunningCost::zero() { return RunningCost{}; }

RunningCost RunningCost::constant(double k) {
  RunningCost f;
  f.kind = Kind::Constant;
  f.offset = k;
  return f;
}

RunningCost RunningCost::affine(double offset, const Vec2& slope) {
  RunningCost f;
  f.kind = Kind::Affine;
  f.offset = offset;
  f.slope = slope;
  return f;
}

RunningCost RunningCost::bump(double amplitude, double sigma) {
  if (sigma <= 0) fail(ErrorKind::InvalidParameter, "bump width must be positive");
  RunningCost f;
  f.kind = Kind::Bump;
  f.amplitude = amplitude;
  f.sigma = sigma;
  return f;
}

RunningCost RunningCost::cosine(double amplitude, double omega) {
  RunningCost f;
  f.kind = Kind::Cosine;
  f.amplitude = amplitude;
  f.omega = omega;
  return f;
}

std::string RunningCost::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant: os << "constant(" << offset << ")"; break;
    case Kind::Affine:
      os << "affine(" << offset << "," << slope[0] << "," << slope[1] << ")";
      break;
    case Kind::Bump: os << "bump(" << amplitude << "," << sigma << ")"; break;
    case Kind::Cosine: os << "cosine(" << amplitude << "," << omega << ")"; break;
  }
  return os.str();
}

double legendre_coefficient(double p) {
  const double q = p / (p - 1.0);
  return (p - 1.0) * std::pow(p, -q);
}

LagrangianSpec make_lagrangian(double p, double epsilon, RunningCost f) {
  if (!(p >= 2.0)) fail(ErrorKind::InvalidParameter, "exponent p must be >= 2");
  if (!(epsilon > 0.0)) fail(ErrorKind::InvalidParameter, "epsilon must be positive");
  LagrangianSpec s;
  s.p = p;
  s.q = p / (p - 1.0);
  s.epsilon = epsilon;
  s.cp = legendre_coefficient(p);
  s.f = f;
  return s;
}

double hamiltonian_value(const LagrangianSpec& s, const Vec2& x, const Vec2& xi) {
  return std::pow(xi.norm(), s.p) - s.f.value(x);
}

double lagrangian_value(const LagrangianSpec& s, const Vec2& x, const Vec2& v) {
  return s.cp * std::pow(v.norm(), s.q) + s.f.value(x);
}

double radial_gradient_pairing(const LagrangianSpec& s, const Vec2& x, const Vec2& v) {
  return -x.dot(s.f.gradient(x)) + s.q * s.cp * std::pow(v.norm(), s.q);
}

double scaled_lagrangian(const LagrangianSpec& s, double r, const Vec2& x, const Vec2& v) {
  if (1.0 + r <= 0.0) fail(ErrorKind::InvalidScale, "scale factor 1+r must be positive");
  return lagrangian_value(s, (1.0 + r) * x, v / (1.0 + r));
}

double conjugate_speed(const LagrangianSpec& s, double xi_norm) {
  return s.p * std::pow(xi_norm, s.p - 1.0);
}

double legendre_check(const LagrangianSpec& s, std::span<const double> xi_samples,
                      std::span<const double> v_grid, double tol) {
  if (xi_samples.empty() || v_grid.empty())
    fail(ErrorKind::InvalidParameter, "legendre_check needs nonempty sample lists");
  double worst = 0.0;
  double worst_xi = 0.0;
  for (double xi : xi_samples) {
    double sup = -std::numeric_limits<double>::infinity();
    for (double v : v_grid)
      sup = std::max(sup, xi * v - s.cp * std::pow(std::abs(v), s.q));
    const double res = std::abs(sup - std::pow(std::abs(xi), s.p));
    if (res > worst) {
      worst = res;
      worst_xi = xi;
    }
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "Legendre coefficient mismatch: residual " << worst << " at xi = "
       << worst_xi << " exceeds tolerance " << tol;
    fail(ErrorKind::CoefficientMismatch, os.str());
  }
  return worst;
}

} // namespace hjb
