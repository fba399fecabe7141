#pragma once
// Hamiltonian H(x,xi) = |xi|^p - f(x), its convex conjugate
// L(x,v) = C_p |v|^q + f(x) with 1/p + 1/q = 1, and the scaling pairing
// (-x,v).grad L used by the eigenvalue-derivative formulas.

#include "hjb/error.hpp"
#include "hjb/types.hpp"

#include <span>
#include <string>

namespace hjb {

// Running costs come from a small closed-form catalog so that the gradient
// Df is exact wherever it is needed.
struct RunningCost {
  enum class Kind { Constant, Affine, Bump, Cosine };

  Kind kind = Kind::Constant;
  double offset = 0.0;        // constant term (all kinds)
  Vec2 slope = Vec2::Zero();  // Affine: f = offset + slope . x
  double amplitude = 0.0;     // Bump / Cosine amplitude
  double sigma = 1.0;         // Bump width: f = offset + A exp(-|x|^2/sigma^2)
  double omega = 1.0;         // Cosine frequency: f = offset + A cos(omega x0)

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;

  static RunningCost zero();
  static RunningCost constant(double k);
  static RunningCost affine(double offset, const Vec2& slope);
  static RunningCost bump(double amplitude, double sigma);
  static RunningCost cosine(double amplitude, double omega);

  std::string describe() const;
};

struct LagrangianSpec {
  double p = 3.0;       // gradient exponent (> 2 for the state-constraint runs)
  double q = 1.5;       // conjugate exponent p/(p-1), in (1,2]
  double epsilon = 1.0; // diffusion coefficient
  double cp = 0.0;      // verified Legendre coefficient
  RunningCost f;
};

// The coefficient satisfying sup_xi(v.xi - |xi|^p) = C_p |v|^q.
double legendre_coefficient(double p);

// Builds a spec with q and C_p derived from p. Requires p >= 2.
LagrangianSpec make_lagrangian(double p, double epsilon, RunningCost f);

double hamiltonian_value(const LagrangianSpec& s, const Vec2& x, const Vec2& xi);
double lagrangian_value(const LagrangianSpec& s, const Vec2& x, const Vec2& v);

// (-x,v).grad L(x,v) = -x.Df(x) + q C_p |v|^q.
double radial_gradient_pairing(const LagrangianSpec& s, const Vec2& x, const Vec2& v);

// L((1+r)x, v/(1+r)); the integrand of the scaled cell problem.
double scaled_lagrangian(const LagrangianSpec& s, double r, const Vec2& x, const Vec2& v);

// Magnitude of the conjugate-optimal velocity for a gradient of size |xi|:
// the maximizer of v.xi - C_p|v|^q has |v| = p |xi|^{p-1}.
double conjugate_speed(const LagrangianSpec& s, double xi_norm);

// Brute-force duality check: max over xi samples of
// |sup_{v grid}(xi.v - C_p|v|^q) - |xi|^p|. Throws CoefficientMismatch naming
// the offending xi when the residual exceeds tol.
double legendre_check(const LagrangianSpec& s, std::span<const double> xi_samples,
                      std::span<const double> v_grid, double tol);

} // namespace hjb
