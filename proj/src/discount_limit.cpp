#include "hjb/discount_limit.hpp"

#include "hjb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjb {

namespace {

std::function<double(const Vec2&, const Vec2&)> pairing_fn(const LagrangianSpec& spec) {
  return [spec](const Vec2& x, const Vec2& v) {
    return -x.dot(spec.f.gradient(x)) + spec.q * spec.cp * std::pow(v.norm(), spec.q);
  };
}

} // namespace

double pairing_field(const MatherMeasure& mu, const VectorXd& field) {
  double s = 0.0;
  for (const auto& e : mu.entries) {
    if (e.node < 0 || e.node >= field.size())
      fail(ErrorKind::ScalingMismatch, "measure node outside the field's grid");
    s += e.mass * field[e.node];
  }
  return s;
}

double extrapolate_to_zero(const std::vector<double>& lambdas,
                           const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) fail(ErrorKind::InvalidParameter, "extrapolation needs two samples");
  const double l0 = lambdas[n - 2], l1 = lambdas[n - 1];
  return values[n - 1] + (values[n - 1] - values[n - 2]) * l1 / (l0 - l1);
}

ChangingDomainSolve changing_domain_solve(const LagrangianSpec& spec, const Domain& domain,
                                          double gamma, double lambda, double h, double c0,
                                          bool want_bands, const HowardOptions& opt,
                                          int velocity_budget) {
  if (!(lambda > 0)) fail(ErrorKind::InvalidParameter, "lambda must be positive");
  const double r = gamma * lambda;
  if (!(1.0 + r > 0))
    fail(ErrorKind::InvalidScale, "schedule leaves 1 + gamma*lambda nonpositive");

  auto base = build_grid(domain, h);
  // Spacing (1+r)h makes the dilated lattice the exact image of the base one.
  auto grid = build_grid(scale_domain(domain, r), (1.0 + r) * base->h);
  if (grid->size() != base->size())
    fail(ErrorKind::ScalingMismatch, "scaled lattice does not match the base lattice");

  const VelocitySet vels = default_velocity_set(spec, *grid, velocity_budget);
  DiscreteMdp mdp = assemble_mdp(grid, spec, vels);
  ValueField f = solve_discounted(mdp, lambda, opt);

  ChangingDomainSolve out;
  out.lambda = lambda;
  out.r = r;
  const double s2 = (1.0 + r) * (1.0 + r);
  out.normalized.resize(base->size());
  for (int i = 0; i < base->size(); ++i)
    out.normalized[i] = f.u[i] / s2 + c0 / lambda;

  MatherMeasure dual =
      discounted_dual_measure(mdp, f.policy, lambda, grid->origin);
  out.dual = scale_measure(dual, r, *base);

  if (want_bands) {
    EigenResult eig = ergodic_lp_solve(mdp, opt);
    out.c_lambda = eig.c;
    out.band_c_lambda = (lambda * f.u.array() + eig.c).abs().maxCoeff();
    out.band_c0 = (lambda * f.u.array() + c0).abs().maxCoeff();
  }
  return out;
}

std::vector<double> default_lambda_sequence() {
  return {0.16, 0.08, 0.04, 0.02, 0.01, 0.005};
}

DiscountLimitResult ugamma_limit(const LagrangianSpec& spec, const Domain& domain,
                                 double gamma, const std::vector<double>& lambdas,
                                 double h, const HowardOptions& opt, int velocity_budget) {
  if (lambdas.size() < 2)
    fail(ErrorKind::InvalidParameter, "the lambda sequence needs at least two entries");
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    if (!(lambdas[k] < lambdas[k - 1]))
      fail(ErrorKind::InvalidParameter, "the lambda sequence must decrease");

  auto base = build_grid(domain, h);
  const VelocitySet vels = default_velocity_set(spec, *base, velocity_budget);
  DiscreteMdp base_mdp = assemble_mdp(base, spec, vels);
  EigenResult eig = ergodic_lp_solve(base_mdp, opt);

  DiscountLimitResult out;
  out.gamma = gamma;
  out.c0 = eig.c;
  out.lambdas = lambdas;
  for (double lam : lambdas) {
    ChangingDomainSolve s =
        changing_domain_solve(spec, domain, gamma, lam, h, eig.c, false, opt,
                              velocity_budget);
    out.fields.push_back(std::move(s.normalized));
    out.duals.push_back(std::move(s.dual));
  }
  for (std::size_t k = 1; k < out.fields.size(); ++k) {
    out.cauchy.push_back((out.fields[k] - out.fields[k - 1]).cwiseAbs().maxCoeff());
    if (k >= 2 && out.cauchy[k - 1] > out.cauchy[k - 2] * (1.0 + 1e-9))
      out.cauchy_decreasing = false;
  }

  const std::size_t n = out.fields.size();
  const double l0 = lambdas[n - 2], l1 = lambdas[n - 1];
  out.u_tilde_limit =
      out.fields[n - 1] + (out.fields[n - 1] - out.fields[n - 2]) * (l1 / (l0 - l1));
  out.u_gamma = out.u_tilde_limit.array() - 2.0 * gamma * eig.c;

  double resid = 0.0;
  for (int i = 0; i < base_mdp.nodes(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int k : base_mdp.admissible_set(i))
      best = std::max(best, base_mdp.generator_row(i, k, out.u_gamma) -
                                base_mdp.stage_cost(i, k));
    resid = std::max(resid, std::abs(best - eig.c));
  }
  out.ergodic_residual = resid;
  return out;
}

CGammaCurve c_of_gamma(const LagrangianSpec& spec, const Domain& domain,
                       const std::vector<double>& gammas,
                       const std::vector<double>& lambdas, double h,
                       const HowardOptions& opt, int velocity_budget) {
  if (std::find(gammas.begin(), gammas.end(), 0.0) == gammas.end())
    fail(ErrorKind::InvalidParameter, "gamma samples must include 0");
  std::vector<double> sorted = gammas;
  std::sort(sorted.begin(), sorted.end());

  DiscountLimitResult zero = ugamma_limit(spec, domain, 0.0, lambdas, h, opt,
                                          velocity_budget);
  CGammaCurve curve;
  curve.c0 = zero.c0;
  for (double g : sorted) {
    DiscountLimitResult res =
        g == 0.0 ? zero : ugamma_limit(spec, domain, g, lambdas, h, opt, velocity_budget);
    const VectorXd diff = res.u_gamma - zero.u_gamma;
    const double mean = diff.mean();
    curve.gammas.push_back(g);
    curve.values.push_back(mean);
    curve.defects.push_back((diff.array() - mean).abs().maxCoeff());
  }

  curve.max_increase = 0.0;
  for (std::size_t k = 1; k < curve.values.size(); ++k)
    curve.max_increase = std::max(curve.max_increase, curve.values[k] - curve.values[k - 1]);
  curve.min_midpoint_concavity = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < curve.values.size(); ++k) {
    const double gl = curve.gammas[k - 1], gm = curve.gammas[k], gr = curve.gammas[k + 1];
    if (std::abs((gm - gl) - (gr - gm)) > 1e-9 * std::max(1.0, gr - gl)) continue;
    curve.min_midpoint_concavity =
        std::min(curve.min_midpoint_concavity,
                 curve.values[k] - 0.5 * (curve.values[k - 1] + curve.values[k + 1]));
  }

  // One-sided difference quotients of C at 0, Richardson-refined over the two
  // smallest |gamma| on each side.
  std::vector<double> pos, neg;
  for (double g : sorted) {
    if (g > 0) pos.push_back(g);
    if (g < 0) neg.push_back(-g);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto value_at = [&](double g) {
    for (std::size_t k = 0; k < curve.gammas.size(); ++k)
      if (std::abs(curve.gammas[k] - g) < 1e-14) return curve.values[k];
    fail(ErrorKind::InvalidParameter, "gamma sample lookup failed");
  };
  auto quotient = [&](const std::vector<double>& mags, double sign) {
    if (mags.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double g1 = mags.front();
    double q1 = value_at(sign * g1) / (sign * g1);
    if (mags.size() == 1) return q1;
    const double g2 = mags[1];
    const double q2 = value_at(sign * g2) / (sign * g2);
    return q1 + (q1 - q2) * g1 / (g2 - g1);
  };
  curve.quotient_plus = quotient(pos, 1.0);
  curve.quotient_minus = quotient(neg, -1.0);
  return curve;
}

BackForthReport back_forth_check(const LagrangianSpec& spec, const Domain& domain,
                                 const std::vector<double>& gammas,
                                 const std::vector<double>& lambdas, double h,
                                 const HowardOptions& opt, int velocity_budget) {
  auto base = build_grid(domain, h);
  const VelocitySet vels = default_velocity_set(spec, *base, velocity_budget);
  DiscreteMdp mdp = assemble_mdp(base, spec, vels);
  EigenResult eig = ergodic_lp_solve(mdp, opt);
  OneSidedDerivatives deriv = onesided_derivatives(mdp, eig);

  BackForthReport rep;
  rep.c_minus = deriv.c_minus;
  rep.c_plus = deriv.c_plus;
  rep.curve = c_of_gamma(spec, domain, gammas, lambdas, h, opt, velocity_budget);
  rep.quotient_plus = rep.curve.quotient_plus;
  rep.quotient_minus = rep.curve.quotient_minus;

  const double scale_p = 1.0 + std::abs(rep.c_plus);
  const double scale_m = 1.0 + std::abs(rep.c_minus);
  rep.mismatch_plus = std::abs(rep.c_plus + rep.quotient_plus) / scale_p;
  rep.mismatch_minus = std::abs(rep.c_minus + rep.quotient_minus) / scale_m;

  // Chain c'_- <= -C'_- <= -C'_+ <= c'_+ ; record the worst violation.
  const double a = rep.c_minus, b = -rep.quotient_minus, c = -rep.quotient_plus,
               d = rep.c_plus;
  rep.ordering_slack = std::max({a - b, b - c, c - d, 0.0});
  rep.ordering_ok = rep.ordering_slack <= 1e-3;

  const double slope = 0.5 * (rep.c_plus + rep.c_minus);
  for (std::size_t k = 0; k < rep.curve.gammas.size(); ++k)
    rep.linearity_defect =
        std::max(rep.linearity_defect,
                 std::abs(rep.curve.values[k] + rep.curve.gammas[k] * slope));
  return rep;
}

MeasureIdentityReport measure_identity_check(const LagrangianSpec& spec,
                                             const Domain& domain, double gamma,
                                             const std::vector<double>& lambdas, double h,
                                             int face_samples, unsigned seed,
                                             const HowardOptions& opt,
                                             int velocity_budget) {
  auto base = build_grid(domain, h);
  const VelocitySet vels = default_velocity_set(spec, *base, velocity_budget);
  DiscreteMdp mdp = assemble_mdp(base, spec, vels);
  EigenResult eig = ergodic_lp_solve(mdp, opt);
  auto g = pairing_fn(spec);

  MeasureIdentityReport rep;
  rep.gamma = gamma;

  // (a) <sigma, u^0> -> 0 for duals of the fixed-domain discounted problems.
  DiscountLimitResult zero =
      ugamma_limit(spec, domain, 0.0, lambdas, h, opt, velocity_budget);
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    rep.a_samples.push_back(pairing_field(zero.duals[k], zero.u_gamma));
  rep.residual_a = std::abs(extrapolate_to_zero(lambdas, rep.a_samples));

  // (b) gamma <mu, (-x,v).grad L> + <mu, u^gamma> -> 0 for scaled duals.
  DiscountLimitResult lim =
      gamma == 0.0 ? zero
                   : ugamma_limit(spec, domain, gamma, lambdas, h, opt, velocity_budget);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const MatherMeasure& mu = lim.duals[k];
    rep.b_samples.push_back(gamma * mu.pairing(g) + pairing_field(mu, lim.u_gamma));
  }
  rep.residual_b = std::abs(extrapolate_to_zero(lambdas, rep.b_samples));

  // (c) the maximality inequality for generic optimal-face measures.
  rep.slack_c = -std::numeric_limits<double>::infinity();
  for (const MatherMeasure& mu :
       sample_face_measures(mdp, eig, face_samples, seed)) {
    rep.slack_c =
        std::max(rep.slack_c, gamma * mu.pairing(g) + pairing_field(mu, lim.u_gamma));
  }
  return rep;
}

} // namespace hjb
