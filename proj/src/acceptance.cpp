#include "hjb/acceptance.hpp"

#include "hjb/discount_limit.hpp"
#include "hjb/ergodic_lp.hpp"
#include "hjb/grid.hpp"
#include "hjb/hjb_solver.hpp"
#include "hjb/hopf_cole.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hjb {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

struct Ledger {
  RunReport report;
  const std::function<void(const LedgerEntry&)>* progress = nullptr;

  void add(const std::string& name, const std::string& property, double measured,
           double threshold, bool pass, const std::string& detail = "") {
    LedgerEntry e{name, property, measured, threshold, pass, detail};
    report.ledger.push_back(e);
    if (progress && *progress) (*progress)(e);
  }

  // Convenience for "measured <= threshold" checks.
  void bound(const std::string& name, const std::string& property, double measured,
             double threshold, const std::string& detail = "") {
    add(name, property, measured, threshold, measured <= threshold, detail);
  }
};

LagrangianSpec spec_with(double p, double eps, RunningCost f) {
  return make_lagrangian(p, eps, std::move(f));
}

EigenResult solve_on(const LagrangianSpec& spec, const Domain& dom, double h, int budget) {
  auto grid = build_grid(dom, h);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, budget));
  return ergodic_lp_solve(mdp);
}

// ---- 1. scaling law against the dilation identity (f = 0) ----------------

void check_scaling_law(Ledger& led) {
  const double q = 1.5;
  const double exact = std::pow(1.2, -q);
  for (const auto& [n, tol] : std::vector<std::pair<int, double>>{{200, 0.01},
                                                                  {400, 0.003}}) {
    const double h = 1.0 / n;
    LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::zero());
    auto grid = build_grid(make_interval(1.0), h);
    const VelocitySet vels = default_velocity_set(spec, *grid);
    EigenResult base = ergodic_lp_solve(assemble_mdp(grid, spec, vels));
    auto grid2 = build_grid(make_interval(1.2), h);
    EigenResult scaled = ergodic_lp_solve(assemble_mdp(grid2, spec, vels));
    const double ratio = scaled.c / base.c;
    std::ostringstream os;
    os << "c(0.2)/c(0) = " << ratio << " vs (1.2)^{-3/2} = " << exact;
    led.bound("scaling-law-h" + std::to_string(n),
              "dilation identity for the eigenvalue ratio at f = 0",
              std::abs(ratio - exact) / exact, tol, os.str());
  }
}

// ---- 2. exact discrete derivative identity (f = 0) -----------------------

void check_derivative_identity(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::zero());
  auto grid = build_grid(make_interval(1.0), 1.0 / 32);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 512));
  EigenResult eig = ergodic_lp_solve(mdp);
  OneSidedDerivatives d = onesided_derivatives(mdp, eig);
  led.bound("derivative-identity", "one-sided derivatives equal -q c_h at f = 0",
            std::abs(d.c_plus + spec.q * eig.c), 1e-8);
  led.bound("derivative-face-width", "one-sided derivatives coincide at f = 0",
            std::abs(d.c_plus - d.c_minus), 1e-8);
}

// ---- 3. derivative vs curve consistency (bump f) --------------------------

void check_derivative_vs_curve(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  const double h = 1.0 / 100;
  const int budget = 1024;
  auto grid = build_grid(make_interval(1.0), h);
  const VelocitySet vels = default_velocity_set(spec, *grid, budget);
  DiscreteMdp mdp = assemble_mdp(grid, spec, vels);
  EigenResult eig = ergodic_lp_solve(mdp);
  OneSidedDerivatives d = onesided_derivatives(mdp, eig);

  auto c_at = [&](double lam) {
    auto g = build_grid(make_interval(1.0 + lam), h);
    return ergodic_lp_solve(assemble_mdp(g, spec, vels)).c;
  };
  const double dl = 0.02;
  const double centered = (c_at(dl) - c_at(-dl)) / (2.0 * dl);
  const double lo = d.c_minus - 0.05 * std::abs(d.c_minus);
  const double hi = d.c_plus + 0.05 * std::abs(d.c_plus);
  const double outside = std::max({lo - centered, centered - hi, 0.0});
  std::ostringstream os;
  os << "centered " << centered << " vs face [" << d.c_minus << ", " << d.c_plus << "]";
  led.add("derivative-vs-curve",
          "centered eigenvalue difference quotient sits in the one-sided bracket",
          outside, 0.0, outside <= 0.0, os.str());
}

// ---- 4. exact shift equivariance ------------------------------------------

void check_f_shift(Ledger& led) {
  const double h = 1.0 / 32;
  const int budget = 512;
  double worst = 0.0;
  for (const RunningCost& f :
       {RunningCost::zero(), RunningCost::affine(0.5, Vec2(0.3, 0.0)),
        RunningCost::bump(1.0, 0.5), RunningCost::cosine(1.0, 2.0)}) {
    const double base = solve_on(spec_with(3.0, 0.1, f), make_interval(1.0), h, budget).c;
    for (double K : {-3.0, 1.0, 7.0}) {
      RunningCost shifted = f;
      shifted.offset += K;
      const double c =
          solve_on(spec_with(3.0, 0.1, shifted), make_interval(1.0), h, budget).c;
      worst = std::max(worst, std::abs(c - (base - K)));
    }
  }
  led.bound("f-shift", "adding K to f shifts c_h by exactly -K", worst, 1e-10);
}

// ---- 5. monotonicity and Lipschitz stability ------------------------------

void check_monotone_lipschitz(Ledger& led) {
  const double h = 1.0 / 100;
  double worst_increase = 0.0, worst_stability = 0.0;
  for (const RunningCost& f :
       {RunningCost::zero(), RunningCost::affine(0.5, Vec2(0.3, 0.0)),
        RunningCost::bump(1.0, 0.5), RunningCost::cosine(1.0, 2.0)}) {
    LagrangianSpec spec = spec_with(3.0, 0.1, f);
    EigenCurveOptions opt;
    opt.velocity_budget = 1024;
    ScalingSchedule sched = make_schedule(1.0, default_lambda_samples());
    EigenCurve curve = eigencurve(spec, make_interval(1.0), sched, h, opt);
    for (std::size_t k = 0; k + 1 < curve.points.size(); ++k)
      worst_increase = std::max(worst_increase,
                                curve.points[k].c - curve.points[k + 1].c);
    // Halved spacing: insert the midpoints of every sample gap.
    std::vector<double> refined = default_lambda_samples();
    for (std::size_t k = 0; k + 1 < curve.points.size(); ++k)
      refined.push_back(0.5 * (curve.points[k].lambda + curve.points[k + 1].lambda));
    EigenCurve fine =
        eigencurve(spec, make_interval(1.0), make_schedule(1.0, refined), h, opt);
    worst_stability =
        std::max(worst_stability,
                 std::abs(fine.lipschitz - curve.lipschitz) / curve.lipschitz);
  }
  led.bound("eigencurve-monotone", "c_h nondecreasing across the lambda grid",
            worst_increase, 1e-10);
  led.bound("lipschitz-stability",
            "max difference quotient stable under lambda-grid halving",
            worst_stability, 0.2);
}

// ---- 6. duality and measure invariants ------------------------------------

void check_duality_invariants(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  auto grid = build_grid(make_interval(1.0), 1.0 / 100);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 1024));
  EigenResult eig = ergodic_lp_solve(mdp);
  led.bound("duality-gap", "strong duality: |c_h + <mu, L>|", eig.duality_gap,
            1e-8 * (1.0 + std::abs(eig.c)));
  led.bound("measure-stationarity", "per-node stationarity defect of the dual measure",
            eig.stationarity_residual, 1e-8);
  double negmass = 0.0;
  for (const auto& e : eig.measure.entries) negmass = std::min(negmass, e.mass);
  led.add("measure-normalized", "dual measure nonnegative with unit mass",
          std::abs(1.0 - eig.measure.total_mass()) - negmass, 1e-10,
          std::abs(1.0 - eig.measure.total_mass()) <= 1e-10 && negmass >= 0.0);
  double fmax = 0.0;
  for (int i = 0; i < mdp.nodes(); ++i) fmax = std::max(fmax, std::abs(mdp.f_value(i)));
  const double moment = eig.measure.pairing(
      [&](const Vec2&, const Vec2& v) { return std::pow(v.norm(), spec.q); });
  led.bound("velocity-moment", "<mu,|v|^q> within the (max|f|+|c_h|)/C_p bound", moment,
            (fmax + std::abs(eig.c)) / spec.cp + 1e-12);

  LagrangianSpec cspec = spec_with(3.0, 0.1, RunningCost::constant(2.0));
  auto cgrid = build_grid(make_interval(1.0), 1.0 / 100);
  DiscreteMdp cmdp = assemble_mdp(cgrid, cspec, default_velocity_set(cspec, *cgrid, 1024));
  EigenResult ceig = ergodic_lp_solve(cmdp);
  const double pairing = ceig.measure.pairing([&](const Vec2& x, const Vec2& v) {
    return -x.dot(cspec.f.gradient(x)) +
           cspec.q * cspec.cp * std::pow(v.norm(), cspec.q);
  });
  led.add("pairing-nonnegative", "<mu,(-x,v).grad L> >= 0 for constant f", pairing,
          -1e-8, pairing >= -1e-8);
}

// ---- 7. nested-domain estimate ---------------------------------------------

void check_nested_domain(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  NestedSweep sweep =
      nested_domain_sweep(spec, make_interval(1.0), {0.04, 0.08, 0.16}, 0.1, 1.0 / 100);
  double min_gap = 0.0;
  for (const auto& rep : sweep.reports) min_gap = std::min(min_gap, rep.min_gap);
  led.add("nested-gap-sign", "comparison direction of the nested-domain gap", min_gap,
          -1e-8, min_gap >= -1e-8);
  const double alpha = 0.5;  // (p-2)/(p-1) at p = 3
  led.add("nested-exponent", "fitted theta-exponent of the max gap",
          sweep.fitted_exponent, alpha - 0.15, sweep.fitted_exponent >= alpha - 0.15);
}

// ---- 8. vanishing-discount convergence -------------------------------------

void check_vanishing_discount(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  const double h = 1.0 / 100;
  auto grid = build_grid(make_interval(1.0), h);
  DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 2048));
  EigenResult eig = ergodic_lp_solve(mdp);
  const std::vector<double> deltas = {0.16, 0.08, 0.04, 0.02, 0.01, 0.005};
  std::vector<VectorXd> fields;
  for (double d : deltas) {
    ValueField f = solve_discounted(mdp, d);
    fields.push_back(f.u.array() + eig.c / d);
  }
  const std::size_t n = fields.size();
  // Quadratic (three-point) extrapolation as the reference limit.
  const double l1 = deltas[n - 3], l2 = deltas[n - 2], l3 = deltas[n - 1];
  const double w1 = l2 * l3 / ((l1 - l2) * (l1 - l3));
  const double w2 = l1 * l3 / ((l2 - l1) * (l2 - l3));
  const double w3 = l1 * l2 / ((l3 - l1) * (l3 - l2));
  VectorXd ref = w1 * fields[n - 3] + w2 * fields[n - 2] + w3 * fields[n - 1];

  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double dist = (fields[k] - ref).cwiseAbs().maxCoeff();
    if (dist > prev * (1.0 + 1e-9)) monotone = false;
    prev = dist;
  }
  led.add("discount-convergence-monotone",
          "sup|u_delta + c_h/delta - u^0| decreases along the delta sequence",
          monotone ? 0.0 : 1.0, 0.0, monotone);
  VectorXd lin =
      fields[n - 1] + (fields[n - 1] - fields[n - 2]) * (l3 / (l2 - l3));
  led.bound("discount-convergence-final",
            "Richardson tail of the normalized discounted fields",
            (lin - ref).cwiseAbs().maxCoeff(), 1e-3);
}

// ---- 9. back-forth relation -------------------------------------------------

void check_back_forth(Ledger& led) {
  const double h = 1.0 / 80;
  const std::vector<double> gammas = {-0.5, -0.25, 0.0, 0.25, 0.5};
  const std::vector<double> lambdas = default_lambda_sequence();

  LagrangianSpec fzero = spec_with(3.0, 0.1, RunningCost::zero());
  BackForthReport rep0 = back_forth_check(fzero, make_interval(1.0), gammas, lambdas, h);
  // For f = 0 the one-sided derivatives coincide with -q c_h exactly; the
  // discount-pipeline quotient of C must match within 2%.
  const double target = rep0.c_plus;
  const double rel = std::abs(-rep0.quotient_plus - target) / std::abs(target);
  std::ostringstream os;
  os << "-C quotient " << -rep0.quotient_plus << " vs c'(0) " << target;
  led.bound("back-forth-zero", "C(gamma) quotient matches -c'(0) at f = 0", rel, 0.02,
            os.str());

  LagrangianSpec fbump = spec_with(3.0, 0.1, RunningCost::bump(1.0, 0.5));
  BackForthReport repb = back_forth_check(fbump, make_interval(1.0), gammas, lambdas, h);
  std::ostringstream os2;
  os2 << "chain " << repb.c_minus << " <= " << -repb.quotient_minus
      << " <= " << -repb.quotient_plus << " <= " << repb.c_plus;
  led.bound("back-forth-ordering",
            "ordering c'_- <= -C'_- <= -C'_+ <= c'_+ within slack",
            repb.ordering_slack, 1e-3, os2.str());
}

// ---- 10. measure identities --------------------------------------------------

void check_measure_identities(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::zero());
  const double h = 1.0 / 80;
  const std::vector<double> lambdas = default_lambda_sequence();
  MeasureIdentityReport plus =
      measure_identity_check(spec, make_interval(1.0), 0.25, lambdas, h);
  led.bound("measure-identity-a", "<sigma, u^0> vanishes for gamma = 0 duals",
            plus.residual_a, 1e-4);
  led.bound("measure-identity-b-plus",
            "gamma<mu, pairing> + <mu, u^gamma> vanishes (gamma = +0.25)",
            plus.residual_b, 1e-3);
  MeasureIdentityReport minus =
      measure_identity_check(spec, make_interval(1.0), -0.25, lambdas, h);
  led.bound("measure-identity-b-minus",
            "gamma<mu, pairing> + <mu, u^gamma> vanishes (gamma = -0.25)",
            minus.residual_b, 1e-3);
}

// ---- 11. quadratic-case closed forms ----------------------------------------

void check_hopf_cole(Ledger& led) {
  const double h = 1.0 / 128;  // 255 interior nodes
  LinearEigenpair pair =
      principal_eigenpair(make_interval(1.0), RunningCost::zero(), 1.0, h);
  const double c_exact = kPi * kPi / 4.0;
  led.bound("hopf-cole-eigenvalue", "principal Dirichlet eigenvalue pi^2/4",
            std::abs(pair.c - c_exact) / c_exact, 1e-3);
  const double sd = shape_derivative(pair, make_interval(1.0), identity_field);
  led.bound("hopf-cole-shape-derivative", "boundary integral equals -pi^2/2",
            std::abs(sd - (-2.0 * c_exact)) / (2.0 * c_exact), 0.01);
  QuadraticCurve curve = eigencurve_p2(
      make_interval(1.0), RunningCost::zero(), 1.0,
      {-0.125, -0.0625, 0.0, 0.0625, 0.125}, h);
  led.bound("hopf-cole-second-derivative", "curvature of the eigenvalue curve 3pi^2/2",
            std::abs(curve.d2 - 6.0 * c_exact) / (6.0 * c_exact), 0.03);
}

// ---- 12. semiconvexity probe --------------------------------------------------

void check_semiconvexity(Ledger& led) {
  LagrangianSpec spec = spec_with(3.0, 0.1, RunningCost::cosine(1.0, 2.0));
  const double h = 1.0 / 100;
  EigenCurveOptions opt;
  opt.velocity_budget = 1024;
  auto grid_samples = [](double step, int count) {
    std::vector<double> ls;
    for (int k = -count; k <= count; ++k) ls.push_back(k * step);
    return ls;
  };
  EigenCurve coarse = eigencurve(spec, make_interval(1.0),
                                 make_schedule(1.0, grid_samples(0.08, 4)), h, opt);
  EigenCurve fine = eigencurve(spec, make_interval(1.0),
                               make_schedule(1.0, grid_samples(0.04, 8)), h, opt);
  const double m1 = semiconvexity_probe(coarse);
  const double m2 = semiconvexity_probe(fine);
  std::ostringstream os;
  os << "min second difference " << m1 << " -> " << m2 << " under halving";
  led.bound("semiconvexity-stability",
            "second-difference lower bound stable under lambda halving",
            std::abs(m2 - m1) / std::abs(m1), 0.3, os.str());
}

} // namespace

RunReport run_acceptance_suite(const std::function<void(const LedgerEntry&)>& progress) {
  Ledger led;
  led.progress = &progress;
  check_scaling_law(led);
  check_derivative_identity(led);
  check_derivative_vs_curve(led);
  check_f_shift(led);
  check_monotone_lipschitz(led);
  check_duality_invariants(led);
  check_nested_domain(led);
  check_vanishing_discount(led);
  check_back_forth(led);
  check_measure_identities(led);
  check_hopf_cole(led);
  check_semiconvexity(led);
  return led.report;
}

} // namespace hjb
