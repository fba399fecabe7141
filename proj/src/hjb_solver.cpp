#include "hjb/hjb_solver.hpp"

#include "hjb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace hjb {

ValueField solve_discounted(const DiscreteMdp& mdp, double delta, const HowardOptions& opt) {
  DiscountedRaw raw = solve_discounted_raw(mdp, delta, opt);
  ValueField out;
  out.grid = mdp.grid_ptr();
  out.u = std::move(raw.u);
  out.delta = delta;
  out.residual = raw.residual;
  out.iterations = raw.iterations;
  out.policy = std::move(raw.policy);
  out.residual_history = std::move(raw.residual_history);

  // Lower bound delta*u >= min f: the running cost dominates min f pointwise.
  double fmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mdp.nodes(); ++i) fmin = std::min(fmin, mdp.f_value(i));
  const double floor = fmin - 1e-8 * (1.0 + std::abs(fmin));
  if ((delta * out.u.array() < floor).any())
    fail(ErrorKind::Formulation, "discounted solution violates the lower bound min f");
  return out;
}

AdaptiveSolve solve_discounted_adaptive(std::shared_ptr<const Grid> grid,
                                        const LagrangianSpec& spec, double delta,
                                        double vmax, double dv, const HowardOptions& opt) {
  const double cap = 2.0 * spec.epsilon / grid->h;
  AdaptiveSolve out;
  double v = std::min(vmax, cap);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    DiscreteMdp mdp = assemble_mdp(grid, spec, v, dv);
    out.field = solve_discounted(mdp, delta, opt);
    out.vmax_used = v;
    // Truncation test on interior nodes only; boundary velocities are pinned.
    double vmax_interior = 0.0;
    for (const Vec2& w : mdp.velocities().items)
      if (w.cwiseAbs().maxCoeff() <= v * (1.0 + 1e-12))
        vmax_interior = std::max(vmax_interior, w.norm());
    bool on_edge = false;
    for (int i = 0; i < mdp.nodes(); ++i) {
      if (mdp.grid().boundary(i)) continue;
      if (mdp.velocities()[out.field.policy[i]].norm() >=
          vmax_interior * (1.0 - 1e-12))
        on_edge = true;
    }
    if (!on_edge || v >= cap * (1.0 - 1e-12)) return out;
    v = std::min(2.0 * v, cap);
    out.doublings = attempt + 1;
  }
  return out;
}

DiscountEstimate discount_eigen_estimate(const LagrangianSpec& spec, const Domain& domain,
                                         const std::vector<double>& deltas, double h,
                                         const HowardOptions& opt) {
  if (deltas.size() < 3)
    fail(ErrorKind::InvalidParameter, "discount estimate needs at least three deltas");
  for (std::size_t k = 1; k < deltas.size(); ++k)
    if (!(deltas[k] < deltas[k - 1]))
      fail(ErrorKind::InvalidParameter, "discount sequence must decrease");

  auto grid = build_grid(domain, h);
  const VelocitySet vels = default_velocity_set(spec, *grid);
  DiscreteMdp mdp = assemble_mdp(grid, spec, vels);

  DiscountEstimate est;
  est.deltas = deltas;
  for (double d : deltas) {
    ValueField f = solve_discounted(mdp, d, opt);
    est.raw.push_back(-d * f.u[grid->origin]);
  }
  // One-step Richardson assuming -delta u = c + A delta + O(delta^2).
  for (std::size_t k = 1; k < est.raw.size(); ++k) {
    const double d0 = deltas[k - 1], d1 = deltas[k];
    est.extrapolated.push_back(est.raw[k] +
                               (est.raw[k] - est.raw[k - 1]) * d1 / (d0 - d1));
  }
  est.c = est.extrapolated.back();
  est.band = est.extrapolated.size() > 1
                 ? std::abs(est.extrapolated.back() -
                            est.extrapolated[est.extrapolated.size() - 2])
                 : std::abs(est.raw.back() - est.c);
  for (std::size_t k = 2; k < est.raw.size(); ++k)
    if (std::abs(est.raw[k] - est.raw[k - 1]) >
        std::abs(est.raw[k - 1] - est.raw[k - 2]) * (1.0 + 1e-9))
      est.monotone = false;
  if (!est.monotone && est.extrapolated.size() > 1) {
    double widest = 0.0;
    for (std::size_t k = 1; k < est.extrapolated.size(); ++k)
      widest = std::max(widest,
                        std::abs(est.extrapolated[k] - est.extrapolated[k - 1]));
    est.band = widest;
  }
  return est;
}

NestedDomainReport nested_domain_gap(const LagrangianSpec& spec, const Domain& domain,
                                     double theta, double delta, double h,
                                     const HowardOptions& opt) {
  if (!(theta >= 0)) fail(ErrorKind::InvalidParameter, "theta must be nonnegative");
  auto inner_grid = build_grid(domain, h);
  const double snapped =
      theta == 0.0 ? 0.0 : snap_lambda_to_lattice(domain, inner_grid->h, 1.0, theta);
  auto outer_grid = build_grid(scale_domain(domain, snapped), inner_grid->h);

  const VelocitySet vels = default_velocity_set(spec, *inner_grid);
  DiscreteMdp inner = assemble_mdp(inner_grid, spec, vels);
  DiscreteMdp outer = assemble_mdp(outer_grid, spec, vels);
  ValueField v = solve_discounted(inner, delta, opt);
  ValueField u = solve_discounted(outer, delta, opt);

  NestedDomainReport rep;
  rep.theta = snapped;
  rep.delta = delta;
  rep.gap.resize(inner_grid->size());
  for (int i = 0; i < inner_grid->size(); ++i) {
    const int xi = inner_grid->axis_steps(i, 0);
    const int yi = inner_grid->dim == 2 ? inner_grid->axis_steps(i, 1) : 0;
    const int j = outer_grid->lattice_index(xi, yi);
    if (j < 0) fail(ErrorKind::ScalingMismatch, "inner node missing from the outer lattice");
    rep.gap[i] = delta * (v.u[i] - u.u[j]);
  }
  rep.max_gap = rep.gap.maxCoeff();
  rep.min_gap = rep.gap.minCoeff();
  if (rep.min_gap < -1e3 * opt.tol) {
    std::ostringstream os;
    os << "nested-domain comparison violated: min gap " << rep.min_gap;
    fail(ErrorKind::Formulation, os.str());
  }
  return rep;
}

NestedSweep nested_domain_sweep(const LagrangianSpec& spec, const Domain& domain,
                                const std::vector<double>& thetas, double delta, double h,
                                const HowardOptions& opt) {
  NestedSweep sweep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double th : thetas) {
    sweep.reports.push_back(nested_domain_gap(spec, domain, th, delta, h, opt));
    const double lx = std::log(sweep.reports.back().theta);
    const double ly = std::log(std::max(sweep.reports.back().max_gap, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(thetas.size());
  sweep.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return sweep;
}

ModulusFit modulus_of_continuity(const ValueField& field) {
  const Grid& grid = *field.grid;
  ModulusFit fit;
  const double osc_total = field.u.maxCoeff() - field.u.minCoeff();
  if (osc_total <= 1e-13 * (1.0 + field.u.cwiseAbs().maxCoeff())) {
    fit.degenerate = true;
    return fit;
  }
  // Dyadic separations up to a quarter of the span.
  std::map<long, std::vector<int>> lanes;  // 2D: group nodes by the other axis
  for (int i = 0; i < grid.size(); ++i)
    lanes[grid.dim == 2 ? grid.axis_steps(i, 1) : 0].push_back(i);
  long max_steps = 0;
  for (int i = 0; i < grid.size(); ++i)
    max_steps = std::max<long>(max_steps, std::abs(grid.axis_steps(i, 0)));
  for (long k = 1; k <= max_steps / 2; k *= 2) {
    double osc = 0.0;
    for (auto& [lane, ids] : lanes) {
      for (int i : ids) {
        const int j = grid.lattice_index(grid.axis_steps(i, 0) + k, lane);
        if (j >= 0) osc = std::max(osc, std::abs(field.u[i] - field.u[j]));
      }
    }
    if (osc > 0) {
      fit.distances.push_back(k * grid.h);
      fit.oscillations.push_back(osc);
    }
  }
  if (fit.distances.size() < 2) {
    fit.degenerate = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.distances.size());
  for (std::size_t k = 0; k < fit.distances.size(); ++k) {
    const double lx = std::log(fit.distances[k]);
    const double ly = std::log(fit.oscillations[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.exponent * sx) / n;
  for (std::size_t k = 0; k < fit.distances.size(); ++k) {
    const double pred = intercept + fit.exponent * std::log(fit.distances[k]);
    fit.fit_residual =
        std::max(fit.fit_residual, std::abs(pred - std::log(fit.oscillations[k])));
  }
  return fit;
}

} // namespace hjb
