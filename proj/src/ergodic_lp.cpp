#include "hjb/ergodic_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hjb {

double MatherMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& e : entries) m += e.mass;
  return m;
}

double MatherMeasure::pairing(
    const std::function<double(const Vec2&, const Vec2&)>& g) const {
  double s = 0.0;
  for (const auto& e : entries) s += e.mass * g(e.x, e.v);
  return s;
}

double mather_pairing(const MatherMeasure& mu,
                      const std::function<double(const Vec2&, const Vec2&)>& g) {
  return mu.pairing(g);
}

VectorXd stationarity_defect(const DiscreteMdp& mdp, const MatherMeasure& mu) {
  VectorXd r = VectorXd::Zero(mdp.nodes());
  for (const auto& e : mu.entries) {
    const auto row = mdp.probability_row(e.node, e.vidx);
    for (int k = 0; k < row.n; ++k) r[row.idx[k]] += e.mass * row.w[k];
    r[e.node] -= e.mass;
  }
  return r;
}

EigenResult ergodic_lp_solve(const DiscreteMdp& mdp, const HowardOptions& opt) {
  ErgodicRaw raw = solve_ergodic_raw(mdp, opt);
  EigenResult out;
  out.c = raw.c;
  out.u = raw.u.array() - raw.u[mdp.grid().origin];
  out.policy = raw.policy;
  out.iterations = raw.iterations;

  const VectorXd mu = stationary_distribution(mdp, raw.policy);
  out.measure.scale_tag = 1.0;
  double cost = 0.0;
  for (int i = 0; i < mdp.nodes(); ++i) {
    if (mu[i] <= 0.0) continue;
    MatherEntry e;
    e.node = i;
    e.vidx = raw.policy[i];
    e.x = mdp.grid().nodes[i];
    e.v = mdp.velocities()[e.vidx];
    e.mass = mu[i];
    out.measure.entries.push_back(e);
    cost += mu[i] * mdp.stage_cost(i, raw.policy[i]);
  }
  out.duality_gap = std::abs(out.c + cost);
  out.mass_defect = std::abs(1.0 - out.measure.total_mass());
  out.stationarity_residual = stationarity_defect(mdp, out.measure).cwiseAbs().maxCoeff();

  double primal = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < mdp.nodes(); ++i)
    for (int k : mdp.admissible_set(i))
      primal = std::max(primal, mdp.generator_row(i, k, out.u) -
                                    mdp.stage_cost(i, k) - out.c);
  out.primal_residual = primal;

  const double scale = 1.0 + std::abs(out.c);
  const bool ok = out.duality_gap <= 1e-8 * scale && out.stationarity_residual <= 1e-8 &&
                  out.mass_defect <= 1e-10 && out.primal_residual <= 10.0 * opt.tol;
  if (ok) {
    out.status = "optimal";
  } else {
    std::ostringstream os;
    os << "certificate out of tolerance: gap=" << out.duality_gap
       << " stationarity=" << out.stationarity_residual << " mass=" << out.mass_defect
       << " primal=" << out.primal_residual;
    out.status = os.str();
  }
  return out;
}

namespace {

// Columns of the dual (stationary-measure) polytope in probability form,
// plus the normalization row and the scaled optimal-cost row. The
// stationarity rows sum to zero (every column's entries cancel), so the row
// for the origin node is dropped as structurally redundant.
struct FaceLpLayout {
  LpProblem lp;
  std::vector<std::pair<int, int>> column_pairs;  // (node, vidx) per column
  int slack_col = -1;
  double cost_scale = 1.0;
};

FaceLpLayout build_face_lp(const DiscreteMdp& mdp, double c_h, double slack) {
  const int n = mdp.nodes();
  const int dropped = mdp.grid().origin;
  FaceLpLayout out;
  LpProblem& lp = out.lp;
  lp.rows = n + 1;
  auto row_of = [&](int node) { return node < dropped ? node : node - 1; };

  double lmax = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k : mdp.admissible_set(i))
      lmax = std::max(lmax, std::abs(mdp.stage_cost(i, k)));
  out.cost_scale = lmax;

  for (int i = 0; i < n; ++i) {
    for (int k : mdp.admissible_set(i)) {
      SparseColumn col;
      const auto row = mdp.probability_row(i, k);
      double self = -1.0;
      for (int t = 0; t < row.n; ++t) {
        if (row.idx[t] == i)
          self += row.w[t];
        else if (row.idx[t] != dropped)
          col.push(row_of(row.idx[t]), row.w[t]);
      }
      if (i != dropped) col.push(row_of(i), self);
      col.push(n - 1, 1.0);
      col.push(n, mdp.stage_cost(i, k) / lmax);
      lp.cols.push_back(std::move(col));
      out.column_pairs.emplace_back(i, k);
    }
  }
  // Slack of the face row <mu, L> + s = -c_h + slack.
  SparseColumn scol;
  scol.push(n, 1.0);
  out.slack_col = static_cast<int>(lp.cols.size());
  lp.cols.push_back(std::move(scol));
  out.column_pairs.emplace_back(-1, -1);

  lp.b = VectorXd::Zero(n + 1);
  lp.b[n - 1] = 1.0;
  lp.b[n] = (-c_h + slack) / lmax;
  lp.cost.assign(lp.cols.size(), 0.0);
  return out;
}

MatherMeasure measure_from_lp(const DiscreteMdp& mdp, const FaceLpLayout& layout,
                              const LpResult& res) {
  MatherMeasure mu;
  for (std::size_t j = 0; j < layout.column_pairs.size(); ++j) {
    const auto [node, vidx] = layout.column_pairs[j];
    if (node < 0 || res.x[j] <= 1e-15) continue;
    MatherEntry e;
    e.node = node;
    e.vidx = vidx;
    e.x = mdp.grid().nodes[node];
    e.v = mdp.velocities()[vidx];
    e.mass = res.x[j];
    mu.entries.push_back(e);
  }
  return mu;
}

LpResult solve_face(FaceLpLayout& layout, const std::vector<double>& objective,
                    double c_h, double* slack_io) {
  layout.lp.cost = objective;
  LpResult res = solve_lp(layout.lp);
  if (res.status == LpStatus::Infeasible) {
    // Face fixing too tight for the certificate accuracy: relax once.
    *slack_io *= 100.0;
    layout.lp.b[layout.lp.rows - 1] = (-c_h + *slack_io) / layout.cost_scale;
    res = solve_lp(layout.lp);
    if (res.status == LpStatus::Infeasible)
      fail(ErrorKind::FaceFixing,
           "optimal-face LP infeasible even after relaxing the cost slack");
  }
  if (res.status == LpStatus::Unbounded)
    fail(ErrorKind::Formulation, "optimal-face LP unbounded; broken normalization row");
  if (res.status == LpStatus::IterationLimit)
    fail(ErrorKind::Divergence, "optimal-face LP exceeded its iteration limit");
  return res;
}

} // namespace

OneSidedDerivatives onesided_derivatives(const DiscreteMdp& mdp, const EigenResult& eig,
                                         double slack) {
  double slack_abs = slack * (1.0 + std::abs(eig.c));
  FaceLpLayout layout = build_face_lp(mdp, eig.c, slack_abs);
  const std::size_t ncols = layout.lp.cols.size();

  std::vector<double> obj_max(ncols, 0.0), obj_min(ncols, 0.0);
  for (std::size_t j = 0; j + 1 < ncols; ++j) {
    const auto [node, vidx] = layout.column_pairs[j];
    const double g = mdp.pairing(node, vidx);
    obj_max[j] = -g;  // min(-g) = -max(g)
    obj_min[j] = g;
  }

  OneSidedDerivatives out;
  LpResult rmax = solve_face(layout, obj_max, eig.c, &slack_abs);
  out.c_plus = -rmax.objective;
  out.lp_iterations += rmax.iterations;
  LpResult rmin = solve_face(layout, obj_min, eig.c, &slack_abs);
  out.c_minus = rmin.objective;
  out.lp_iterations += rmin.iterations;
  out.slack_used = slack_abs;
  if (out.c_minus > out.c_plus + 1e-12 * (1.0 + std::abs(out.c_plus)))
    fail(ErrorKind::Formulation, "face extrema out of order (min > max)");
  return out;
}

std::vector<MatherMeasure> sample_face_measures(const DiscreteMdp& mdp,
                                                const EigenResult& eig, int count,
                                                unsigned seed, double slack) {
  double slack_abs = slack * (1.0 + std::abs(eig.c));
  FaceLpLayout layout = build_face_lp(mdp, eig.c, slack_abs);
  const std::size_t ncols = layout.lp.cols.size();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<MatherMeasure> measures;
  for (int s = 0; s < count; ++s) {
    std::vector<double> obj(ncols, 0.0);
    for (std::size_t j = 0; j + 1 < ncols; ++j) obj[j] = unit(rng);
    LpResult res = solve_face(layout, obj, eig.c, &slack_abs);
    measures.push_back(measure_from_lp(mdp, layout, res));
  }
  return measures;
}

MatherMeasure discounted_dual_measure(const DiscreteMdp& mdp,
                                      const std::vector<int>& policy, double delta,
                                      int z) {
  const VectorXd nu = discounted_visit_density(mdp, policy, delta, z);
  MatherMeasure mu;
  mu.vertex = z;
  for (int i = 0; i < mdp.nodes(); ++i) {
    const double mass = delta * nu[i];
    if (mass <= 0.0) continue;
    MatherEntry e;
    e.node = i;
    e.vidx = policy[i];
    e.x = mdp.grid().nodes[i];
    e.v = mdp.velocities()[e.vidx];
    e.mass = mass;
    mu.entries.push_back(e);
  }
  return mu;
}

MatherMeasure scale_measure(const MatherMeasure& mu, double r, const Grid& target) {
  if (!(1.0 + r > 0.0)) fail(ErrorKind::InvalidScale, "scale factor 1+r must be positive");
  MatherMeasure out;
  out.scale_tag = mu.scale_tag / (1.0 + r);
  out.vertex = mu.vertex;
  const double h = target.h;
  for (const auto& e : mu.entries) {
    const Vec2 y = e.x / (1.0 + r);
    long base[2] = {0, 0};
    double frac[2] = {0.0, 0.0};
    for (int a = 0; a < target.dim; ++a) {
      const double s = y[a] / h;
      double fl = std::floor(s);
      double fr = s - fl;
      if (fr < 1e-12) fr = 0.0;
      if (fr > 1.0 - 1e-12) {
        fl += 1.0;
        fr = 0.0;
      }
      base[a] = static_cast<long>(fl);
      frac[a] = fr;
    }
    // Product weights over the bracketing nodes; the last share is taken as
    // the remainder so the total mass is preserved exactly.
    double assigned = 0.0;
    std::vector<std::pair<int, double>> targets;
    const int reps = target.dim == 1 ? 2 : 4;
    for (int t = 0; t < reps; ++t) {
      const int dx = t & 1, dy = (t >> 1) & 1;
      double w = (dx ? frac[0] : 1.0 - frac[0]);
      if (target.dim == 2) w *= (dy ? frac[1] : 1.0 - frac[1]);
      if (w <= 0.0) continue;
      const int id = target.lattice_index(base[0] + dx, target.dim == 2 ? base[1] + dy : 0);
      if (id < 0) {
        std::ostringstream os;
        os << "scaled image (" << y[0] << "," << y[1] << ") falls outside the target grid";
        fail(ErrorKind::ScalingMismatch, os.str());
      }
      targets.emplace_back(id, w);
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      MatherEntry ne;
      ne.node = targets[t].first;
      ne.vidx = e.vidx;
      ne.x = target.nodes[ne.node];
      ne.v = e.v;
      ne.mass = (t + 1 == targets.size()) ? e.mass - assigned
                                          : e.mass * targets[t].second;
      assigned += ne.mass;
      out.entries.push_back(ne);
    }
  }
  return out;
}

EigenCurve eigencurve(const LagrangianSpec& spec, const Domain& domain,
                      const ScalingSchedule& schedule, double h,
                      const EigenCurveOptions& opt) {
  auto base_grid = build_grid(domain, h);
  const VelocitySet vels = default_velocity_set(spec, *base_grid, opt.velocity_budget);

  EigenCurve curve;
  curve.gamma = schedule.gamma;
  for (double lam : schedule.lambdas) {
    EigenCurvePoint pt;
    pt.lambda = schedule.gamma == 0.0
                    ? lam
                    : snap_lambda_to_lattice(domain, base_grid->h, schedule.gamma, lam);
    try {
      const double r = schedule.r(pt.lambda);
      const Domain scaled = scale_domain(domain, r);
      auto grid = build_grid(scaled, base_grid->h);
      if (std::abs(grid->h - base_grid->h) > 1e-12 * base_grid->h)
        fail(ErrorKind::ScalingMismatch, "sample not lattice compatible after snapping");
      DiscreteMdp mdp = assemble_mdp(grid, spec, vels);
      EigenResult eig = ergodic_lp_solve(mdp, opt.howard);
      pt.c = eig.c;
      if (opt.face_derivatives) {
        OneSidedDerivatives d = onesided_derivatives(mdp, eig);
        pt.deriv_minus = d.c_minus;
        pt.deriv_plus = d.c_plus;
      }
    } catch (const Error& err) {
      pt.lp_ok = false;
      pt.note = err.what();
    }
    curve.points.push_back(pt);
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const EigenCurvePoint& a, const EigenCurvePoint& b) {
              return a.lambda < b.lambda;
            });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    auto& pt = curve.points[k];
    pt.dc_forward = nan;
    pt.dc_backward = nan;
    if (k + 1 < curve.points.size() && pt.lp_ok && curve.points[k + 1].lp_ok) {
      const double d = (curve.points[k + 1].c - pt.c) /
                       (curve.points[k + 1].lambda - pt.lambda);
      pt.dc_forward = d;
      curve.lipschitz = std::max(curve.lipschitz, std::abs(d));
      if (curve.points[k + 1].c < pt.c - 1e-12 * (1.0 + std::abs(pt.c)))
        curve.monotone = false;
    }
    if (k > 0 && pt.lp_ok && curve.points[k - 1].lp_ok)
      pt.dc_backward = (pt.c - curve.points[k - 1].c) /
                       (pt.lambda - curve.points[k - 1].lambda);
  }
  return curve;
}

double semiconvexity_probe(const EigenCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 3)
    fail(ErrorKind::InvalidParameter, "semiconvexity probe needs at least three samples");
  const double d = pts[1].lambda - pts[0].lambda;
  for (std::size_t k = 1; k + 1 < pts.size(); ++k)
    if (std::abs((pts[k + 1].lambda - pts[k].lambda) - d) > 1e-9 * std::max(1.0, d))
      fail(ErrorKind::InvalidParameter, "semiconvexity probe needs equispaced samples");
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < pts.size(); ++k)
    lower = std::min(lower, (pts[k - 1].c - 2.0 * pts[k].c + pts[k + 1].c) / (d * d));
  return lower;
}

} // namespace hjb
