// Command-line driver: runs the solver pipelines from a JSON config with
// quick overrides, and writes CSV/JSON/plot-data reports.

#include "hjb/acceptance.hpp"
#include "hjb/discount_limit.hpp"
#include "hjb/ergodic_lp.hpp"
#include "hjb/grid.hpp"
#include "hjb/hjb_solver.hpp"
#include "hjb/hopf_cole.hpp"
#include "hjb/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

namespace {

using namespace hjb;

RunningCost cost_from_flag(const std::string& s) {
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::string rest = s.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream is(rest);
    double v;
    while (is >> v) args.push_back(v);
  }
  auto arg = [&](std::size_t k, double dflt) { return k < args.size() ? args[k] : dflt; };
  if (name == "zero") return RunningCost::zero();
  if (name == "constant") return RunningCost::constant(arg(0, 0.0));
  if (name == "affine") return RunningCost::affine(arg(0, 0.0), Vec2(arg(1, 0.0), arg(2, 0.0)));
  if (name == "bump") return RunningCost::bump(arg(0, 1.0), arg(1, 0.5));
  if (name == "cosine") return RunningCost::cosine(arg(0, 1.0), arg(1, 1.0));
  fail(ErrorKind::Schema, "f: unknown catalog entry '" + name + "'");
}

Table value_field_table(const DiscreteMdp& mdp, const ValueField& f) {
  Table t;
  t.name = "value_field";
  t.header = {"x0", "x1", "u", "residual"};
  for (int i = 0; i < mdp.nodes(); ++i) {
    double best = -1e300;
    for (int k : mdp.admissible_set(i))
      best = std::max(best, mdp.generator_row(i, k, f.u) - mdp.stage_cost(i, k));
    t.rows.push_back({mdp.grid().nodes[i][0], mdp.grid().nodes[i][1], f.u[i],
                      best + f.delta * f.u[i]});
  }
  return t;
}

Table measure_table(const MatherMeasure& mu) {
  Table t;
  t.name = "mather_measure";
  t.header = {"x0", "x1", "v0", "v1", "mass"};
  for (const auto& e : mu.entries)
    t.rows.push_back({e.x[0], e.x[1], e.v[0], e.v[1], e.mass});
  return t;
}

Table curve_table(const EigenCurve& curve) {
  Table t;
  t.name = "eigencurve";
  t.header = {"lambda", "c", "dc_forward", "dc_backward", "deriv_minus", "deriv_plus"};
  for (const auto& p : curve.points)
    t.rows.push_back({p.lambda, p.c, p.dc_forward, p.dc_backward, p.deriv_minus,
                      p.deriv_plus});
  return t;
}

int run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config_hash = config_hash_hex(cfg);

  const Domain& dom = cfg.domain;
  switch (cfg.pipeline) {
    case Pipeline::Discounted: {
      LagrangianSpec spec = make_lagrangian(cfg.p, cfg.epsilon, cfg.f);
      auto grid = build_grid(dom, cfg.h);
      report.grid_sizes.push_back(grid->size());
      DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid));
      ValueField f = solve_discounted(mdp, cfg.discount);
      report.tables.push_back(value_field_table(mdp, f));
      break;
    }
    case Pipeline::Eigencurve: {
      LagrangianSpec spec = make_lagrangian(cfg.p, cfg.epsilon, cfg.f);
      EigenCurveOptions opt;
      EigenCurve curve =
          eigencurve(spec, dom, make_schedule(cfg.gamma, cfg.lambdas), cfg.h, opt);
      report.tables.push_back(curve_table(curve));
      auto grid = build_grid(dom, cfg.h);
      report.grid_sizes.push_back(grid->size());
      DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid));
      report.tables.push_back(measure_table(ergodic_lp_solve(mdp).measure));
      break;
    }
    case Pipeline::Derivatives: {
      LagrangianSpec spec = make_lagrangian(cfg.p, cfg.epsilon, cfg.f);
      auto grid = build_grid(dom, cfg.h);
      report.grid_sizes.push_back(grid->size());
      DiscreteMdp mdp = assemble_mdp(grid, spec, default_velocity_set(spec, *grid, 1024));
      EigenResult eig = ergodic_lp_solve(mdp);
      OneSidedDerivatives d = onesided_derivatives(mdp, eig);
      Table t;
      t.name = "derivatives";
      t.header = {"c", "deriv_minus", "deriv_plus", "duality_gap"};
      t.rows.push_back({eig.c, d.c_minus, d.c_plus, eig.duality_gap});
      report.tables.push_back(t);
      report.tables.push_back(measure_table(eig.measure));
      break;
    }
    case Pipeline::DiscountLimit: {
      LagrangianSpec spec = make_lagrangian(cfg.p, cfg.epsilon, cfg.f);
      std::vector<double> gammas = {-2.0 * cfg.gamma, -cfg.gamma, 0.0, cfg.gamma,
                                    2.0 * cfg.gamma};
      if (cfg.gamma == 0.0) gammas = {0.0};
      CGammaCurve curve = c_of_gamma(spec, dom, gammas, cfg.deltas, cfg.h);
      Table t;
      t.name = "c_of_gamma";
      t.header = {"gamma", "C", "defect"};
      for (std::size_t k = 0; k < curve.gammas.size(); ++k)
        t.rows.push_back({curve.gammas[k], curve.values[k], curve.defects[k]});
      report.tables.push_back(t);
      MeasureIdentityReport mi =
          measure_identity_check(spec, dom, cfg.gamma, cfg.deltas, cfg.h);
      Table ti;
      ti.name = "identity_residuals";
      ti.header = {"residual_a", "residual_b", "slack_c"};
      ti.rows.push_back({mi.residual_a, mi.residual_b, mi.slack_c});
      report.tables.push_back(ti);
      break;
    }
    case Pipeline::HopfCole: {
      LinearEigenpair pair = principal_eigenpair(dom, cfg.f, cfg.epsilon, cfg.h);
      report.grid_sizes.push_back(pair.grid->size());
      QuadraticCurve curve = eigencurve_p2(dom, cfg.f, cfg.epsilon, cfg.lambdas, cfg.h);
      Table t;
      t.name = "hopf_cole_curve";
      t.header = {"lambda", "c"};
      for (std::size_t k = 0; k < curve.lambdas.size(); ++k)
        t.rows.push_back({curve.lambdas[k], curve.c[k]});
      report.tables.push_back(t);
      Table tb;
      tb.name = "boundary";
      tb.header = {"x0", "x1", "dw_dn", "x_dot_n"};
      for (std::size_t k = 0; k < pair.boundary_nodes.size(); ++k) {
        const Vec2& x = pair.grid->nodes[pair.boundary_nodes[k]];
        Vec2 n = pair.grid->dim == 1 ? Vec2(x[0] > 0 ? 1.0 : -1.0, 0.0)
                                     : Vec2(x.normalized());
        tb.rows.push_back({x[0], x[1], pair.normal_derivative[k], x.dot(n)});
      }
      report.tables.push_back(tb);
      Table td;
      td.name = "hopf_cole_derivatives";
      td.header = {"c0", "fd_derivative", "shape_derivative", "fd_second"};
      const double c0 = curve.c[std::distance(
          curve.lambdas.begin(),
          std::min_element(curve.lambdas.begin(), curve.lambdas.end(),
                           [](double a, double b) { return std::abs(a) < std::abs(b); }))];
      td.rows.push_back({c0, curve.d1, curve.shape_d1, curve.d2});
      report.tables.push_back(td);
      break;
    }
    case Pipeline::FullSuite: {
      report = run_acceptance_suite([](const LedgerEntry& e) {
        std::printf("%-4s %-32s measured=%.6g threshold=%.6g\n",
                    e.pass ? "PASS" : "FAIL", e.name.c_str(), e.measured, e.threshold);
      });
      report.config_hash = config_hash_hex(cfg);
      break;
    }
  }

  emit_report(report, cfg, cfg.output_dir);
  const auto stop = std::chrono::steady_clock::now();
  std::fprintf(stderr, "wall time: %.2f s; outputs in %s\n",
               std::chrono::duration<double>(stop - start).count(),
               cfg.output_dir.c_str());
  return report.all_pass() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-constraint ergodic HJB laboratory"};
  app.require_subcommand(1);

  std::string config_path, f_flag, out_flag;
  double h_flag = 0, p_flag = 0, eps_flag = 0;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--h", h_flag, "grid spacing override");
  app.add_option("--p", p_flag, "gradient exponent override");
  app.add_option("--epsilon", eps_flag, "diffusion coefficient override");
  app.add_option("--f", f_flag, "running cost override, e.g. bump:1,0.5");
  app.add_option("--out", out_flag, "output directory override");

  std::map<std::string, hjb::Pipeline> names = {
      {"solve", hjb::Pipeline::Discounted},
      {"eigencurve", hjb::Pipeline::Eigencurve},
      {"derivatives", hjb::Pipeline::Derivatives},
      {"discount-limit", hjb::Pipeline::DiscountLimit},
      {"hopf-cole", hjb::Pipeline::HopfCole},
      {"suite", hjb::Pipeline::FullSuite},
  };
  for (auto& [name, pipe] : names)
    app.add_subcommand(name, "run the " + name + " pipeline");

  CLI11_PARSE(app, argc, argv);

  try {
    hjb::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = hjb::load_config_file(config_path);
    for (auto& [name, pipe] : names)
      if (app.got_subcommand(name)) cfg.pipeline = pipe;
    if (cfg.pipeline == hjb::Pipeline::HopfCole && config_path.empty() && p_flag == 0)
      cfg.p = 2.0;  // quadratic branch default
    if (h_flag > 0) cfg.h = h_flag;
    if (p_flag > 0) cfg.p = p_flag;
    if (eps_flag > 0) cfg.epsilon = eps_flag;
    if (!f_flag.empty()) cfg.f = cost_from_flag(f_flag);
    if (!out_flag.empty()) cfg.output_dir = out_flag;
    hjb::validate_config(cfg);
    return run(cfg);
  } catch (const hjb::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
