#pragma once
// Discounted state-constraint solves and the diagnostics built on them:
// vanishing-discount eigenvalue estimates, nested-domain comparisons, and
// Holder-modulus probes.

#include "hjb/domain.hpp"
#include "hjb/mdp.hpp"
#include "hjb/policy_iteration.hpp"

#include <memory>
#include <vector>

namespace hjb {

struct ValueField {
  std::shared_ptr<const Grid> grid;
  VectorXd u;
  double delta = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<int> policy;
  std::vector<double> residual_history;
};

ValueField solve_discounted(const DiscreteMdp& mdp, double delta,
                            const HowardOptions& opt = {});

// Builds a uniform velocity grid of spacing dv out to vmax and solves; if a
// converged interior optimizer sits on the truncation boundary, vmax doubles
// (at most three times, never past the monotonicity cap 2*eps/h) and the
// solve repeats. Boundary nodes always use the pinned cap velocities and are
// excluded from the truncation test.
struct AdaptiveSolve {
  ValueField field;
  double vmax_used = 0.0;
  int doublings = 0;
};
AdaptiveSolve solve_discounted_adaptive(std::shared_ptr<const Grid> grid,
                                        const LagrangianSpec& spec, double delta,
                                        double vmax, double dv,
                                        const HowardOptions& opt = {});

struct DiscountEstimate {
  double c = 0.0;           // Richardson-extrapolated limit of -delta u_delta(0)
  double band = 0.0;        // error band from successive extrapolants
  bool monotone = true;     // successive raw differences shrank monotonically
  std::vector<double> deltas;
  std::vector<double> raw;          // -delta u_delta(0)
  std::vector<double> extrapolated; // pairwise Richardson values
};

DiscountEstimate discount_eigen_estimate(const LagrangianSpec& spec, const Domain& domain,
                                         const std::vector<double>& deltas, double h,
                                         const HowardOptions& opt = {});

struct NestedDomainReport {
  double theta = 0.0;
  double delta = 0.0;
  VectorXd gap;       // delta*(v - u) on the inner grid
  double max_gap = 0.0;
  double min_gap = 0.0;
};

// Solves (delta, Omega) and (delta, (1+theta)Omega) on one h-lattice (theta
// snapped to a node-count ratio) and compares on the inner grid.
NestedDomainReport nested_domain_gap(const LagrangianSpec& spec, const Domain& domain,
                                     double theta, double delta, double h,
                                     const HowardOptions& opt = {});

struct NestedSweep {
  std::vector<NestedDomainReport> reports;
  double fitted_exponent = 0.0;  // log-log slope of max gap vs theta
};

NestedSweep nested_domain_sweep(const LagrangianSpec& spec, const Domain& domain,
                                const std::vector<double>& thetas, double delta, double h,
                                const HowardOptions& opt = {});

struct ModulusFit {
  bool degenerate = false;  // constant field, exponent undefined
  double exponent = 0.0;
  double fit_residual = 0.0;
  std::vector<double> distances;
  std::vector<double> oscillations;  // sup over pairs at each distance
};

// Least-squares fit of log sup_{|x-y|=d}|u(x)-u(y)| against log d over dyadic
// separations d = h, 2h, 4h, ...
ModulusFit modulus_of_continuity(const ValueField& field);

} // namespace hjb
