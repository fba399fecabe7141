#pragma once
// Discrete additive eigenvalue c_h and discrete viscosity Mather measures.
//
// The eigenvalue problem is the linear program
//     min c   s.t.   G_{i,v}(u) - L(x_i, v) <= c   for all admissible (i, v),
// whose dual is   min <mu, L>  over stationary probability measures on
// (node, velocity) pairs, with -c_h = min <mu, L> at optimality. The solve
// runs Howard policy iteration and then assembles the full primal/dual
// optimality certificate (feasibility, stationarity, normalization, duality
// gap). One-sided eigenvalue derivatives are the extrema of the pairing
// <mu, (-x,v).grad L> over the dual optimal face, computed by a secondary LP.

#include "hjb/domain.hpp"
#include "hjb/mdp.hpp"
#include "hjb/policy_iteration.hpp"
#include "hjb/simplex.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hjb {

struct MatherEntry {
  int node = -1;
  int vidx = -1;
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  double mass = 0.0;
};

struct MatherMeasure {
  std::vector<MatherEntry> entries;
  double scale_tag = 1.0;  // dilation factor of the carrying domain
  std::optional<int> vertex;  // discounted-dual vertex z, when applicable

  double total_mass() const;
  double pairing(const std::function<double(const Vec2&, const Vec2&)>& g) const;
};

double mather_pairing(const MatherMeasure& mu,
                      const std::function<double(const Vec2&, const Vec2&)>& g);

struct EigenResult {
  double c = 0.0;          // discrete additive eigenvalue c_h
  VectorXd u;              // ergodic field, u(origin) = 0
  std::vector<int> policy; // optimal velocity index per node
  MatherMeasure measure;   // dual optimum
  double duality_gap = 0.0;           // |c_h + <mu, L>|
  double primal_residual = 0.0;       // max row violation of (u, c)
  double stationarity_residual = 0.0; // max per-node defect of mu (P - I form)
  double mass_defect = 0.0;           // |1 - sum mu|
  int iterations = 0;
  std::string status;  // "optimal" or a failure note
};

EigenResult ergodic_lp_solve(const DiscreteMdp& mdp, const HowardOptions& opt = {});

// Probability-form stationarity defect per node of an arbitrary measure.
VectorXd stationarity_defect(const DiscreteMdp& mdp, const MatherMeasure& mu);

struct OneSidedDerivatives {
  double c_minus = 0.0;  // min of the pairing over the optimal face
  double c_plus = 0.0;   // max of the pairing over the optimal face
  double slack_used = 0.0;
  long lp_iterations = 0;
};

// Secondary LP over the dual optimal face {mu stationary, normalized,
// <mu, L> <= -c_h + slack}. Relaxes the face slack once on infeasibility.
OneSidedDerivatives onesided_derivatives(const DiscreteMdp& mdp, const EigenResult& eig,
                                         double slack = 1e-9);

// Optimizes a seeded random objective over the optimal face; used to probe
// face degeneracy and the measure inequalities.
std::vector<MatherMeasure> sample_face_measures(const DiscreteMdp& mdp,
                                                const EigenResult& eig, int count,
                                                unsigned seed, double slack = 1e-9);

// Normalized dual measure of the discounted problem anchored at vertex z:
// mass delta * nu on the optimal policy's (node, velocity) pairs, where
// nu solves (delta I + Q_pi)^T nu = e_z. Satisfies <mu, L> = delta u(z).
MatherMeasure discounted_dual_measure(const DiscreteMdp& mdp,
                                      const std::vector<int>& policy, double delta,
                                      int z);

// Pushforward of the spatial coordinate x -> x/(1+r) onto a target grid,
// velocities unchanged; off-lattice images split linearly between bracketing
// nodes. Mass is preserved exactly.
MatherMeasure scale_measure(const MatherMeasure& mu, double r, const Grid& target);

struct EigenCurvePoint {
  double lambda = 0.0;
  double c = 0.0;
  double dc_forward = 0.0;   // forward difference quotient (nan at the end)
  double dc_backward = 0.0;  // backward difference quotient
  double deriv_minus = 0.0;  // secondary-LP one-sided derivatives (scaling param)
  double deriv_plus = 0.0;
  bool lp_ok = true;
  std::string note;
};

struct EigenCurve {
  std::vector<EigenCurvePoint> points;
  double lipschitz = 0.0;  // max |dc/dlambda| over sample gaps
  bool monotone = true;
  double gamma = 1.0;  // schedule slope used (r = gamma * lambda)
};

struct EigenCurveOptions {
  HowardOptions howard;
  bool face_derivatives = false;  // secondary LP at every sample (costly)
  int velocity_budget = 2048;
};

// c_h(lambda) on dilated domains sharing the base spacing h. Samples are
// snapped to lattice-compatible values. All solves reuse one velocity set
// sized for the base grid so that samples are comparable; lambda = 0
// reproduces the base solve exactly.
EigenCurve eigencurve(const LagrangianSpec& spec, const Domain& domain,
                      const ScalingSchedule& schedule, double h,
                      const EigenCurveOptions& opt = {});

// Minimum centered second difference (c(l-d) - 2c(l) + c(l+d))/d^2 over
// interior samples of an equispaced curve.
double semiconvexity_probe(const EigenCurve& curve);

} // namespace hjb
