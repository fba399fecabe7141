#pragma once
// Vanishing discount on changing domains: solves (lambda, (1+gamma*lambda)Omega),
// pulls the fields back to the base grid through u~(x) = (1+r)^{-2} u((1+r)x),
// extrapolates the limit u^gamma, builds the scalar map C(gamma) = u^gamma - u^0,
// and checks the derivative relation c'(0) = -C'(0) and the measure identities.

#include "hjb/domain.hpp"
#include "hjb/ergodic_lp.hpp"
#include "hjb/hjb_solver.hpp"

#include <vector>

namespace hjb {

struct ChangingDomainSolve {
  double lambda = 0.0;
  double r = 0.0;               // gamma * lambda
  VectorXd normalized;          // (1+r)^{-2} u((1+r)x) + c0/lambda on base indexing
  double band_c_lambda = 0.0;   // sup |lambda u + c_h(lambda)| (if requested)
  double band_c0 = 0.0;         // sup |lambda u + c_h(0)|
  double c_lambda = 0.0;
  MatherMeasure dual;           // discounted dual at the origin, scaled to base
};

// Solves the discounted problem on the dilated domain with spacing (1+r)h so
// the pullback hits base nodes exactly. `c0` is the base-grid eigenvalue.
ChangingDomainSolve changing_domain_solve(const LagrangianSpec& spec, const Domain& domain,
                                          double gamma, double lambda, double h, double c0,
                                          bool want_bands = false,
                                          const HowardOptions& opt = {},
                                          int velocity_budget = 2048);

struct DiscountLimitResult {
  double gamma = 0.0;
  double c0 = 0.0;
  std::vector<double> lambdas;
  std::vector<VectorXd> fields;   // normalized pulled-back fields per lambda
  std::vector<MatherMeasure> duals;
  VectorXd u_tilde_limit;         // Richardson limit of the normalized fields
  VectorXd u_gamma;               // u_tilde_limit - 2 gamma c0
  std::vector<double> cauchy;     // successive sup-norm differences
  bool cauchy_decreasing = true;
  double ergodic_residual = 0.0;  // Bellman defect of u_gamma at c0 on the base grid
};

DiscountLimitResult ugamma_limit(const LagrangianSpec& spec, const Domain& domain,
                                 double gamma, const std::vector<double>& lambdas,
                                 double h, const HowardOptions& opt = {},
                                 int velocity_budget = 2048);

// Default lambda sequence {0.16, 0.08, 0.04, 0.02, 0.01, 0.005}.
std::vector<double> default_lambda_sequence();

struct CGammaCurve {
  std::vector<double> gammas;
  std::vector<double> values;   // C(gamma) = mean of u^gamma - u^0
  std::vector<double> defects;  // max |u^gamma - u^0 - C(gamma)|
  double quotient_plus = 0.0;   // Richardson quotient of C at 0+
  double quotient_minus = 0.0;  // and at 0-
  double max_increase = 0.0;    // monotonicity defect (should be <= tol)
  double min_midpoint_concavity = 0.0;  // min of C_mid - (C_left+C_right)/2
  double c0 = 0.0;
};

CGammaCurve c_of_gamma(const LagrangianSpec& spec, const Domain& domain,
                       const std::vector<double>& gammas,
                       const std::vector<double>& lambdas, double h,
                       const HowardOptions& opt = {}, int velocity_budget = 2048);

struct BackForthReport {
  double c_minus = 0.0;   // face-LP one-sided derivatives at lambda = 0
  double c_plus = 0.0;
  double quotient_minus = 0.0;  // -C'(0) quotients from the discount pipeline
  double quotient_plus = 0.0;
  double mismatch_plus = 0.0;   // relative gap |c_plus - (-C'_+)|
  double mismatch_minus = 0.0;
  bool ordering_ok = true;      // c'_- <= -C'_- <= -C'_+ <= c'_+ within slack
  double ordering_slack = 0.0;  // largest violation of the ordering chain
  double linearity_defect = 0.0;  // max |C(gamma) + gamma c'| over samples
  CGammaCurve curve;
};

BackForthReport back_forth_check(const LagrangianSpec& spec, const Domain& domain,
                                 const std::vector<double>& gammas,
                                 const std::vector<double>& lambdas, double h,
                                 const HowardOptions& opt = {},
                                 int velocity_budget = 1024);

struct MeasureIdentityReport {
  double residual_a = 0.0;  // |<sigma, u^0>| after extrapolation
  double residual_b = 0.0;  // |gamma<mu,(-x,v).grad L> + <mu, u^gamma>| extrapolated
  double slack_c = 0.0;     // max over face samples of the inequality left side
  std::vector<double> a_samples;
  std::vector<double> b_samples;
  double gamma = 0.0;
};

MeasureIdentityReport measure_identity_check(const LagrangianSpec& spec,
                                             const Domain& domain, double gamma,
                                             const std::vector<double>& lambdas, double h,
                                             int face_samples = 5, unsigned seed = 2024,
                                             const HowardOptions& opt = {},
                                             int velocity_budget = 1024);

// <mu, g> for a node field g on the measure's grid.
double pairing_field(const MatherMeasure& mu, const VectorXd& field);

// Linear-in-lambda Richardson extrapolation to 0 from the last two samples.
double extrapolate_to_zero(const std::vector<double>& lambdas,
                           const std::vector<double>& values);

} // namespace hjb
