#pragma once
// Howard policy iteration for the discounted and average-cost chains, plus
// the linear-algebra helpers shared by the dual-measure constructions.

#include "hjb/mdp.hpp"

#include <vector>

namespace hjb {

struct HowardOptions {
  double tol = 1e-10;
  int max_policies = 200;
  int value_iteration_cap = 200000;  // fallback sweeps
};

struct DiscountedRaw {
  VectorXd u;
  std::vector<int> policy;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

struct ErgodicRaw {
  double c = 0.0;  // additive eigenvalue (c_h)
  VectorXd u;      // ergodic field, u(origin) = 0
  std::vector<int> policy;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  bool used_value_iteration = false;
};

DiscountedRaw solve_discounted_raw(const DiscreteMdp& mdp, double delta,
                                   const HowardOptions& opt = {});

ErgodicRaw solve_ergodic_raw(const DiscreteMdp& mdp, const HowardOptions& opt = {});

// Stationary distribution (node marginals) of the policy chain in rate form:
// mu^T Q_pi = 0, sum mu = 1.
VectorXd stationary_distribution(const DiscreteMdp& mdp, const std::vector<int>& policy);

// Expected discounted visit densities from vertex z under the policy:
// (delta I + Q_pi)^T nu = e_z. Componentwise nonnegative.
VectorXd discounted_visit_density(const DiscreteMdp& mdp, const std::vector<int>& policy,
                                  double delta, int z);

} // namespace hjb
