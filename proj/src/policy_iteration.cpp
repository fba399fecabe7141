#include "hjb/policy_iteration.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <sstream>

namespace hjb {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Best admissible velocity at a node by the Bellman score G_iv(u) - L_iv.
// Velocity sets are ordered by (|v|, components), so keeping the first strict
// maximizer realizes the smallest-speed, negative-first tie break.
struct BestAction {
  int vidx = -1;
  double score = 0.0;
};

BestAction best_action(const DiscreteMdp& mdp, int node, const VectorXd& u) {
  BestAction best;
  best.score = -std::numeric_limits<double>::infinity();
  for (int k : mdp.admissible_set(node)) {
    const double s = mdp.generator_row(node, k, u) - mdp.stage_cost(node, k);
    if (s > best.score) {
      best.score = s;
      best.vidx = k;
    }
  }
  return best;
}

SpMat policy_matrix(const DiscreteMdp& mdp, const std::vector<int>& policy, double delta) {
  const int n = mdp.nodes();
  std::vector<Triplet> trips;
  trips.reserve(5 * n);
  for (int i = 0; i < n; ++i) {
    const auto st = mdp.stencil(i, policy[i]);
    trips.emplace_back(i, i, delta + st.total);
    for (int k = 0; k < st.n; ++k) trips.emplace_back(i, st.idx[k], -st.rate[k]);
  }
  SpMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

std::vector<int> initial_policy(const DiscreteMdp& mdp) {
  std::vector<int> policy(mdp.nodes());
  for (int i = 0; i < mdp.nodes(); ++i) {
    const auto& adm = mdp.admissible_set(i);
    if (adm.empty())
      fail(ErrorKind::Formulation, "node without admissible velocity; cannot iterate");
    policy[i] = adm.front();
  }
  return policy;
}

// Relative value iteration on the uniformized chain; used when a policy
// system is singular (e.g. a transient multichain policy was visited).
ErgodicRaw relative_value_iteration(const DiscreteMdp& mdp, VectorXd u,
                                    const HowardOptions& opt) {
  const int n = mdp.nodes();
  const int origin = mdp.grid().origin;
  // Half the natural step keeps a self-loop everywhere (aperiodicity).
  const double dt = 0.5 * mdp.dt();
  ErgodicRaw out;
  out.used_value_iteration = true;
  if (u.size() != n) u = VectorXd::Zero(n);
  VectorXd w(n);
  double c = 0.0;
  for (int sweep = 0; sweep < opt.value_iteration_cap; ++sweep) {
    double span_lo = std::numeric_limits<double>::infinity(), span_hi = -span_lo;
    for (int i = 0; i < n; ++i) {
      const double best = best_action(mdp, i, u).score;
      w[i] = u[i] - dt * best;  // uniformized Bellman update
      span_lo = std::min(span_lo, best);
      span_hi = std::max(span_hi, best);
    }
    c = best_action(mdp, origin, u).score;
    u = w.array() - w[origin];
    out.iterations = sweep + 1;
    out.residual = span_hi - span_lo;
    if (out.residual <= opt.tol) break;
  }
  out.c = c;
  out.u = u;
  out.policy.resize(n);
  for (int i = 0; i < n; ++i) out.policy[i] = best_action(mdp, i, u).vidx;
  return out;
}

} // namespace

DiscountedRaw solve_discounted_raw(const DiscreteMdp& mdp, double delta,
                                   const HowardOptions& opt) {
  if (!(delta > 0)) fail(ErrorKind::InvalidParameter, "discount factor must be positive");
  const int n = mdp.nodes();
  DiscountedRaw out;
  out.policy = initial_policy(mdp);
  VectorXd u = VectorXd::Zero(n);
  Eigen::SparseLU<SpMat> lu;
  const double margin = 1e-3 * opt.tol;
  for (int it = 0; it < opt.max_policies; ++it) {
    SpMat m = policy_matrix(mdp, out.policy, delta);
    VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = mdp.stage_cost(i, out.policy[i]);
    lu.compute(m);
    if (lu.info() != Eigen::Success)
      fail(ErrorKind::Divergence, "discounted policy system is singular");
    u = lu.solve(rhs);

    double residual = 0.0;
    int switches = 0;
    for (int i = 0; i < n; ++i) {
      const BestAction best = best_action(mdp, i, u);
      const double violation = best.score + delta * u[i];
      residual = std::max(residual, violation);
      if (best.vidx != out.policy[i] && violation > margin) {
        out.policy[i] = best.vidx;
        ++switches;
      }
    }
    out.iterations = it + 1;
    out.residual = residual;
    out.residual_history.push_back(residual);
    if (residual <= opt.tol) {
      out.u = u;
      return out;
    }
    if (switches == 0) break;
  }
  std::ostringstream os;
  os << "discounted policy iteration did not reach tol " << opt.tol << " within "
     << opt.max_policies << " policies; last residual " << out.residual;
  fail(ErrorKind::Divergence, os.str());
}

ErgodicRaw solve_ergodic_raw(const DiscreteMdp& mdp, const HowardOptions& opt) {
  const int n = mdp.nodes();
  const int origin = mdp.grid().origin;
  ErgodicRaw out;
  out.policy = initial_policy(mdp);
  VectorXd u = VectorXd::Zero(n);
  double c = 0.0;
  Eigen::SparseLU<SpMat> lu;
  const double margin = 1e-3 * opt.tol;
  int stall = 0;
  double last_residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_policies; ++it) {
    // Bordered system: Q_pi u - c 1 = L_pi, u(origin) = 0.
    std::vector<Triplet> trips;
    trips.reserve(6 * n + 2);
    for (int i = 0; i < n; ++i) {
      const auto st = mdp.stencil(i, out.policy[i]);
      trips.emplace_back(i, i, st.total);
      for (int k = 0; k < st.n; ++k) trips.emplace_back(i, st.idx[k], -st.rate[k]);
      trips.emplace_back(i, n, -1.0);
    }
    trips.emplace_back(n, origin, 1.0);
    SpMat m(n + 1, n + 1);
    m.setFromTriplets(trips.begin(), trips.end());
    VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) rhs[i] = mdp.stage_cost(i, out.policy[i]);
    rhs[n] = 0.0;
    lu.compute(m);
    bool singular = lu.info() != Eigen::Success;
    VectorXd sol;
    if (!singular) {
      sol = lu.solve(rhs);
      singular = !sol.allFinite() || (m * sol - rhs).cwiseAbs().maxCoeff() >
                                         1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff());
    }
    if (singular) {
      ErgodicRaw vi = relative_value_iteration(mdp, u, opt);
      vi.iterations += it;
      return vi;
    }
    u = sol.head(n);
    c = sol[n];

    double residual = 0.0;
    int switches = 0;
    for (int i = 0; i < n; ++i) {
      const BestAction best = best_action(mdp, i, u);
      residual = std::max(residual, best.score - c);
      if (best.vidx != out.policy[i] && best.score - c > margin) {
        out.policy[i] = best.vidx;
        ++switches;
      }
    }
    out.iterations = it + 1;
    out.residual = residual;
    out.residual_history.push_back(residual);
    if (residual <= opt.tol) {
      out.c = c;
      out.u = u;
      return out;
    }
    stall = residual >= last_residual * (1.0 - 1e-12) ? stall + 1 : 0;
    last_residual = residual;
    if (switches == 0 || stall >= 4) {
      ErgodicRaw vi = relative_value_iteration(mdp, u, opt);
      vi.iterations += it + 1;
      return vi;
    }
  }
  std::ostringstream os;
  os << "ergodic policy iteration did not reach tol " << opt.tol << " within "
     << opt.max_policies << " policies; last residual " << out.residual;
  fail(ErrorKind::Divergence, os.str());
}

VectorXd stationary_distribution(const DiscreteMdp& mdp, const std::vector<int>& policy) {
  const int n = mdp.nodes();
  const int anchor = mdp.grid().origin;
  std::vector<Triplet> trips;
  trips.reserve(5 * n + n);
  // Q_pi^T mu = 0 with the anchor row replaced by the normalization.
  for (int i = 0; i < n; ++i) {
    const auto st = mdp.stencil(i, policy[i]);
    if (i != anchor) trips.emplace_back(i, i, st.total);
    for (int k = 0; k < st.n; ++k)
      if (st.idx[k] != anchor) trips.emplace_back(st.idx[k], i, -st.rate[k]);
  }
  for (int j = 0; j < n; ++j) trips.emplace_back(anchor, j, 1.0);
  SpMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  VectorXd rhs = VectorXd::Zero(n);
  rhs[anchor] = 1.0;
  Eigen::SparseLU<SpMat> lu(m);
  if (lu.info() != Eigen::Success)
    fail(ErrorKind::Formulation, "stationary system singular (policy chain not unichain)");
  VectorXd mu = lu.solve(rhs);
  for (int i = 0; i < n; ++i) {
    if (mu[i] < -1e-10)
      fail(ErrorKind::Formulation, "stationary distribution has a negative component");
    mu[i] = std::max(mu[i], 0.0);
  }
  mu /= mu.sum();
  return mu;
}

VectorXd discounted_visit_density(const DiscreteMdp& mdp, const std::vector<int>& policy,
                                  double delta, int z) {
  const int n = mdp.nodes();
  std::vector<Triplet> trips;
  trips.reserve(5 * n);
  for (int i = 0; i < n; ++i) {
    const auto st = mdp.stencil(i, policy[i]);
    trips.emplace_back(i, i, delta + st.total);
    for (int k = 0; k < st.n; ++k) trips.emplace_back(st.idx[k], i, -st.rate[k]);
  }
  SpMat m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  VectorXd rhs = VectorXd::Zero(n);
  rhs[z] = 1.0;
  Eigen::SparseLU<SpMat> lu(m);
  if (lu.info() != Eigen::Success)
    fail(ErrorKind::Formulation, "discounted visit system is singular");
  VectorXd nu = lu.solve(rhs);
  for (int i = 0; i < n; ++i) nu[i] = std::max(nu[i], 0.0);
  return nu;
}

} // namespace hjb
