// Temporary probe: discrete ergodic eigenvalue vs the layer-ODE closed form
// c = -(eps * I_p / a)^q, I_p = (pi/p)/sin(pi/p), for f = 0 on (-a, a).
#include "hjb/grid.hpp"
#include "hjb/mdp.hpp"
#include "hjb/policy_iteration.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

using namespace hjb;

int main() {
  const double p = 3.0, eps = 0.1, a = 1.0;
  const double q = p / (p - 1.0);
  const double Ip = (std::numbers::pi / p) / std::sin(std::numbers::pi / p);
  const double c_exact = -std::pow(eps * Ip / a, q);
  std::printf("closed form c(0) = %.10f\n", c_exact);

  for (int n : {25, 50, 100, 200, 400}) {
    const double h = a / n;
    auto grid = build_grid(make_interval(a), h);
    auto vset = default_velocity_set(make_lagrangian(p, eps, RunningCost::zero()), *grid);
    DiscreteMdp mdp = assemble_mdp(grid, make_lagrangian(p, eps, RunningCost::zero()), vset);
    ErgodicRaw res = solve_ergodic_raw(mdp);
    const double lam = 0.2;
    auto grid2 = build_grid(make_interval(a * (1 + lam)), h);
    DiscreteMdp mdp2 = assemble_mdp(grid2, make_lagrangian(p, eps, RunningCost::zero()), vset);
    ErgodicRaw res2 = solve_ergodic_raw(mdp2);
    const double ratio = res2.c / res.c;
    const double ratio_exact = std::pow(1.2, -q);
    std::printf(
        "n=%4d |V|=%4d c=%.8f relerr=%.2e  iter=%d vi=%d | c(l)=%.8f ratio=%.6f "
        "ratio_err=%.2e\n",
        n, vset.size(), res.c, std::abs(res.c - c_exact) / std::abs(c_exact),
        res.iterations, int(res.used_value_iteration), res2.c, ratio,
        std::abs(ratio - ratio_exact) / ratio_exact);
  }
  return 0;
}
