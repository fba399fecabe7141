#pragma once
// Controlled-Markov-chain discretization of the state-constraint problem
//
//   delta u + |Du|^p - f(x) - eps Lap(u) = 0
//
// written in optimal-control form with drift v and running cost
// L(x,v) = C_p|v|^q + f(x). Centered differences give, per axis,
//
//   rate(i -> i+1) = eps/h^2 + v/(2h),   rate(i -> i-1) = eps/h^2 - v/(2h),
//
// monotone exactly when |v| <= 2 eps / h (the CFL cap). A boundary node
// admits precisely the velocities whose stencil stays on the grid, i.e. the
// outward weight vanishes: the axis component is pinned at +-2 eps/h. Keeping
// the state inside therefore costs C_p (2 eps/h)^q there, which is what makes
// the discrete eigenvalue of the constrained problem strictly negative for
// f = 0 rather than the reflected-chain value zero.

#include "hjb/error.hpp"
#include "hjb/grid.hpp"
#include "hjb/lagrangian.hpp"

#include <memory>
#include <vector>

namespace hjb {

struct VelocitySet {
  int dim = 1;
  std::vector<Vec2> items;  // sorted by (|v|, components); contains v = 0

  int size() const { return static_cast<int>(items.size()); }
  const Vec2& operator[](int k) const { return items[k]; }

  static VelocitySet uniform_1d(double vmax, double dv);
  // Uniform spacing on [-core, core], geometric tail out to vmax.
  static VelocitySet graded_1d(double core, double dv, double vmax, double ratio);
  static VelocitySet uniform_2d(double vmax, double dv);

  // Appends the exact per-axis values +-cap (and their 2d combinations) so
  // that boundary rows exist.
  void ensure_cap(double cap);
  void sort_and_dedupe();
};

struct MdpOptions {
  double dt_override = 0.0;  // tests only; must not exceed the natural step
  bool supersolution_only_walls = false;  // experiment: drop boundary rows
};

class DiscreteMdp {
 public:
  DiscreteMdp(std::shared_ptr<const Grid> grid, LagrangianSpec spec, VelocitySet vels,
              MdpOptions options = {});

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  const LagrangianSpec& spec() const { return spec_; }
  const VelocitySet& velocities() const { return vels_; }
  const MdpOptions& options() const { return options_; }

  double cap() const { return cap_; }  // per-axis velocity bound 2 eps / h
  double dt() const { return dt_; }    // uniform interpolation step
  int nodes() const { return grid_->size(); }

  bool admissible(int node, int vidx) const;
  // Admissible velocity indices at a node (all interior-admissible indices
  // for interior nodes; the pinned combinations at boundary nodes).
  const std::vector<int>& admissible_set(int node) const;

  struct Stencil {
    int n = 0;
    int idx[4] = {-1, -1, -1, -1};
    double rate[4] = {0, 0, 0, 0};
    double total = 0.0;  // sum of outgoing rates
  };
  Stencil stencil(int node, int vidx) const;

  double stage_cost(int node, int vidx) const;  // L(x_i, v)
  double pairing(int node, int vidx) const;     // (-x,v).grad L at (x_i, v)
  double f_value(int node) const { return f_values_[node]; }

  // Markov-chain view: transition weights (probabilities) of the uniformized
  // chain, including the self-loop weight. Rows sum to one.
  struct ProbabilityRow {
    int n = 0;
    int idx[5] = {-1, -1, -1, -1, -1};
    double w[5] = {0, 0, 0, 0, 0};
  };
  ProbabilityRow probability_row(int node, int vidx) const;

  // G_{i,v}(u) = sum_j rate (u_i - u_j); the rate-form transport+diffusion row.
  double generator_row(int node, int vidx, const VectorXd& u) const;

  long admissible_rows() const;

 private:
  std::shared_ptr<const Grid> grid_;
  LagrangianSpec spec_;
  VelocitySet vels_;
  MdpOptions options_;
  double cap_ = 0.0;
  double dt_ = 0.0;
  VectorXd f_values_;
  std::vector<double> speed_q_;             // |v|^q per velocity
  std::vector<int> interior_admissible_;    // velocity ids valid at interior nodes
  std::vector<std::vector<int>> boundary_admissible_;  // per node (empty if interior)

  void validate() const;
};

DiscreteMdp assemble_mdp(std::shared_ptr<const Grid> grid, const LagrangianSpec& spec,
                         const VelocitySet& vels, MdpOptions options = {});
// Uniform velocity grid of spacing dv out to vmax (capped velocities added).
DiscreteMdp assemble_mdp(std::shared_ptr<const Grid> grid, const LagrangianSpec& spec,
                         double vmax, double dv, MdpOptions options = {});

// Graded default set: fine uniform core sized from the data, geometric tail
// to the CFL cap. `budget` loosely bounds the number of velocities.
VelocitySet default_velocity_set(const LagrangianSpec& spec, const Grid& grid,
                                 int budget = 4096);

} // namespace hjb
