#include "hjb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjb {

namespace {

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(scale));
}

} // namespace

VelocitySet VelocitySet::uniform_1d(double vmax, double dv) {
  if (!(vmax > 0) || !(dv > 0))
    fail(ErrorKind::InvalidParameter, "velocity grid needs positive vmax and dv");
  const long n = std::max<long>(1, std::llround(vmax / dv));
  const double step = vmax / static_cast<double>(n);
  VelocitySet set;
  set.dim = 1;
  for (long k = -n; k <= n; ++k)
    set.items.push_back(point1d(static_cast<double>(k) * step));
  set.sort_and_dedupe();
  return set;
}

VelocitySet VelocitySet::graded_1d(double core, double dv, double vmax, double ratio) {
  if (!(core > 0) || !(dv > 0) || !(vmax >= core) || !(ratio > 1.0))
    fail(ErrorKind::InvalidParameter, "invalid graded velocity grid parameters");
  std::vector<double> mags;
  const long n = std::max<long>(1, std::llround(core / dv));
  const double step = core / static_cast<double>(n);
  for (long k = 1; k <= n; ++k) mags.push_back(static_cast<double>(k) * step);
  double w = core;
  while (w * ratio < vmax * (1.0 - 1e-12)) {
    w *= ratio;
    mags.push_back(w);
  }
  mags.push_back(vmax);
  VelocitySet set;
  set.dim = 1;
  set.items.push_back(Vec2::Zero());
  for (double m : mags) {
    set.items.push_back(point1d(-m));
    set.items.push_back(point1d(m));
  }
  set.sort_and_dedupe();
  return set;
}

VelocitySet VelocitySet::uniform_2d(double vmax, double dv) {
  VelocitySet axis = uniform_1d(vmax, dv);
  VelocitySet set;
  set.dim = 2;
  for (const Vec2& a : axis.items)
    for (const Vec2& b : axis.items)
      set.items.push_back(Vec2(a[0], b[0]));
  set.sort_and_dedupe();
  return set;
}

void VelocitySet::ensure_cap(double cap) {
  if (dim == 1) {
    bool has_pos = false, has_neg = false;
    for (const Vec2& v : items) {
      if (close(v[0], cap, cap)) has_pos = true;
      if (close(v[0], -cap, cap)) has_neg = true;
    }
    if (!has_pos) items.push_back(point1d(cap));
    if (!has_neg) items.push_back(point1d(-cap));
  } else {
    // Frame of pinned combinations so every boundary node has its row.
    std::vector<double> axis_vals;
    for (const Vec2& v : items) {
      axis_vals.push_back(v[0]);
      axis_vals.push_back(v[1]);
    }
    axis_vals.push_back(cap);
    axis_vals.push_back(-cap);
    std::sort(axis_vals.begin(), axis_vals.end());
    axis_vals.erase(std::unique(axis_vals.begin(), axis_vals.end(),
                                [&](double a, double b) { return close(a, b, cap); }),
                    axis_vals.end());
    for (double w : axis_vals) {
      items.push_back(Vec2(cap, w));
      items.push_back(Vec2(-cap, w));
      items.push_back(Vec2(w, cap));
      items.push_back(Vec2(w, -cap));
    }
  }
  sort_and_dedupe();
}

void VelocitySet::sort_and_dedupe() {
  auto key = [](const Vec2& v) {
    return std::make_tuple(v.norm(), v[0], v[1]);
  };
  std::sort(items.begin(), items.end(),
            [&](const Vec2& a, const Vec2& b) { return key(a) < key(b); });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const Vec2& a, const Vec2& b) {
                            return (a - b).norm() <= 1e-13 * (1.0 + a.norm());
                          }),
              items.end());
}

DiscreteMdp::DiscreteMdp(std::shared_ptr<const Grid> grid, LagrangianSpec spec,
                         VelocitySet vels, MdpOptions options)
    : grid_(std::move(grid)), spec_(spec), vels_(std::move(vels)), options_(options) {
  if (!(spec_.p > 2.0))
    fail(ErrorKind::InvalidParameter, "the state-constraint chain requires p > 2");
  if (vels_.dim != grid_->dim)
    fail(ErrorKind::Assembly, "velocity set dimension does not match the grid");
  const double h = grid_->h;
  cap_ = 2.0 * spec_.epsilon / h;
  const double natural_dt = h * h / (2.0 * grid_->dim * spec_.epsilon);
  dt_ = options_.dt_override > 0 ? options_.dt_override : natural_dt;
  if (dt_ > natural_dt * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt_ << " makes the self-weight negative at (node 0, v index 0);"
       << " the step may not exceed " << natural_dt;
    fail(ErrorKind::Assembly, os.str());
  }

  const int n = grid_->size();
  f_values_.resize(n);
  for (int i = 0; i < n; ++i) f_values_[i] = spec_.f.value(grid_->nodes[i]);
  speed_q_.resize(vels_.size());
  for (int k = 0; k < vels_.size(); ++k)
    speed_q_[k] = std::pow(vels_[k].norm(), spec_.q);

  // CFL: every component within the cap, else some weight would be negative.
  for (int k = 0; k < vels_.size(); ++k)
    for (int a = 0; a < grid_->dim; ++a)
      if (std::abs(vels_[k][a]) > cap_ * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "velocity component " << vels_[k][a] << " (index " << k
           << ") exceeds the monotonicity cap 2*eps/h = " << cap_;
        fail(ErrorKind::Assembly, os.str());
      }

  // Interior admissibility is node independent.
  for (int k = 0; k < vels_.size(); ++k) interior_admissible_.push_back(k);

  boundary_admissible_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (grid_->interior[i]) continue;
    if (options_.supersolution_only_walls) continue;  // experiment: no rows
    for (int k = 0; k < vels_.size(); ++k)
      if (admissible(i, k)) boundary_admissible_[i].push_back(k);
  }
  validate();
}

void DiscreteMdp::validate() const {
  for (int i = 0; i < grid_->size(); ++i) {
    if (grid_->interior[i]) continue;
    if (options_.supersolution_only_walls) continue;
    if (boundary_admissible_[i].empty()) {
      std::ostringstream os;
      os << "node " << i << " at (" << grid_->nodes[i][0] << "," << grid_->nodes[i][1]
         << ") has no admissible velocity; the set must contain the pinned values "
         << "+-2*eps/h = +-" << cap_;
      fail(ErrorKind::Assembly, os.str());
    }
  }
}

bool DiscreteMdp::admissible(int node, int vidx) const {
  const Vec2& v = vels_[vidx];
  for (int a = 0; a < grid_->dim; ++a) {
    const bool has_minus = grid_->neighbor[node][a][0] >= 0;
    const bool has_plus = grid_->neighbor[node][a][1] >= 0;
    const double va = v[a];
    if (has_minus && has_plus) {
      if (std::abs(va) > cap_ * (1.0 + 1e-9)) return false;
    } else if (has_minus && !has_plus) {
      if (!close(va, -cap_, cap_)) return false;  // outward weight must vanish
    } else if (!has_minus && has_plus) {
      if (!close(va, cap_, cap_)) return false;
    } else {
      if (!close(va, 0.0, cap_)) return false;  // axis frozen
    }
  }
  return true;
}

const std::vector<int>& DiscreteMdp::admissible_set(int node) const {
  return grid_->interior[node] ? interior_admissible_ : boundary_admissible_[node];
}

DiscreteMdp::Stencil DiscreteMdp::stencil(int node, int vidx) const {
  const Vec2& v = vels_[vidx];
  const double h = grid_->h;
  const double diff = spec_.epsilon / (h * h);
  Stencil st;
  for (int a = 0; a < grid_->dim; ++a) {
    const int jm = grid_->neighbor[node][a][0];
    const int jp = grid_->neighbor[node][a][1];
    if (jm < 0 && jp < 0) continue;
    const double adv = v[a] / (2.0 * h);
    if (jm >= 0 && jp >= 0) {
      double rp = diff + adv;
      double rm = diff - adv;
      if (rp < 0 || rm < 0) {
        if (std::min(rp, rm) < -1e-9 * diff) {
          std::ostringstream os;
          os << "negative transition weight at node " << node << ", velocity index "
             << vidx;
          fail(ErrorKind::Assembly, os.str());
        }
        rp = std::max(rp, 0.0);
        rm = std::max(rm, 0.0);
      }
      st.idx[st.n] = jp;
      st.rate[st.n++] = rp;
      st.idx[st.n] = jm;
      st.rate[st.n++] = rm;
      st.total += rp + rm;
    } else if (jm >= 0) {
      st.idx[st.n] = jm;
      st.rate[st.n++] = 2.0 * diff;  // pinned: all mass on the inward leg
      st.total += 2.0 * diff;
    } else {
      st.idx[st.n] = jp;
      st.rate[st.n++] = 2.0 * diff;
      st.total += 2.0 * diff;
    }
  }
  return st;
}

double DiscreteMdp::stage_cost(int node, int vidx) const {
  return spec_.cp * speed_q_[vidx] + f_values_[node];
}

double DiscreteMdp::pairing(int node, int vidx) const {
  const Vec2& x = grid_->nodes[node];
  return -x.dot(spec_.f.gradient(x)) + spec_.q * spec_.cp * speed_q_[vidx];
}

DiscreteMdp::ProbabilityRow DiscreteMdp::probability_row(int node, int vidx) const {
  const Stencil st = stencil(node, vidx);
  ProbabilityRow row;
  double mass = 0.0;
  for (int k = 0; k < st.n; ++k) {
    row.idx[row.n] = st.idx[k];
    row.w[row.n++] = st.rate[k] * dt_;
    mass += st.rate[k] * dt_;
  }
  row.idx[row.n] = node;  // self-loop absorbs the remaining weight
  row.w[row.n++] = 1.0 - mass;
  return row;
}

double DiscreteMdp::generator_row(int node, int vidx, const VectorXd& u) const {
  const Stencil st = stencil(node, vidx);
  double g = 0.0;
  for (int k = 0; k < st.n; ++k) g += st.rate[k] * (u[node] - u[st.idx[k]]);
  return g;
}

long DiscreteMdp::admissible_rows() const {
  long rows = 0;
  for (int i = 0; i < grid_->size(); ++i) rows += admissible_set(i).size();
  return rows;
}

DiscreteMdp assemble_mdp(std::shared_ptr<const Grid> grid, const LagrangianSpec& spec,
                         const VelocitySet& vels, MdpOptions options) {
  return DiscreteMdp(std::move(grid), spec, vels, options);
}

DiscreteMdp assemble_mdp(std::shared_ptr<const Grid> grid, const LagrangianSpec& spec,
                         double vmax, double dv, MdpOptions options) {
  const double cap = 2.0 * spec.epsilon / grid->h;
  VelocitySet set = grid->dim == 1 ? VelocitySet::uniform_1d(vmax, dv)
                                   : VelocitySet::uniform_2d(vmax, dv);
  set.ensure_cap(cap);
  return DiscreteMdp(std::move(grid), spec, std::move(set), options);
}

VelocitySet default_velocity_set(const LagrangianSpec& spec, const Grid& grid, int budget) {
  const double cap = 2.0 * spec.epsilon / grid.h;
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (const Vec2& x : grid.nodes) {
    const double f = spec.f.value(x);
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
  }
  // Interior gradient scale: |Du| ~ (osc f + eigenvalue scale)^{1/p}.
  const double gscale = std::pow(fmax - fmin + 1.0, 1.0 / spec.p) + 0.5;
  const double vcore = std::min(cap, 2.0 * conjugate_speed(spec, gscale));
  if (grid.dim == 2) {
    // Two-dimensional sets grow quadratically; keep them small and uniform.
    const int per_axis = std::max(3, static_cast<int>(std::sqrt(double(budget))) / 2);
    VelocitySet set = VelocitySet::uniform_2d(vcore, vcore / per_axis);
    set.ensure_cap(cap);
    return set;
  }
  const double ratio = 1.04;
  const int tail = cap > vcore
      ? static_cast<int>(std::ceil(std::log(cap / vcore) / std::log(ratio)))
      : 0;
  const int n_core = std::max(64, budget / 2 - tail);
  const double dv = vcore / n_core;
  VelocitySet set = cap > vcore ? VelocitySet::graded_1d(vcore, dv, cap, ratio)
                                : VelocitySet::uniform_1d(cap, dv);
  set.ensure_cap(cap);
  return set;
}

} // namespace hjb
