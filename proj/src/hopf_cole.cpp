#include "hjb/hopf_cole.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hjb {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct DirichletOperator {
  std::shared_ptr<const Grid> grid;
  std::vector<int> unknowns;      // interior node ids
  std::vector<int> unknown_index; // node id -> unknown slot (-1 at boundary)
  SpMat matrix;                   // -eps^2 Lap_h + f on the unknowns
};

DirichletOperator build_operator(std::shared_ptr<const Grid> grid, const RunningCost& f,
                                 double epsilon) {
  DirichletOperator op;
  op.grid = grid;
  op.unknown_index.assign(grid->size(), -1);
  for (int i = 0; i < grid->size(); ++i)
    if (grid->interior[i]) {
      op.unknown_index[i] = static_cast<int>(op.unknowns.size());
      op.unknowns.push_back(i);
    }
  const int n = static_cast<int>(op.unknowns.size());
  const double s = epsilon * epsilon / (grid->h * grid->h);
  std::vector<Triplet> trips;
  trips.reserve(5 * n);
  for (int r = 0; r < n; ++r) {
    const int i = op.unknowns[r];
    trips.emplace_back(r, r, 2.0 * grid->dim * s + f.value(grid->nodes[i]));
    for (int a = 0; a < grid->dim; ++a)
      for (int d = 0; d < 2; ++d) {
        const int j = grid->neighbor[i][a][d];
        if (j >= 0 && op.unknown_index[j] >= 0)
          trips.emplace_back(r, op.unknown_index[j], -s);
        // boundary or off-grid neighbors carry the Dirichlet zero
      }
  }
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

// Second-order one-sided derivative into the domain at a boundary node,
// projected on the outward normal direction.
double one_sided_normal_derivative(const Grid& grid, const VectorXd& w, int node,
                                   const Vec2& normal) {
  double dn = 0.0;
  for (int a = 0; a < grid.dim; ++a) {
    if (std::abs(normal[a]) < 1e-14) continue;
    const int inward = normal[a] > 0 ? 0 : 1;  // step against the normal
    const int j1 = grid.neighbor[node][a][inward];
    if (j1 < 0) continue;
    const int j2 = grid.neighbor[j1][a][inward];
    const double sign = normal[a] > 0 ? 1.0 : -1.0;
    double d;
    if (j2 >= 0)
      d = sign * (3.0 * w[node] - 4.0 * w[j1] + w[j2]) / (2.0 * grid.h);
    else
      d = sign * (w[node] - w[j1]) / grid.h;
    dn += normal[a] * d;
  }
  return dn;
}

} // namespace

LinearEigenpair principal_eigenpair(const Domain& domain, const RunningCost& f,
                                    double epsilon, double h,
                                    const EigenSolveOptions& opt) {
  if (!(epsilon > 0)) fail(ErrorKind::InvalidParameter, "epsilon must be positive");
  auto grid = build_grid(domain, h);
  DirichletOperator op = build_operator(grid, f, epsilon);
  const int n = static_cast<int>(op.unknowns.size());
  if (n < 32)
    fail(ErrorKind::InvalidParameter,
         "grid too coarse for the eigen-solve; need at least 32 interior nodes");

  double fmin = std::numeric_limits<double>::infinity();
  for (int i : op.unknowns) fmin = std::min(fmin, f.value(grid->nodes[i]));

  VectorXd w = VectorXd::Ones(n);
  w /= w.norm();
  double c = 0.0, residual = std::numeric_limits<double>::infinity();
  double shift = fmin - 1.0;  // keeps the shifted operator positive definite
  int iterations = 0;
  Eigen::SparseLU<SpMat> lu;
  for (int retry = 0; retry < 3 && residual > opt.tol; ++retry) {
    SpMat shifted = op.matrix;
    for (int r = 0; r < n; ++r) shifted.coeffRef(r, r) -= shift;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) {
      shift -= 1.0;  // walked onto an eigenvalue; back off
      continue;
    }
    double last_residual = residual;
    int stall = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
      VectorXd z = lu.solve(w);
      z /= z.norm();
      const double rq = z.dot(op.matrix * z);
      residual = (op.matrix * z - rq * z).cwiseAbs().maxCoeff() / (1.0 + std::abs(rq));
      w = z;
      c = rq;
      ++iterations;
      if (residual <= opt.tol) break;
      if (residual > 0.5 * last_residual) {
        if (++stall > 30) break;  // stagnation: retry with a Rayleigh shift
      } else {
        stall = 0;
      }
      last_residual = residual;
    }
    if (residual > opt.tol) shift = c - std::max(1e-6, 1e3 * residual);
  }
  if (residual > opt.tol) {
    std::ostringstream os;
    os << "inverse power iteration stagnated: residual " << residual << " after "
       << iterations << " iterations";
    fail(ErrorKind::Divergence, os.str());
  }

  if (w.sum() < 0) w = -w;

  LinearEigenpair pair;
  pair.grid = grid;
  pair.c = c;
  pair.epsilon = epsilon;
  pair.iterations = iterations;
  pair.residual = residual;
  pair.w = VectorXd::Zero(grid->size());
  for (int r = 0; r < n; ++r) pair.w[op.unknowns[r]] = w[r];
  const double mass = std::pow(grid->h, grid->dim) * pair.w.squaredNorm();
  pair.w /= std::sqrt(mass);
  pair.positive = true;
  for (int i : op.unknowns)
    if (!(pair.w[i] > 0)) pair.positive = false;

  for (int i = 0; i < grid->size(); ++i) {
    if (grid->interior[i]) continue;
    Vec2 normal = Vec2::Zero();
    if (grid->dim == 1) {
      normal[0] = grid->nodes[i][0] > 0 ? 1.0 : -1.0;
    } else {
      normal = grid->nodes[i].normalized();
    }
    pair.boundary_nodes.push_back(i);
    pair.normal_derivative.push_back(
        one_sided_normal_derivative(*grid, pair.w, i, normal));
  }
  return pair;
}

double rayleigh_quotient(const VectorXd& w, const RunningCost& f, double epsilon,
                         const Grid& grid) {
  if (w.size() != grid.size())
    fail(ErrorKind::Normalization, "trial function does not match the grid");
  const double vol = std::pow(grid.h, grid.dim);
  const double mass = vol * w.squaredNorm();
  if (std::abs(mass - 1.0) > 1e-8)
    fail(ErrorKind::Normalization, "trial function is not L2-normalized");
  for (int i = 0; i < grid.size(); ++i)
    if (grid.boundary(i) && std::abs(w[i]) > 1e-12)
      fail(ErrorKind::Normalization, "trial function must vanish at boundary nodes");
  double dirichlet = 0.0, potential = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dim; ++a) {
      const int j = grid.neighbor[i][a][1];
      const double dw = j >= 0 ? w[j] - w[i] : -w[i];  // ghost zero past the wall
      dirichlet += dw * dw;
    }
    potential += f.value(grid.nodes[i]) * w[i] * w[i];
  }
  return vol * (epsilon * epsilon * dirichlet / (grid.h * grid.h) + potential);
}

HopfColeField hopf_cole_transform(const LinearEigenpair& pair, const RunningCost& f,
                                  double interior_fraction) {
  const Grid& grid = *pair.grid;
  HopfColeField out;
  out.vhat = VectorXd::Zero(grid.size());
  out.blown_up.assign(grid.size(), false);
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.boundary(i)) {
      out.blown_up[i] = true;  // v = +infinity on the wall
      continue;
    }
    if (!(pair.w[i] > 0)) {
      std::ostringstream os;
      os << "nonpositive eigenfunction value at node " << i
         << "; the transform needs w > 0";
      fail(ErrorKind::TransformDomain, os.str());
    }
    out.vhat[i] = -pair.epsilon * std::log(pair.w[i]);
  }

  // Defect of |Dv|^2 - f - eps Lap v = c away from the boundary layer.
  double radius = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    radius = std::max(radius, grid.nodes[i].norm());
  const double cutoff = interior_fraction * radius;
  const double h = grid.h;
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.interior[i] || grid.nodes[i].norm() > cutoff) continue;
    bool deep = true;
    double grad2 = 0.0, lap = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const int jm = grid.neighbor[i][a][0], jp = grid.neighbor[i][a][1];
      if (jm < 0 || jp < 0 || grid.boundary(jm) || grid.boundary(jp)) {
        deep = false;
        break;
      }
      const double d = (out.vhat[jp] - out.vhat[jm]) / (2.0 * h);
      grad2 += d * d;
      lap += (out.vhat[jp] - 2.0 * out.vhat[i] + out.vhat[jm]) / (h * h);
    }
    if (!deep) continue;
    const double defect = std::abs(grad2 - f.value(grid.nodes[i]) -
                                   pair.epsilon * lap - pair.c);
    out.interior_defect = std::max(out.interior_defect, defect);
  }
  return out;
}

double shape_derivative(const LinearEigenpair& pair, const Domain& domain,
                        const std::function<Vec2(const Vec2&)>& V) {
  const Grid& grid = *pair.grid;
  double integral = 0.0;
  const std::size_t nb = pair.boundary_nodes.size();
  for (std::size_t k = 0; k < nb; ++k) {
    const int i = pair.boundary_nodes[k];
    const Vec2& x = grid.nodes[i];
    Vec2 normal;
    if (grid.dim == 1)
      normal = Vec2(x[0] > 0 ? 1.0 : -1.0, 0.0);
    else
      normal = x.normalized();
    const double dn = pair.normal_derivative[k];
    double weight = 1.0;  // counting measure at the two interval endpoints
    if (grid.dim == 2) {
      const double R = domain.scale * domain.radius;
      weight = 2.0 * std::numbers::pi_v<double> * R / static_cast<double>(nb);
    }
    integral += dn * dn * V(x).dot(normal) * weight;
  }
  return -pair.epsilon * pair.epsilon * integral;
}

QuadraticCurve eigencurve_p2(const Domain& domain, const RunningCost& f, double epsilon,
                             const std::vector<double>& lambdas, double h,
                             const EigenSolveOptions& opt) {
  auto base = build_grid(domain, h);
  QuadraticCurve curve;
  std::vector<double> snapped;
  for (double lam : lambdas)
    snapped.push_back(snap_lambda_to_lattice(domain, base->h, 1.0, lam));
  std::sort(snapped.begin(), snapped.end());
  snapped.erase(std::unique(snapped.begin(), snapped.end()), snapped.end());
  for (double lam : snapped) {
    LinearEigenpair pair =
        principal_eigenpair(scale_domain(domain, lam), f, epsilon, base->h, opt);
    curve.lambdas.push_back(lam);
    curve.c.push_back(pair.c);
  }

  auto value_at = [&](double lam) -> const double* {
    for (std::size_t k = 0; k < curve.lambdas.size(); ++k)
      if (std::abs(curve.lambdas[k] - lam) < 1e-12) return &curve.c[k];
    return nullptr;
  };
  const double* c0 = value_at(0.0);
  if (!c0) fail(ErrorKind::InvalidParameter, "lambda samples must include 0");

  // Smallest symmetric pairs around zero for the centered differences.
  std::vector<double> pos;
  for (double lam : snapped)
    if (lam > 0 && value_at(-lam)) pos.push_back(lam);
  if (pos.empty())
    fail(ErrorKind::InvalidParameter, "need symmetric lambda samples around 0");
  std::sort(pos.begin(), pos.end());
  const double d = pos[0];
  const double cd = *value_at(d), cmd = *value_at(-d);
  double d1 = (cd - cmd) / (2.0 * d);
  if (pos.size() > 1 && std::abs(pos[1] - 2.0 * d) < 1e-12) {
    const double D2 = (*value_at(2.0 * d) - *value_at(-2.0 * d)) / (4.0 * d);
    d1 = (4.0 * d1 - D2) / 3.0;  // fourth-order refinement
  }
  curve.d1 = d1;
  curve.d2 = (cd - 2.0 * (*c0) + cmd) / (d * d);

  LinearEigenpair base_pair = principal_eigenpair(domain, f, epsilon, base->h, opt);
  curve.shape_d1 = shape_derivative(base_pair, domain, identity_field);
  curve.crosscheck = std::abs(curve.d1 - curve.shape_d1) /
                     std::max(1e-14, std::abs(curve.shape_d1));
  return curve;
}

} // namespace hjb
