#pragma once
// The quadratic (p = 2) branch: the eigenvalue of the state problem equals
// the principal Dirichlet eigenvalue of -eps^2 Lap + f through w = e^{-v/eps},
// with the variational quotient, the transform itself, and the
// boundary-integral formula for the eigenvalue's domain derivative.

#include "hjb/domain.hpp"
#include "hjb/grid.hpp"
#include "hjb/lagrangian.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace hjb {

struct LinearEigenpair {
  std::shared_ptr<const Grid> grid;
  double c = 0.0;          // principal eigenvalue
  VectorXd w;              // eigenfunction, zero at boundary nodes, ||w||_L2 = 1
  double residual = 0.0;   // || -eps^2 Lap_h w + f w - c w ||_inf on interior nodes
  bool positive = false;   // w > 0 at all interior nodes
  double epsilon = 1.0;
  int iterations = 0;
  // One-sided second-order normal derivatives at boundary nodes (1D: both
  // endpoints; 2D: per boundary node, projected on the outward direction).
  std::vector<double> normal_derivative;
  std::vector<int> boundary_nodes;
};

struct EigenSolveOptions {
  double tol = 1e-11;
  int max_iterations = 500;
};

LinearEigenpair principal_eigenpair(const Domain& domain, const RunningCost& f,
                                    double epsilon, double h,
                                    const EigenSolveOptions& opt = {});

// Discrete Dirichlet energy integral(eps^2 |Dw|^2 + f w^2); equals the
// eigenvalue when w is the computed eigenfunction. Requires ||w||_L2 = 1.
double rayleigh_quotient(const VectorXd& w, const RunningCost& f, double epsilon,
                         const Grid& grid);

struct HopfColeField {
  VectorXd vhat;              // -eps log w on interior nodes (inf flag at boundary)
  std::vector<bool> blown_up; // boundary nodes where v = +infinity
  double interior_defect = 0.0;  // | |Dv|^2 - f - eps Lap v - c | away from walls
};

HopfColeField hopf_cole_transform(const LinearEigenpair& pair, const RunningCost& f,
                                  double interior_fraction = 0.7);

// Boundary integral -eps^2 int |dw/dn|^2 (V.n) dS for a perturbation field V.
double shape_derivative(const LinearEigenpair& pair, const Domain& domain,
                        const std::function<Vec2(const Vec2&)>& V);

inline Vec2 identity_field(const Vec2& x) { return x; }
inline Vec2 zero_field(const Vec2&) { return Vec2::Zero(); }

struct QuadraticCurve {
  std::vector<double> lambdas;
  std::vector<double> c;
  double d1 = 0.0;             // centered first derivative at 0
  double d2 = 0.0;             // centered second derivative at 0
  double shape_d1 = 0.0;       // boundary-integral derivative at 0
  double crosscheck = 0.0;     // relative gap between d1 and shape_d1
};

// c(lambda) on dilated domains sharing the base lattice; lambda samples are
// snapped. Needs a symmetric sample set around 0 for the derivatives.
QuadraticCurve eigencurve_p2(const Domain& domain, const RunningCost& f, double epsilon,
                             const std::vector<double>& lambdas, double h,
                             const EigenSolveOptions& opt = {});

} // namespace hjb
