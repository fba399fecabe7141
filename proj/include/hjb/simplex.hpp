#pragma once
// Self-contained revised simplex for standard-form problems
//   min c.x  s.t.  A x = b, x >= 0,
// with sparse columns and a dense basis inverse. Sized for the optimal-face
// problems here: a few hundred rows, up to a few hundred thousand columns.

#include "hjb/types.hpp"

#include <vector>

namespace hjb {

struct SparseColumn {
  std::vector<int> idx;
  std::vector<double> val;
  void push(int i, double v) {
    idx.push_back(i);
    val.push_back(v);
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpProblem {
  int rows = 0;
  std::vector<SparseColumn> cols;
  std::vector<double> cost;
  VectorXd b;
};

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  VectorXd x;               // full-length primal solution
  std::vector<int> basis;   // basic column indices
  int iterations = 0;
};

struct LpOptions {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-10;
  long max_iterations = 200000;
  int refactor_every = 64;
};

LpResult solve_lp(const LpProblem& lp, const LpOptions& opt = {});

} // namespace hjb
