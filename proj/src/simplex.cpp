#include "hjb/simplex.hpp"

#include "hjb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjb {

namespace {

class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& lp, const LpOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.rows), ncols_(static_cast<int>(lp.cols.size())) {
    row_sign_.assign(m_, 1.0);
    b_ = lp.b;
    for (int i = 0; i < m_; ++i)
      if (b_[i] < 0) {
        row_sign_[i] = -1.0;
        b_[i] = -b_[i];
      }
  }

  LpResult run() {
    // Phase 1: artificial identity basis.
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = ncols_ + i;
    binv_ = MatrixXd::Identity(m_, m_);
    xb_ = b_;

    std::vector<double> phase1_cost(ncols_, 0.0);
    LpResult r1 = iterate(phase1_cost, true);
    if (r1.status == LpStatus::IterationLimit) return r1;
    double art = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= ncols_) art += xb_[i];
    // A feasibility residue at roundoff scale is accepted; the basis carries
    // the artificials at (numerically) zero level into phase 2.
    if (art > 1e-7 * (1.0 + b_.cwiseAbs().maxCoeff())) {
      LpResult out;
      out.status = LpStatus::Infeasible;
      out.iterations = iterations_;
      return out;
    }

    LpResult out = iterate(lp_.cost, false);
    out.iterations = iterations_;
    if (out.status != LpStatus::Optimal) return out;
    out.x = VectorXd::Zero(ncols_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < ncols_) out.x[basis_[i]] = xb_[i];
    out.objective = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < ncols_) out.objective += lp_.cost[basis_[i]] * xb_[i];
    out.basis = basis_;
    return out;
  }

 private:
  double colcost(const std::vector<double>& cost, int j, bool phase1) const {
    if (j >= ncols_) return phase1 ? 1.0 : 0.0;
    return cost[j];
  }

  // Accumulates y^T A_j with the row-sign normalization applied.
  double price_column(const VectorXd& y, int j) const {
    const SparseColumn& col = lp_.cols[j];
    double s = 0.0;
    for (std::size_t k = 0; k < col.idx.size(); ++k)
      s += y[col.idx[k]] * row_sign_[col.idx[k]] * col.val[k];
    return s;
  }

  VectorXd dense_column(int j) const {
    VectorXd a = VectorXd::Zero(m_);
    if (j >= ncols_) {
      a[j - ncols_] = 1.0;
      return a;
    }
    const SparseColumn& col = lp_.cols[j];
    for (std::size_t k = 0; k < col.idx.size(); ++k)
      a[col.idx[k]] += row_sign_[col.idx[k]] * col.val[k];
    return a;
  }

  bool refactor() {
    MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = dense_column(basis_[i]);
    Eigen::PartialPivLU<MatrixXd> lu(B);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) return false;
    xb_ = binv_ * b_;
    for (int i = 0; i < m_; ++i) xb_[i] = std::max(xb_[i], 0.0);
    return xb_.allFinite();
  }

  LpResult iterate(const std::vector<double>& cost, bool phase1) {
    LpResult out;
    int since_refactor = 0;
    int degenerate_streak = 0;
    bool bland = false;
    while (iterations_ < opt_.max_iterations) {
      VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = colcost(cost, basis_[i], phase1);
      VectorXd y = binv_.transpose() * cb;
      if (!y.allFinite()) {
        if (!refactor()) fail(ErrorKind::Divergence, "simplex basis breakdown");
        since_refactor = 0;
        continue;
      }

      int enter = -1;
      double best = -opt_.pivot_tol * (1.0 + y.cwiseAbs().maxCoeff());
      for (int j = 0; j < ncols_; ++j) {
        const double d = colcost(cost, j, phase1) - price_column(y, j);
        if (d < best) {
          if (bland) {
            enter = j;
            break;
          }
          best = d;
          enter = j;
        }
      }
      if (enter < 0) {
        out.status = LpStatus::Optimal;
        return out;
      }

      VectorXd w = binv_ * dense_column(enter);
      if (!w.allFinite()) {
        if (!refactor()) fail(ErrorKind::Divergence, "simplex basis breakdown");
        since_refactor = 0;
        continue;
      }
      const double wmax = w.cwiseAbs().maxCoeff();
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      const double ratio_tol = std::max(opt_.pivot_tol, 1e-11 * wmax);
      for (int i = 0; i < m_; ++i) {
        if (w[i] > ratio_tol) {
          const double t = xb_[i] / w[i];
          if (t < theta - 1e-15 ||
              (t < theta + 1e-15 && (leave < 0 || basis_[i] < basis_[leave]))) {
            theta = t;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        out.status = LpStatus::Unbounded;
        return out;
      }
      // Prefer a sturdier pivot among the (near-)tied minimum ratios.
      for (int i = 0; i < m_; ++i) {
        if (w[i] > ratio_tol && xb_[i] / w[i] <= theta + 1e-12 * (1.0 + theta) &&
            w[i] > 4.0 * w[leave])
          leave = i;
      }
      theta = xb_[leave] / w[leave];

      degenerate_streak = theta <= 1e-13 ? degenerate_streak + 1 : 0;
      if (degenerate_streak > 32) bland = true;
      if (degenerate_streak == 0) bland = false;

      xb_ -= theta * w;
      for (int i = 0; i < m_; ++i) xb_[i] = std::max(xb_[i], 0.0);
      xb_[leave] = theta;
      basis_[leave] = enter;
      const double piv = w[leave];
      VectorXd brow = binv_.row(leave) / piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave) continue;
        if (w[i] != 0.0) binv_.row(i) -= w[i] * brow.transpose();
      }
      binv_.row(leave) = brow.transpose();

      ++iterations_;
      const bool weak_pivot = std::abs(piv) < 1e-7 * std::max(1.0, wmax);
      if (++since_refactor >= opt_.refactor_every || weak_pivot) {
        if (!refactor()) fail(ErrorKind::Divergence, "simplex basis breakdown");
        since_refactor = 0;
      }
    }
    out.status = LpStatus::IterationLimit;
    return out;
  }

  const LpProblem& lp_;
  const LpOptions& opt_;
  int m_;
  int ncols_;
  std::vector<double> row_sign_;
  VectorXd b_;
  std::vector<int> basis_;
  MatrixXd binv_;
  VectorXd xb_;
  long iterations_ = 0;
};

} // namespace

LpResult solve_lp(const LpProblem& lp, const LpOptions& opt) {
  if (lp.rows <= 0 || lp.cols.empty())
    fail(ErrorKind::Formulation, "empty linear program");
  if (static_cast<int>(lp.cost.size()) != static_cast<int>(lp.cols.size()) ||
      lp.b.size() != lp.rows)
    fail(ErrorKind::Formulation, "inconsistent linear program dimensions");
  RevisedSimplex solver(lp, opt);
  return solver.run();
}

} // namespace hjb
