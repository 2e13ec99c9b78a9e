// Copyright 2026 <Project Authors>
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace persuasion {

// maximize c.x  subject to  A x = b, x >= 0, with A stored column-wise.
struct LpProblem {
  int rows = 0;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<std::vector<std::pair<int, double>>> cols;

  int num_cols() const { return static_cast<int>(cols.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

// bland: smallest improving index always. dantzig: largest reduced cost.
// guarded: largest reduced cost, switching to smallest index while a run of
// degenerate pivots is in progress, which rules out cycling.
enum class PivotRule { bland, dantzig, guarded };

struct SimplexOptions {
  double tol = 1e-9;            // primal feasibility and reduced-cost tolerance
  double pivot_tol = 1e-9;      // smallest admissible pivot magnitude
  std::int64_t iteration_limit = -1;  // <= 0 means 50 * (rows + cols)
  int refactor_every = 0;        // <= 0 means max(100, rows / 2)
  PivotRule rule = PivotRule::guarded;
  int degenerate_streak = 50;     // guarded: degenerate pivots before switching
};

struct SimplexResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;      // structural values
  std::vector<double> y;      // row duals: c_j - y.A_j <= 0 at optimum
  std::vector<int> basis;     // basic variable per row; >= num_cols means artificial
  std::int64_t iterations = 0;
  double max_reduced_cost = 0.0;
};

namespace detail {

class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.rows;
    n_ = lp.num_cols();
    flip_.assign(m_, 1.0);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      if (lp.b[i] < 0.0) flip_[i] = -1.0;
      b_(i) = flip_[i] * lp.b[i];
    }
    refactor_every_ = opt.refactor_every > 0 ? opt.refactor_every : std::max(100, m_ / 2);
    limit_ = opt.iteration_limit > 0 ? opt.iteration_limit
                                     : static_cast<std::int64_t>(50) * (m_ + n_);
  }

  SimplexResult run() {
    SimplexResult res;
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
    is_basic_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) is_basic_[n_ + i] = i;
    Binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xB_ = b_;

    // Phase 1: maximize minus the sum of artificials.
    phase_ = 1;
    LpStatus st = iterate();
    if (st == LpStatus::iteration_limit) return finish(res, st);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeas += std::max(0.0, xB_(i));
    if (infeas > opt_.tol * (1.0 + b_.cwiseAbs().sum())) return finish(res, LpStatus::infeasible);
    drive_out_artificials();

    phase_ = 2;
    st = iterate();
    return finish(res, st);
  }

 private:
  double cost(int j) const {
    if (phase_ == 1) return j >= n_ ? -1.0 : 0.0;
    return j >= n_ ? 0.0 : lp_.c[j];
  }

  // Column j with row flips applied, dense.
  Eigen::VectorXd column(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    if (j >= n_) {
      a(j - n_) = 1.0;
    } else {
      for (const auto& [r, v] : lp_.cols[j]) a(r) += flip_[r] * v;
    }
    return a;
  }

  // B^-1 a_j, exploiting the sparsity of a_j.
  Eigen::VectorXd ftran(int j) const {
    if (j >= n_) return Binv_.col(j - n_);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    for (const auto& [r, v] : lp_.cols[j]) out.noalias() += (flip_[r] * v) * Binv_.col(r);
    return out;
  }

  double dot_y(int j) const {
    double s = 0.0;
    for (const auto& [r, v] : lp_.cols[j]) s += y_(r) * flip_[r] * v;
    return s;
  }

  void refactor() {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Binv_ = B.partialPivLu().inverse();
    xB_ = Binv_ * b_;
    Eigen::VectorXd cB(m_);
    for (int i = 0; i < m_; ++i) cB(i) = cost(basis_[i]);
    y_ = Binv_.transpose() * cB;
    since_refactor_ = 0;
  }

  int price() const {
    const bool bland = opt_.rule == PivotRule::bland ||
                       (opt_.rule == PivotRule::guarded && streak_ >= opt_.degenerate_streak);
    int best = -1;
    double best_d = opt_.tol;
    for (int j = 0; j < n_; ++j) {
      if (is_basic_[j] >= 0) continue;
      double d = cost(j) - dot_y(j);
      if (d > best_d) {
        best = j;
        if (bland) return best;
        best_d = d;
      }
    }
    return best;
  }

  // Minimum-ratio row; ties broken by smallest basic index (Bland).
  int ratio_test(const Eigen::VectorXd& alpha) const {
    int row = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      if (phase_ == 2 && basis_[i] >= n_ && std::abs(alpha(i)) > opt_.pivot_tol) {
        // Artificial stuck at zero: it leaves before anything else.
        if (best > 0.0 || row < 0 || basis_[i] < basis_[row]) {
          best = 0.0;
          row = i;
        }
        continue;
      }
      if (alpha(i) <= opt_.pivot_tol) continue;
      double r = std::max(xB_(i), 0.0) / alpha(i);
      if (row < 0 || r < best - 1e-12 * (1.0 + best) ||
          (std::abs(r - best) <= 1e-12 * (1.0 + best) && basis_[i] < basis_[row])) {
        best = r;
        row = i;
      }
    }
    return row;
  }

  void pivot(int row, int entering, const Eigen::VectorXd& alpha) {
    double step = std::max(xB_(row), 0.0) / alpha(row);
    if (basis_[row] >= n_ && phase_ == 2) step = 0.0;
    streak_ = step > 0.0 ? 0 : streak_ + 1;
    double d = cost(entering) - (entering >= n_ ? y_(entering - n_) : dot_y(entering));
    xB_ -= step * alpha;
    xB_(row) = step;
    Eigen::RowVectorXd prow = Binv_.row(row) / alpha(row);
    Eigen::VectorXd a = alpha;
    a(row) -= 1.0;
    Binv_.noalias() -= a * prow;
    y_ += d * prow.transpose();
    is_basic_[basis_[row]] = -1;
    basis_[row] = entering;
    is_basic_[entering] = row;
    ++since_refactor_;
    if (since_refactor_ >= refactor_every_) refactor();
  }

  LpStatus iterate() {
    refactor();
    while (true) {
      int q = price();
      if (q < 0 && since_refactor_ > 0) {
        refactor();
        q = price();
      }
      if (q < 0) return LpStatus::optimal;
      if (iterations_ >= limit_) return LpStatus::iteration_limit;
      Eigen::VectorXd alpha = ftran(q);
      int row = ratio_test(alpha);
      if (row < 0) return LpStatus::unbounded;
      pivot(row, q, alpha);
      ++iterations_;
    }
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      Eigen::RowVectorXd rowi = Binv_.row(i);
      int best = -1;
      double best_v = 1e-7;
      for (int j = 0; j < n_; ++j) {
        if (is_basic_[j] >= 0) continue;
        double s = 0.0;
        for (const auto& [r, v] : lp_.cols[j]) s += rowi(r) * flip_[r] * v;
        if (std::abs(s) > best_v) {
          best_v = std::abs(s);
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; artificial stays basic at zero
      Eigen::VectorXd alpha = ftran(best);
      xB_(i) = 0.0;
      Eigen::RowVectorXd prow = Binv_.row(i) / alpha(i);
      Eigen::VectorXd a = alpha;
      a(i) -= 1.0;
      Binv_.noalias() -= a * prow;
      is_basic_[basis_[i]] = -1;
      basis_[i] = best;
      is_basic_[best] = i;
    }
    since_refactor_ = 1;
  }

  SimplexResult& finish(SimplexResult& res, LpStatus st) {
    refactor();
    res.status = st;
    res.iterations = iterations_;
    res.basis = basis_;
    res.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = std::max(0.0, xB_(i));
    res.y.resize(m_);
    for (int i = 0; i < m_; ++i) res.y[i] = flip_[i] * y_(i);
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += lp_.c[j] * res.x[j];
    double worst = 0.0;
    if (phase_ == 2) {
      for (int j = 0; j < n_; ++j) worst = std::max(worst, lp_.c[j] - dot_y(j));
    }
    res.max_reduced_cost = worst;
    return res;
  }

  const LpProblem& lp_;
  SimplexOptions opt_;
  int m_ = 0, n_ = 0;
  int phase_ = 1;
  std::int64_t limit_ = 0, iterations_ = 0;
  int since_refactor_ = 0;
  int refactor_every_ = 100;
  int streak_ = 0;
  std::vector<double> flip_;
  std::vector<int> basis_, is_basic_;
  Eigen::VectorXd b_, xB_, y_;
  Eigen::MatrixXd Binv_;
};

}  // namespace detail

// Dense revised simplex with an explicit basis inverse, periodic LU
// refactorization and a two-phase start. Duals come from the final basis.
inline SimplexResult solve_simplex(const LpProblem& lp, const SimplexOptions& opt = {}) {
  return detail::RevisedSimplex(lp, opt).run();
}

}  // namespace persuasion
