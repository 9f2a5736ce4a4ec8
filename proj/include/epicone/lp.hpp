#pragma once

#include "epicone/core.hpp"

#include <Eigen/LU>

namespace epicone {

struct SparseColumn {
  std::vector<int> index;
  std::vector<double> value;
};

// min c.x subject to A x = b, x >= 0; A stored by columns.
struct LinearProgram {
  int rows = 0;
  std::vector<SparseColumn> cols;
  std::vector<double> cost;
  Eigen::VectorXd rhs;

  int add_column(SparseColumn c, double cost_j) {
    cols.push_back(std::move(c));
    cost.push_back(cost_j);
    return static_cast<int>(cols.size()) - 1;
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
    default: return "iteration_limit";
  }
}

struct LPResult {
  LPStatus status = LPStatus::IterationLimit;
  double value = 0;
  Eigen::VectorXd x;
  int iterations = 0;
  bool integral = false;
  int branch_nodes = 0;
};

namespace detail {

// Revised simplex with an explicit dense basis inverse. Columns flagged in
// `blocked` never enter the basis.
class Simplex {
 public:
  Simplex(const std::vector<SparseColumn>& cols, const std::vector<double>& cost, const Eigen::VectorXd& b,
          std::vector<int> basis, std::vector<char> blocked)
      : cols_(cols), cost_(cost), b_(b), basis_(std::move(basis)), blocked_(std::move(blocked)) {
    m_ = static_cast<int>(b.size());
    in_basis_.assign(cols.size(), -1);
    for (int i = 0; i < m_; ++i) in_basis_[basis_[i]] = i;
    refactor();
  }

  LPStatus run(int max_iter, int& iters) {
    int degenerate = 0;
    bool bland = false;
    for (; iters < max_iter; ++iters) {
      if (since_refactor_ >= 100) refactor();
      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
      Eigen::VectorXd y = Binv_.transpose() * cb;
      int enter = -1;
      double best = -1e-9;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (in_basis_[j] >= 0 || blocked_[j]) continue;
        double d = cost_[j];
        for (std::size_t k = 0; k < cols_[j].index.size(); ++k) d -= y(cols_[j].index[k]) * cols_[j].value[k];
        double scale = 1.0 + std::abs(cost_[j]);
        if (d < -1e-9 * scale) {
          if (bland) {
            enter = static_cast<int>(j);
            break;
          }
          if (d / scale < best) best = d / scale, enter = static_cast<int>(j);
        }
      }
      if (enter < 0) return LPStatus::Optimal;
      Eigen::VectorXd u = Eigen::VectorXd::Zero(m_);
      for (std::size_t k = 0; k < cols_[enter].index.size(); ++k)
        u += cols_[enter].value[k] * Binv_.col(cols_[enter].index[k]);
      int leave = -1;
      double tmin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (u(i) <= 1e-9) continue;
        double t = std::max(0.0, xB_(i)) / u(i);
        bool take = false;
        if (t < tmin - 1e-12)
          take = true;
        else if (t <= tmin + 1e-12 && leave >= 0)
          take = bland ? basis_[i] < basis_[leave] : u(i) > u(leave);
        if (take) tmin = std::min(t, tmin), leave = i;
      }
      if (leave < 0) return LPStatus::Unbounded;
      if (tmin <= 1e-12) {
        if (++degenerate > 50) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      pivot(leave, enter, u);
    }
    return LPStatus::IterationLimit;
  }

  const std::vector<int>& basis() const { return basis_; }
  const Eigen::VectorXd& xB() const { return xB_; }
  void refactor() {
    Mat B = Mat::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const auto& c = cols_[basis_[i]];
      for (std::size_t k = 0; k < c.index.size(); ++k) B(c.index[k], i) = c.value[k];
    }
    Eigen::PartialPivLU<Mat> lu(B);
    Binv_ = lu.inverse();
    xB_ = Binv_ * b_;
    since_refactor_ = 0;
  }

 private:
  const std::vector<SparseColumn>& cols_;
  const std::vector<double>& cost_;
  Eigen::VectorXd b_;
  std::vector<int> basis_;
  std::vector<char> blocked_;
  std::vector<int> in_basis_;
  int m_ = 0;
  Mat Binv_;
  Eigen::VectorXd xB_;
  int since_refactor_ = 0;

  void pivot(int r, int enter, const Eigen::VectorXd& u) {
    double p = u(r);
    Eigen::RowVectorXd row = Binv_.row(r) / p;
    double xr = xB_(r) / p;
    for (int i = 0; i < m_; ++i) {
      if (i == r || u(i) == 0.0) continue;
      Binv_.row(i) -= u(i) * row;
      xB_(i) -= u(i) * xr;
    }
    Binv_.row(r) = row;
    xB_(r) = xr;
    in_basis_[basis_[r]] = -1;
    basis_[r] = enter;
    in_basis_[enter] = r;
    ++since_refactor_;
  }
};

}  // namespace detail

// Two-phase simplex. If `start` is a feasible basis, phase one is skipped.
inline LPResult solve_lp(const LinearProgram& lp, const std::vector<int>* start = nullptr, int max_iter = 200000) {
  int m = lp.rows, n = static_cast<int>(lp.cols.size());
  LPResult res;
  res.x = Eigen::VectorXd::Zero(n);
  int iters = 0;
  std::vector<int> basis;
  bool feasible_start = false;
  if (start && static_cast<int>(start->size()) == m) {
    detail::Simplex probe(lp.cols, lp.cost, lp.rhs, *start, std::vector<char>(n, 0));
    feasible_start = probe.xB().minCoeff() >= -1e-9;
    if (feasible_start) basis = *start;
  }
  if (!feasible_start) {
    // phase one on [A | s I] with s = sign(b)
    std::vector<SparseColumn> cols = lp.cols;
    std::vector<double> cost(n, 0.0);
    for (int i = 0; i < m; ++i) {
      cols.push_back({{i}, {lp.rhs(i) >= 0 ? 1.0 : -1.0}});
      cost.push_back(1.0);
      basis.push_back(n + i);
    }
    std::vector<char> blocked(n + m, 0);
    detail::Simplex s1(cols, cost, lp.rhs, basis, blocked);
    LPStatus st = s1.run(max_iter, iters);
    if (st == LPStatus::IterationLimit) {
      res.status = st;
      res.iterations = iters;
      return res;
    }
    s1.refactor();
    double infeas = 0;
    for (int i = 0; i < m; ++i)
      if (s1.basis()[i] >= n) infeas += std::abs(s1.xB()(i));
    if (infeas > 1e-7 * (1.0 + lp.rhs.lpNorm<1>())) {
      res.status = LPStatus::Infeasible;
      res.iterations = iters;
      return res;
    }
    basis = s1.basis();
    // phase two keeps zero-level artificials but never lets them re-enter
    std::vector<double> cost2 = lp.cost;
    for (int i = 0; i < m; ++i) cost2.push_back(0.0);
    for (int i = 0; i < n; ++i) blocked[i] = 0;
    for (int i = 0; i < m; ++i) blocked[n + i] = 1;
    detail::Simplex s2(cols, cost2, lp.rhs, basis, blocked);
    res.status = s2.run(max_iter, iters);
    s2.refactor();
    for (int i = 0; i < m; ++i)
      if (s2.basis()[i] < n) res.x(s2.basis()[i]) = std::max(0.0, s2.xB()(i));
  } else {
    detail::Simplex s2(lp.cols, lp.cost, lp.rhs, basis, std::vector<char>(n, 0));
    res.status = s2.run(max_iter, iters);
    s2.refactor();
    for (int i = 0; i < m; ++i) res.x(s2.basis()[i]) = std::max(0.0, s2.xB()(i));
  }
  res.iterations = iters;
  Summer v;
  for (int j = 0; j < n; ++j) v.add(lp.cost[j] * res.x(j));
  res.value = v.value();
  return res;
}

inline bool is_integral(const Eigen::VectorXd& x, double tol = 1e-7) {
  for (int i = 0; i < x.size(); ++i)
    if (std::abs(x(i) - std::round(x(i))) > tol) return false;
  return true;
}

// Integer program over the same data by depth-first branch and bound on the
// LP relaxation. All variables are required integral.
inline LPResult solve_ip(const LinearProgram& lp, const std::vector<int>* start = nullptr, int max_nodes = 20000) {
  LPResult root = solve_lp(lp, start);
  root.branch_nodes = 1;
  if (root.status != LPStatus::Optimal || is_integral(root.x)) {
    root.integral = root.status == LPStatus::Optimal;
    if (root.integral)
      for (int i = 0; i < root.x.size(); ++i) root.x(i) = std::round(root.x(i));
    return root;
  }
  struct Bound {
    int var;
    double value;
    bool upper;
  };
  LPResult best;
  best.status = LPStatus::Infeasible;
  best.value = std::numeric_limits<double>::infinity();
  int nodes = 0;
  int n = static_cast<int>(lp.cols.size());
  std::function<void(const std::vector<Bound>&)> branch = [&](const std::vector<Bound>& bounds) {
    if (++nodes > max_nodes) throw MathError("branch and bound node limit reached");
    LinearProgram sub = lp;
    sub.rows = lp.rows + static_cast<int>(bounds.size());
    sub.rhs.conservativeResize(sub.rows);
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      int row = lp.rows + static_cast<int>(k);
      sub.cols[bounds[k].var].index.push_back(row);
      sub.cols[bounds[k].var].value.push_back(1.0);
      // x + s = u (upper) or x - s = l (lower)
      sub.add_column({{row}, {bounds[k].upper ? 1.0 : -1.0}}, 0.0);
      sub.rhs(row) = bounds[k].value;
    }
    LPResult r = solve_lp(sub);
    if (r.status != LPStatus::Optimal || r.value >= best.value - 1e-9) return;
    int frac = -1;
    double worst = 1e-7;
    for (int j = 0; j < n; ++j) {
      double f = std::abs(r.x(j) - std::round(r.x(j)));
      if (f > worst) worst = f, frac = j;
    }
    if (frac < 0) {
      best = r;
      best.x.conservativeResize(n);
      for (int j = 0; j < n; ++j) best.x(j) = std::round(best.x(j));
      return;
    }
    auto down = bounds, up = bounds;
    down.push_back({frac, std::floor(r.x(frac)), true});
    up.push_back({frac, std::ceil(r.x(frac)), false});
    branch(down);
    branch(up);
  };
  branch({});
  best.branch_nodes = nodes + 1;
  best.integral = best.status == LPStatus::Optimal;
  if (best.integral) {
    Summer v;
    for (int j = 0; j < n; ++j) v.add(lp.cost[j] * best.x(j));
    best.value = v.value();
  }
  best.iterations += root.iterations;
  return best;
}

}  // namespace epicone
