#pragma once

// Bounded-variable primal simplex over a dense tableau, two phases, with
// Bland's rule engaged after a run of degenerate pivots.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ccsmcp/bip_model.hpp"

namespace ccsmcp {

enum class LpStatus { optimal, infeasible, iteration_limit, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> values;  // structural vars only
  double objective = 0.0;
};

namespace lpdetail {

constexpr double kInf = 1e30;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kCostTol = 1e-9;

enum VStat : char { kBasic, kAtLower, kAtUpper };

struct Tableau {
  int nrows;
  int ncols;  // structural + slacks + artificials
  std::vector<double> a;  // row-major nrows x ncols, holds B^{-1} A
  std::vector<double> lo, up, cost;
  std::vector<char> stat;
  std::vector<int> basis;   // var per row
  std::vector<double> xb;   // value of basic var per row
  std::vector<double> xn;   // current value per var (kept in sync)

  double& at(int r, int c) { return a[std::size_t(r) * std::size_t(ncols) + std::size_t(c)]; }
  double at(int r, int c) const {
    return a[std::size_t(r) * std::size_t(ncols) + std::size_t(c)];
  }
};

inline LpStatus run_phase(Tableau& t, const std::vector<double>& cost, long max_iter,
                          long& iters_used) {
  const int m = t.nrows, n = t.ncols;
  int degenerate_run = 0;
  for (long iter = 0; iter < max_iter; ++iter, ++iters_used) {
    // reduced costs d_j = c_j - c_B^T T_j
    std::vector<double> cb(static_cast<std::size_t>(m));
    bool any_cb = false;
    for (int r = 0; r < m; ++r) {
      cb[std::size_t(r)] = cost[std::size_t(t.basis[std::size_t(r)])];
      if (cb[std::size_t(r)] != 0.0) any_cb = true;
    }
    const bool bland = degenerate_run > 1000;
    int enter = -1;
    double best = kCostTol;
    for (int j = 0; j < n; ++j) {
      if (t.stat[std::size_t(j)] == kBasic) continue;
      if (t.up[std::size_t(j)] - t.lo[std::size_t(j)] < 1e-15) continue;  // fixed
      double d = cost[std::size_t(j)];
      if (any_cb)
        for (int r = 0; r < m; ++r) d -= cb[std::size_t(r)] * t.at(r, j);
      const double score = (t.stat[std::size_t(j)] == kAtLower) ? -d : d;
      if (score > best) {
        best = score;
        enter = j;
        if (bland) break;  // lowest eligible index
      }
    }
    if (enter < 0) return LpStatus::optimal;

    const int dir = (t.stat[std::size_t(enter)] == kAtLower) ? +1 : -1;
    // basic var r changes at rate -dir * T[r][enter] per unit step
    double step = t.up[std::size_t(enter)] - t.lo[std::size_t(enter)];  // bound flip
    int leave_row = -1;
    char leave_to = kAtLower;
    for (int r = 0; r < m; ++r) {
      const double coef = t.at(r, enter);
      if (std::fabs(coef) < kPivotTol) continue;
      const double rate = -double(dir) * coef;
      const int bv = t.basis[std::size_t(r)];
      double limit;
      char to;
      if (rate < 0.0) {
        if (t.lo[std::size_t(bv)] <= -kInf) continue;
        limit = (t.xb[std::size_t(r)] - t.lo[std::size_t(bv)]) / (-rate);
        to = kAtLower;
      } else {
        if (t.up[std::size_t(bv)] >= kInf) continue;
        limit = (t.up[std::size_t(bv)] - t.xb[std::size_t(r)]) / rate;
        to = kAtUpper;
      }
      limit = std::max(limit, 0.0);
      if (limit < step - 1e-12 ||
          (limit < step + 1e-12 && leave_row >= 0 &&
           std::fabs(coef) > std::fabs(t.at(leave_row, enter)))) {
        step = std::min(step, limit);
        leave_row = r;
        leave_to = to;
      }
    }
    if (step >= kInf) return LpStatus::unbounded;
    degenerate_run = (step < 1e-9) ? degenerate_run + 1 : 0;

    // apply the step
    for (int r = 0; r < m; ++r) {
      const double coef = t.at(r, enter);
      if (coef == 0.0) continue;
      t.xb[std::size_t(r)] += -double(dir) * coef * step;
      t.xn[std::size_t(t.basis[std::size_t(r)])] = t.xb[std::size_t(r)];
    }
    const double enter_val = t.xn[std::size_t(enter)] + double(dir) * step;
    t.xn[std::size_t(enter)] = enter_val;

    if (leave_row < 0) {
      // bound flip, no basis change
      t.stat[std::size_t(enter)] = (dir > 0) ? kAtUpper : kAtLower;
      continue;
    }
    const int leave = t.basis[std::size_t(leave_row)];
    t.stat[std::size_t(leave)] = leave_to;
    t.xn[std::size_t(leave)] =
        (leave_to == kAtLower) ? t.lo[std::size_t(leave)] : t.up[std::size_t(leave)];
    t.basis[std::size_t(leave_row)] = enter;
    t.stat[std::size_t(enter)] = kBasic;
    t.xb[std::size_t(leave_row)] = enter_val;

    // pivot the tableau on (leave_row, enter)
    const double piv = t.at(leave_row, enter);
    double* prow = &t.a[std::size_t(leave_row) * std::size_t(n)];
    const double inv = 1.0 / piv;
    for (int c = 0; c < n; ++c) prow[c] *= inv;
    for (int r = 0; r < m; ++r) {
      if (r == leave_row) continue;
      const double f = t.at(r, enter);
      if (f == 0.0) continue;
      double* row = &t.a[std::size_t(r) * std::size_t(n)];
      for (int c = 0; c < n; ++c) row[c] -= f * prow[c];
      row[enter] = 0.0;  // exact
    }
    prow[enter] = 1.0;
  }
  return LpStatus::iteration_limit;
}

}  // namespace lpdetail

struct LpOverride {
  // per-structural-variable bound tightening (for branch and bound)
  std::vector<double> lo, up;
};

/// Solve the LP relaxation of a model (integrality dropped, vars in [0,1]
/// unless tightened by the override).
inline LpSolution solve_lp(const BipModel& model, const LpOverride* ovr = nullptr,
                           long max_iter = 1000000) {
  using namespace lpdetail;
  const int nvar = model.num_vars();
  const int nrow = int(model.constraints.size());

  Tableau t;
  t.nrows = nrow;
  // layout: [structural | one slack per row | artificials appended]
  const int slack0 = nvar;
  int ncols = nvar + nrow;
  t.lo.assign(std::size_t(ncols), 0.0);
  t.up.assign(std::size_t(ncols), 1.0);
  t.cost.assign(std::size_t(ncols), 0.0);
  for (int j = 0; j < nvar; ++j) {
    t.cost[std::size_t(j)] = model.objective[std::size_t(j)];
    if (ovr) {
      t.lo[std::size_t(j)] = ovr->lo[std::size_t(j)];
      t.up[std::size_t(j)] = ovr->up[std::size_t(j)];
    }
  }
  for (int r = 0; r < nrow; ++r) {
    const int s = slack0 + r;
    switch (model.constraints[std::size_t(r)].sense) {
      case Sense::le: t.lo[std::size_t(s)] = 0.0; t.up[std::size_t(s)] = kInf; break;
      case Sense::ge: t.lo[std::size_t(s)] = -kInf; t.up[std::size_t(s)] = 0.0; break;
      case Sense::eq: t.lo[std::size_t(s)] = 0.0; t.up[std::size_t(s)] = 0.0; break;
    }
  }

  // initial point: structural nonbasic at lower bound
  std::vector<double> x0(std::size_t(ncols), 0.0);
  for (int j = 0; j < nvar; ++j) x0[std::size_t(j)] = t.lo[std::size_t(j)];
  std::vector<double> resid(static_cast<std::size_t>(nrow));
  for (int r = 0; r < nrow; ++r) {
    double ax = 0.0;
    for (auto [j, c] : model.constraints[std::size_t(r)].coeffs)
      ax += c * x0[std::size_t(j)];
    resid[std::size_t(r)] = model.constraints[std::size_t(r)].rhs - ax;
  }

  // artificials where the slack cannot absorb the residual
  std::vector<int> art_row;
  for (int r = 0; r < nrow; ++r) {
    const int s = slack0 + r;
    const double v = resid[std::size_t(r)];
    if (v >= t.lo[std::size_t(s)] - 1e-12 && v <= t.up[std::size_t(s)] + 1e-12) continue;
    art_row.push_back(r);
  }
  const int art0 = ncols;
  ncols += int(art_row.size());
  t.ncols = ncols;
  t.lo.resize(std::size_t(ncols), 0.0);
  t.up.resize(std::size_t(ncols), kInf);
  t.cost.resize(std::size_t(ncols), 0.0);

  t.a.assign(std::size_t(nrow) * std::size_t(ncols), 0.0);
  t.stat.assign(std::size_t(ncols), kAtLower);
  t.basis.assign(std::size_t(nrow), -1);
  t.xb.assign(std::size_t(nrow), 0.0);
  t.xn = x0;
  t.xn.resize(std::size_t(ncols), 0.0);
  for (int j = 0; j < nvar; ++j)
    t.stat[std::size_t(j)] = kAtLower;

  for (int r = 0; r < nrow; ++r) {
    for (auto [j, c] : model.constraints[std::size_t(r)].coeffs) t.at(r, j) = c;
    t.at(r, slack0 + r) = 1.0;
  }
  // mark >=-row slacks nonbasic at their upper bound (0)
  for (int r = 0; r < nrow; ++r)
    if (model.constraints[std::size_t(r)].sense == Sense::ge)
      t.stat[std::size_t(slack0 + r)] = kAtUpper;

  std::vector<double> phase1_cost(std::size_t(ncols), 0.0);
  std::size_t art_idx = 0;
  for (int r = 0; r < nrow; ++r) {
    const int s = slack0 + r;
    const double v = resid[std::size_t(r)];
    const bool fits = v >= t.lo[std::size_t(s)] - 1e-12 && v <= t.up[std::size_t(s)] + 1e-12;
    if (fits) {
      t.basis[std::size_t(r)] = s;
      t.stat[std::size_t(s)] = kBasic;
      t.xb[std::size_t(r)] = v;
      t.xn[std::size_t(s)] = v;
    } else {
      const int av = art0 + int(art_idx);
      if (int(art_idx) >= int(art_row.size()) || art_row[art_idx] != r)
        throw std::logic_error("simplex: artificial bookkeeping");
      ++art_idx;
      const double sgn = (v >= 0.0) ? 1.0 : -1.0;
      t.at(r, av) = sgn;
      t.basis[std::size_t(r)] = av;
      t.stat[std::size_t(av)] = kBasic;
      phase1_cost[std::size_t(av)] = 1.0;
      if (sgn < 0.0) {
        // normalize the tableau row so the basis column is +1
        double* row = &t.a[std::size_t(r) * std::size_t(ncols)];
        for (int c = 0; c < ncols; ++c) row[c] = -row[c];
        t.at(r, av) = 1.0;
      }
      t.xb[std::size_t(r)] = std::fabs(v);
      t.xn[std::size_t(av)] = std::fabs(v);
    }
  }

  long iters = 0;
  if (!art_row.empty()) {
    const LpStatus st = run_phase(t, phase1_cost, max_iter, iters);
    if (st == LpStatus::iteration_limit) return {LpStatus::iteration_limit, {}, 0.0};
    double infeas = 0.0;
    for (int r = 0; r < nrow; ++r)
      if (t.basis[std::size_t(r)] >= art0) infeas += t.xb[std::size_t(r)];
    for (int j = art0; j < ncols; ++j)
      if (t.stat[std::size_t(j)] != kBasic) infeas += t.xn[std::size_t(j)];
    if (infeas > kFeasTol) return {LpStatus::infeasible, {}, 0.0};
    // pin artificials at zero for phase 2
    for (int j = art0; j < ncols; ++j) {
      t.lo[std::size_t(j)] = 0.0;
      t.up[std::size_t(j)] = 0.0;
    }
  }

  const LpStatus st = run_phase(t, t.cost, max_iter - iters, iters);
  if (st == LpStatus::iteration_limit) return {LpStatus::iteration_limit, {}, 0.0};
  if (st == LpStatus::unbounded) return {LpStatus::unbounded, {}, 0.0};

  LpSolution sol;
  sol.status = LpStatus::optimal;
  sol.values.assign(std::size_t(nvar), 0.0);
  for (int j = 0; j < nvar; ++j) {
    double v = t.xn[std::size_t(j)];
    v = std::min(std::max(v, t.lo[std::size_t(j)]), t.up[std::size_t(j)]);
    sol.values[std::size_t(j)] = v;
    sol.objective += model.objective[std::size_t(j)] * v;
  }
  return sol;
}

}  // namespace ccsmcp
