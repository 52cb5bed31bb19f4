#pragma once

// Exact 0-1 solver: depth-first branch and bound over LP relaxations.
// Branching happens on structural binaries only; product auxiliaries and
// scenario indicators are recovered by completion once x is integral
// (their values are determined by x, and the objective touches only x).

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ccsmcp/bip_model.hpp"
#include "ccsmcp/instance.hpp"
#include "ccsmcp/probability.hpp"
#include "ccsmcp/simplex.hpp"

namespace ccsmcp {

enum class BnbStatus { optimal, infeasible, time_limit };

struct BnbLimits {
  double time_seconds = 600.0;
  long max_nodes = 50'000'000;
};

struct BnbReport {
  BnbStatus status = BnbStatus::infeasible;
  std::vector<int> incumbent;  // structural vars
  double objective = 0.0;
  double best_bound = 0.0;
  long nodes = 0;
  double wall_seconds = 0.0;
};

namespace bnbdetail {

/// Complete an integral structural assignment to a full variable vector:
/// product auxiliaries get their subset products, scenario indicators the
/// coverage-row completion.
inline std::vector<double> complete(const BipModel& model, const std::vector<int>& x) {
  std::vector<double> full(std::size_t(model.num_vars()), 0.0);
  for (int j = 0; j < model.num_x; ++j) full[std::size_t(j)] = double(x[std::size_t(j)]);
  for (int v = model.num_x; v < model.num_vars(); ++v) {
    if (model.var_class[std::size_t(v)] != VarClass::product) continue;
    int prod = 1;
    for (int j : model.aux_subset[std::size_t(v)]) prod &= x[std::size_t(j)];
    full[std::size_t(v)] = double(prod);
  }
  for (const auto& link : model.scenario_links) {
    double cover = 0.0;
    for (auto [j, c] : model.constraints[std::size_t(link.cover_row)].coeffs)
      if (j != link.zvar) cover += c * full[std::size_t(j)];
    full[std::size_t(link.zvar)] = (cover >= link.k - 1e-9) ? 1.0 : 0.0;
  }
  return full;
}

inline bool satisfies(const BipModel& model, const std::vector<double>& full) {
  for (const auto& c : model.constraints) {
    detail::KahanSum lhs;
    for (auto [j, v] : c.coeffs) lhs.add(v * full[std::size_t(j)]);
    const double tol = 1e-6 * std::max(1.0, std::fabs(c.rhs));
    switch (c.sense) {
      case Sense::le:
        if (lhs.sum > c.rhs + tol) return false;
        break;
      case Sense::ge:
        if (lhs.sum < c.rhs - tol) return false;
        break;
      case Sense::eq:
        if (std::fabs(lhs.sum - c.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

struct Searcher {
  const BipModel& model;
  BnbLimits limits;
  std::chrono::steady_clock::time_point t0;
  bool integral_costs = true;

  std::optional<std::vector<int>> incumbent;
  double incumbent_obj = 1e300;
  double frontier_bound = 1e300;  // min bound among truncated subtrees
  long nodes = 0;
  bool out_of_time = false;

  LpOverride bounds;

  explicit Searcher(const BipModel& m, BnbLimits lim) : model(m), limits(lim) {
    t0 = std::chrono::steady_clock::now();
    bounds.lo.assign(std::size_t(m.num_vars()), 0.0);
    bounds.up.assign(std::size_t(m.num_vars()), 1.0);
    for (double c : m.objective)
      if (std::fabs(c - std::round(c)) > 1e-12) integral_costs = false;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  bool try_candidate(const std::vector<int>& x) {
    const std::vector<double> full = complete(model, x);
    if (!satisfies(model, full)) return false;
    double obj = 0.0;
    for (int j = 0; j < model.num_x; ++j)
      obj += model.objective[std::size_t(j)] * x[std::size_t(j)];
    if (obj < incumbent_obj - 1e-9) {
      incumbent = x;
      incumbent_obj = obj;
    }
    return true;
  }

  bool pruned_by_bound(double lp_obj) const {
    if (!incumbent) return false;
    double bound = lp_obj;
    if (integral_costs) bound = std::ceil(bound - 1e-6);
    return bound >= incumbent_obj - 1e-9;
  }

  void dfs() {
    if (out_of_time) return;
    if (nodes >= limits.max_nodes || elapsed() > limits.time_seconds) {
      out_of_time = true;
      return;
    }
    ++nodes;
    const LpSolution lp = solve_lp(model, &bounds);
    if (lp.status == LpStatus::infeasible) return;
    if (lp.status != LpStatus::optimal) {
      out_of_time = true;  // iteration limit; treat as truncation
      frontier_bound = std::min(frontier_bound, -1e300);
      return;
    }
    if (pruned_by_bound(lp.objective)) return;

    // most fractional structural binary
    int branch = -1;
    double best_frac = 1e-6;
    for (int j = 0; j < model.num_x; ++j) {
      if (!model.is_binary[std::size_t(j)]) continue;
      const double f = std::fabs(lp.values[std::size_t(j)] - std::round(lp.values[std::size_t(j)]));
      if (f > best_frac) {
        best_frac = f;
        branch = j;
      }
    }

    if (branch < 0) {
      // structural part integral: attempt completion
      std::vector<int> x(std::size_t(model.num_x));
      for (int j = 0; j < model.num_x; ++j)
        x[std::size_t(j)] = int(std::lround(lp.values[std::size_t(j)]));
      if (try_candidate(x)) return;  // node objective equals c.x: solved exactly
      // completion failed: branch on any unfixed structural binary
      for (int j = 0; j < model.num_x; ++j) {
        if (model.is_binary[std::size_t(j)] &&
            bounds.up[std::size_t(j)] - bounds.lo[std::size_t(j)] > 0.5) {
          branch = j;
          break;
        }
      }
      if (branch < 0) return;  // fully fixed and incompletable: infeasible leaf
    }

    const double save_lo = bounds.lo[std::size_t(branch)];
    const double save_up = bounds.up[std::size_t(branch)];
    bounds.lo[std::size_t(branch)] = 1.0;  // 1-child first
    dfs();
    bounds.lo[std::size_t(branch)] = save_lo;
    if (!out_of_time) {
      bounds.up[std::size_t(branch)] = 0.0;
      dfs();
      bounds.up[std::size_t(branch)] = save_up;
    } else {
      frontier_bound = std::min(frontier_bound, lp.objective);
    }
  }
};

}  // namespace bnbdetail

/// Exact minimization of a BipModel. `start` optionally seeds the incumbent
/// with a structural assignment (checked by completion before use).
inline BnbReport solve_bip(const BipModel& model, const BnbLimits& limits = {},
                           const std::vector<int>* start = nullptr) {
  bnbdetail::Searcher s(model, limits);
  if (start && int(start->size()) == model.num_x) s.try_candidate(*start);
  s.dfs();

  BnbReport rep;
  rep.nodes = s.nodes;
  rep.wall_seconds = s.elapsed();
  if (s.out_of_time) {
    rep.status = BnbStatus::time_limit;
    rep.best_bound = std::min(s.frontier_bound, s.incumbent_obj);
    if (s.incumbent) {
      rep.incumbent = *s.incumbent;
      rep.objective = s.incumbent_obj;
    }
    return rep;
  }
  if (!s.incumbent) {
    rep.status = BnbStatus::infeasible;
    return rep;
  }
  rep.status = BnbStatus::optimal;
  rep.incumbent = *s.incumbent;
  rep.objective = s.incumbent_obj;
  rep.best_bound = s.incumbent_obj;
  return rep;
}

/// Enumerate all of {0,1}^n (n <= 20), verify each with the probability
/// kernels, return the cheapest feasible selection (lexicographically
/// smallest on ties); nullopt when infeasible.
inline std::optional<Solution> exhaustive_search(const Instance& inst) {
  if (inst.n > 20) throw std::domain_error("exhaustive_search: n > 20");
  // per-row tail tables over support submasks
  struct RowTable {
    std::vector<int> supp;
    std::vector<double> tail;  // indexed by support submask
  };
  std::vector<RowTable> tables(std::size_t(inst.m));
  for (int i = 0; i < inst.m; ++i) {
    RowTable& rt = tables[std::size_t(i)];
    rt.supp = inst.support(i);
    std::vector<double> probs(rt.supp.size());
    {
      std::size_t t = 0;
      for (auto [j, p] : inst.rows[std::size_t(i)])
        if (p > 0.0) probs[t++] = p;
    }
    const int s = int(rt.supp.size());
    rt.tail.resize(std::size_t(1) << s);
    for (std::uint32_t sub = 0; sub < (1u << s); ++sub) {
      std::vector<double> sel;
      for (int b = 0; b < s; ++b)
        if (sub & (1u << b)) sel.push_back(probs[std::size_t(b)]);
      rt.tail[sub] = tail_probability_dft(BernoulliRow(std::move(sel)),
                                          inst.demands[std::size_t(i)]);
    }
  }

  std::optional<std::vector<int>> best;
  double best_cost = 1e300;
  for (std::uint32_t mask = 0; mask < (1u << inst.n); ++mask) {
    if (inst.side.kind == SideConstraints::Kind::budget &&
        __builtin_popcount(mask) > inst.side.budget)
      continue;
    double cost = 0.0;
    for (int j = 0; j < inst.n; ++j)
      if (mask & (1u << j)) cost += inst.costs[std::size_t(j)];
    if (best && cost > best_cost + 1e-12) continue;
    bool ok = true;
    for (int i = 0; i < inst.m && ok; ++i) {
      const RowTable& rt = tables[std::size_t(i)];
      std::uint32_t sub = 0;
      for (std::size_t b = 0; b < rt.supp.size(); ++b)
        if (mask & (1u << rt.supp[b])) sub |= (1u << b);
      if (rt.tail[sub] < 1.0 - inst.risks[std::size_t(i)] - 1e-9) ok = false;
    }
    if (!ok) continue;
    std::vector<int> x(std::size_t(inst.n));
    for (int j = 0; j < inst.n; ++j) x[std::size_t(j)] = (mask >> j) & 1;
    if (!best || cost < best_cost - 1e-12 ||
        (cost < best_cost + 1e-12 && x < *best)) {
      best = std::move(x);
      best_cost = cost;
    }
  }
  if (!best) return std::nullopt;
  return verify(inst, *best);
}

/// Primal start: repeatedly add the column with the best cost per unit of
/// aggregate probability-deficit reduction; nullopt on stall.
inline std::optional<std::vector<int>> greedy_heuristic(const Instance& inst) {
  std::vector<int> x(std::size_t(inst.n), 0);
  int used = 0;
  const int budget = inst.side.kind == SideConstraints::Kind::budget ? inst.side.budget : inst.n;
  auto deficit = [&](const std::vector<int>& sel) {
    double total = 0.0;
    for (int i = 0; i < inst.m; ++i) {
      const double tail = tail_probability_dft(inst.selected_row(i, sel),
                                               inst.demands[std::size_t(i)]);
      total += std::max(0.0, (1.0 - inst.risks[std::size_t(i)]) - tail);
    }
    return total;
  };
  auto deficit_after = [&](int j) {
    x[std::size_t(j)] = 1;
    const double d = deficit(x);
    x[std::size_t(j)] = 0;
    return d;
  };
  double cur = deficit(x);
  while (cur > 1e-12) {
    if (used >= budget) return std::nullopt;
    int pick = -1;
    double best_score = 1e300;
    double best_deficit = cur;
    for (int j = 0; j < inst.n; ++j) {
      if (x[std::size_t(j)]) continue;
      x[std::size_t(j)] = 1;
      const double d = deficit(x);
      x[std::size_t(j)] = 0;
      const double gain = cur - d;
      if (gain <= 1e-15) continue;
      const double score = inst.costs[std::size_t(j)] / gain;
      if (score < best_score - 1e-12) {
        best_score = score;
        best_deficit = d;
        pick = j;
      }
    }
    if (pick < 0) {
      // deficit plateau (k_i >= 2 rows gain nothing from a single column):
      // add the cheapest unused column supporting a violated row
      double best_cost = 1e300;
      for (int i = 0; i < inst.m; ++i) {
        if (tail_probability_dft(inst.selected_row(i, x), inst.demands[std::size_t(i)]) >=
            1.0 - inst.risks[std::size_t(i)] - 1e-9)
          continue;
        for (int j : inst.support(i)) {
          if (x[std::size_t(j)]) continue;
          if (inst.costs[std::size_t(j)] < best_cost - 1e-12) {
            best_cost = inst.costs[std::size_t(j)];
            pick = j;
          }
        }
      }
      if (pick < 0) return std::nullopt;  // stalled: violated rows are saturated
      best_deficit = deficit_after(pick);
    }
    x[std::size_t(pick)] = 1;
    ++used;
    cur = best_deficit;
  }
  return x;
}

}  // namespace ccsmcp
