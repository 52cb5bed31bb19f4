#pragma once

// Outer-approximation driver: solve truncated relaxations, certify the
// incumbent with the exact DFT kernel, grow t only for violated rows.

#include <chrono>
#include <optional>
#include <vector>

#include "ccsmcp/bnb.hpp"
#include "ccsmcp/instance.hpp"
#include "ccsmcp/presolve.hpp"
#include "ccsmcp/reformulate.hpp"

namespace ccsmcp {

struct OaIteration {
  std::vector<int> t;             // truncation per original row (general rows)
  double relaxation_objective = 0.0;
  std::vector<int> violated_rows;
  double solve_seconds = 0.0;
};

enum class OaStatus { optimal, infeasible, time_limit, size_limit };

struct OaTrace {
  OaStatus status = OaStatus::infeasible;
  std::vector<OaIteration> iterations;
  std::optional<Solution> final;
  std::optional<int> infeasible_row;  // presolve certificate when present
};

struct OaOptions {
  BuildOptions build;
  BnbLimits limits;
  bool use_greedy_start = true;
  // Truncation only grows while the whole relaxation stays below this many
  // product subsets; beyond it, candidate cuts do the tightening instead so
  // the master models stay tractable for the built-in simplex.
  double growth_budget = 350.0;
};

namespace oadetail {

// Cut derived from a rejected candidate on a violated row. The candidate's
// selection W within the row support is first extended greedily (smallest
// probabilities first) to a maximal still-infeasible set M; the cover
// probability is monotone in adding columns, so every accepted selection
// must pick columns outside M. The right-hand side is lifted to the
// smallest count r whose best r-column extension of M (largest remaining
// probabilities) meets the chance constraint.
inline LinConstraint candidate_cut(const Instance& inst, int i,
                                   const std::vector<int>& x) {
  const int k = inst.demands[std::size_t(i)];
  const double target = 1.0 - inst.risks[std::size_t(i)] - 1e-9;

  std::vector<std::pair<double, int>> outside;  // (p, column) not selected
  std::vector<double> in;
  for (auto [j, p] : inst.rows[std::size_t(i)]) {
    if (p <= 0.0) continue;
    if (x[std::size_t(j)])
      in.push_back(p);
    else
      outside.emplace_back(p, j);
  }
  std::sort(outside.begin(), outside.end());
  std::vector<std::pair<double, int>> rim;  // columns kept outside M
  for (const auto& [p, j] : outside) {
    std::vector<double> probs(in);
    probs.push_back(p);
    if (tail_probability_dft(BernoulliRow(probs), k) < target)
      in.push_back(p);  // M absorbs the column and stays infeasible
    else
      rim.emplace_back(p, j);
  }

  std::sort(rim.begin(), rim.end(), std::greater<>());
  int r = int(rim.size());
  for (int cand = 1; cand <= int(rim.size()); ++cand) {
    std::vector<double> probs(in);
    for (int s = 0; s < cand; ++s) probs.push_back(rim[std::size_t(s)].first);
    if (tail_probability_dft(BernoulliRow(probs), k) >= target) {
      r = cand;
      break;
    }
  }

  LinConstraint c;
  for (const auto& [p, j] : rim) c.coeffs.emplace_back(j, 1.0);
  std::sort(c.coeffs.begin(), c.coeffs.end());
  c.sense = Sense::ge;
  c.rhs = double(std::max(r, 1));
  return c;
}

// Product-subset count of the whole relaxation at truncation state `state`.
inline double total_subsets(const Instance& inst, const PresolveResult& pres,
                            const TruncationState& state) {
  double total = 0.0;
  for (std::size_t idx = 0; idx < pres.kept_rows.size(); ++idx) {
    if (pres.kinds[idx].kind != RowKind::general) continue;
    const int i = pres.kept_rows[idx];
    const int ns = int(inst.support(i).size());
    const int t = std::min(state.t[std::size_t(i)], ns);
    const int lmax = std::min(t + inst.demands[std::size_t(i)] - 1, ns);
    total += detail::subset_count(ns, 0, lmax);
  }
  return total;
}

}  // namespace oadetail

inline OaTrace solve_oa(const Instance& inst, const PresolveResult& pres,
                        const OaOptions& opt = {}) {
  OaTrace trace;
  for (std::size_t idx = 0; idx < pres.kinds.size(); ++idx) {
    if (pres.kinds[idx].kind == RowKind::infeasible) {
      trace.status = OaStatus::infeasible;
      trace.infeasible_row = pres.kept_rows[idx];
      return trace;
    }
  }

  TruncationState state(inst.m);
  std::vector<LinConstraint> cuts;  // valid for every exact-feasible x
  std::optional<std::vector<int>> warm;
  if (opt.use_greedy_start) warm = greedy_heuristic(inst);

  const auto t_start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    const double used =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return opt.limits.time_seconds - used;
  };

  // One iteration per truncation level. Candidate cuts added while the
  // level stays fixed play the role of lazy constraints in the same master
  // solve, so re-solves after a cut do not open a new iteration.
  while (true) {
    BipModel model;
    try {
      model = build_oa_relaxation(inst, pres, state, opt.build);
    } catch (const SizeError&) {
      trace.status = OaStatus::size_limit;
      return trace;
    }
    for (const LinConstraint& c : cuts) model.add_constraint(LinConstraint(c));

    OaIteration itrec;
    itrec.t = state.t;
    bool rebuild = false;
    while (!rebuild) {
      BnbLimits lim = opt.limits;
      lim.time_seconds = remaining();
      const auto it0 = std::chrono::steady_clock::now();
      const BnbReport rep = solve_bip(model, lim, warm ? &*warm : nullptr);
      itrec.solve_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - it0).count();

      if (rep.status == BnbStatus::infeasible) {
        // the relaxation contains the true feasible region
        trace.status = OaStatus::infeasible;
        trace.iterations.push_back(std::move(itrec));
        return trace;
      }
      if (rep.status == BnbStatus::time_limit) {
        trace.status = OaStatus::time_limit;
        trace.iterations.push_back(std::move(itrec));
        return trace;
      }
      itrec.relaxation_objective = rep.objective;

      const Solution sol = verify(inst, rep.incumbent);
      itrec.violated_rows.clear();
      for (std::size_t idx = 0; idx < pres.kept_rows.size(); ++idx) {
        const int i = pres.kept_rows[idx];
        if (sol.per_item_prob[std::size_t(i)] <
            1.0 - inst.risks[std::size_t(i)] - 1e-9)
          itrec.violated_rows.push_back(i);
      }
      if (itrec.violated_rows.empty()) {
        trace.iterations.push_back(std::move(itrec));
        trace.status = OaStatus::optimal;
        trace.final = sol;
        return trace;
      }
      warm = rep.incumbent;  // re-checked by completion against the new model

      for (int i : itrec.violated_rows) {
        LinConstraint cut = oadetail::candidate_cut(inst, i, rep.incumbent);
        if (!rebuild) model.add_constraint(LinConstraint(cut));
        cuts.push_back(std::move(cut));
        // grow t only while the relaxation stays tractable; wide rows rely
        // on the candidate cuts instead
        const int cap = int(inst.support(i).size());
        const int t_next = std::min(state.t[std::size_t(i)] + 2, cap);
        if (t_next == state.t[std::size_t(i)]) continue;
        TruncationState grown = state;
        grown.t[std::size_t(i)] = t_next;
        if (oadetail::total_subsets(inst, pres, grown) <= opt.growth_budget) {
          state.t[std::size_t(i)] = t_next;
          rebuild = true;
        }
      }
      if (remaining() <= 0.0) {
        trace.status = OaStatus::time_limit;
        trace.iterations.push_back(std::move(itrec));
        return trace;
      }
    }
    trace.iterations.push_back(std::move(itrec));  // level closed by t growth
  }
}

inline OaTrace solve_oa(const Instance& inst, const OaOptions& opt = {}) {
  return solve_oa(inst, presolve(inst), opt);
}

}  // namespace ccsmcp
