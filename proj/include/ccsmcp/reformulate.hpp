#pragma once

// Deterministic 0-1 models for CC-SMCP: the full inclusion-exclusion
// linearization, truncated outer-approximation relaxations, the compact
// special-case rows, and SAA / IS scenario models.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "ccsmcp/bip_model.hpp"
#include "ccsmcp/instance.hpp"
#include "ccsmcp/presolve.hpp"
#include "ccsmcp/probability.hpp"
#include "ccsmcp/sampling.hpp"

namespace ccsmcp {

enum class Linearization { variant1, variant2 };

struct InfeasibleRowError : std::runtime_error {
  int row;
  double max_achievable;
  InfeasibleRowError(int r, double p)
      : std::runtime_error("row " + std::to_string(r) +
                           " cannot meet its chance constraint (max achievable " +
                           std::to_string(p) + ")"),
        row(r),
        max_achievable(p) {}
};

struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-item truncation orders for the OA relaxation, indexed by original row.
struct TruncationState {
  std::vector<int> t;
  explicit TruncationState(int m = 0) : t(std::size_t(m), 1) {}
};

/// Auxiliary variable for the product over T (|T| >= 2; singletons map to
/// the column variable itself). Memoized per subset.
inline int linearize_product(BipModel& model, const std::vector<int>& subset,
                             Linearization variant) {
  if (subset.size() == 1) return subset[0];
  if (subset.size() < 2) throw std::invalid_argument("linearize_product: |T| < 2");
  auto it = model.product_memo.find(subset);
  if (it != model.product_memo.end()) return it->second;

  std::string name = "y";
  for (int j : subset) name += "_" + std::to_string(j);
  const bool binary_aux = variant == Linearization::variant1;
  const int y = model.add_var(std::move(name), 0.0, binary_aux, VarClass::product);
  model.aux_subset[std::size_t(y)] = subset;
  model.product_memo.emplace(subset, y);

  const double s = double(subset.size());
  LinConstraint lower;  // sum x_j - y <= |T| - 1
  for (int j : subset) lower.coeffs.emplace_back(j, 1.0);
  lower.coeffs.emplace_back(y, -1.0);
  lower.sense = Sense::le;
  lower.rhs = s - 1.0;
  model.add_constraint(std::move(lower));

  if (variant == Linearization::variant1) {
    LinConstraint upper;  // -sum x_j + |T| y <= 0
    for (int j : subset) upper.coeffs.emplace_back(j, -1.0);
    upper.coeffs.emplace_back(y, s);
    upper.sense = Sense::le;
    upper.rhs = 0.0;
    model.add_constraint(std::move(upper));
  } else {
    for (int j : subset) {  // y <= x_j
      LinConstraint c;
      c.coeffs.emplace_back(j, -1.0);
      c.coeffs.emplace_back(y, 1.0);
      c.sense = Sense::le;
      c.rhs = 0.0;
      model.add_constraint(std::move(c));
    }
  }
  return y;
}

namespace detail {

inline BipModel base_model(const Instance& inst) {
  BipModel model;
  for (int j = 0; j < inst.n; ++j)
    model.add_var("x" + std::to_string(j), inst.costs[std::size_t(j)], true,
                  VarClass::structural);
  model.num_x = inst.n;
  if (inst.side.kind == SideConstraints::Kind::budget) {
    LinConstraint c;
    for (int j = 0; j < inst.n; ++j) c.coeffs.emplace_back(j, 1.0);
    c.sense = Sense::le;
    c.rhs = double(inst.side.budget);
    model.add_constraint(std::move(c));
  }
  return model;
}

// log(1 - p) clipped so p = 1 stays finite while still dominating any
// admissible log(eps).
inline double log_one_minus(double p) { return std::max(std::log1p(-p), -744.0); }

inline void emit_log_transform_row(BipModel& model, const Instance& inst, int i) {
  LinConstraint c;
  for (auto [j, p] : inst.rows[std::size_t(i)])
    if (p > 0.0) c.coeffs.emplace_back(j, log_one_minus(p));
  c.sense = Sense::le;
  c.rhs = std::log(inst.risks[std::size_t(i)]);
  model.add_constraint(std::move(c));
}

inline void emit_equal_prob_row(BipModel& model, const Instance& inst, int i, int d_bar) {
  LinConstraint c;
  for (int j : inst.support(i)) c.coeffs.emplace_back(j, 1.0);
  c.sense = Sense::ge;
  c.rhs = double(d_bar);
  model.add_constraint(std::move(c));
}

// Valid cardinality cut for a general row: any feasible x selects at least
// c_min support columns, where c_min is the smallest c whose best c-subset
// (largest probabilities) meets the chance constraint. Soundness rests on
// the tail being monotone in every p_j and in adding columns.
inline int min_selection_count(const Instance& inst, int i) {
  std::vector<double> probs;
  for (auto [j, p] : inst.rows[std::size_t(i)])
    if (p > 0.0) probs.push_back(p);
  std::sort(probs.begin(), probs.end(), std::greater<double>());
  const int k = inst.demands[std::size_t(i)];
  const double target = 1.0 - inst.risks[std::size_t(i)] - 1e-9;
  for (int c = k; c <= int(probs.size()); ++c) {
    const std::vector<double> top(probs.begin(), probs.begin() + c);
    if (tail_probability_dft(BernoulliRow(top), k) >= target) return c;
  }
  return int(probs.size());  // unreachable for rows certified achievable
}

inline void emit_support_cut(BipModel& model, const Instance& inst, int i) {
  LinConstraint c;
  for (int j : inst.support(i)) c.coeffs.emplace_back(j, 1.0);
  c.sense = Sense::ge;
  c.rhs = double(min_selection_count(inst, i));
  model.add_constraint(std::move(c));
}

// Enumerate subsets of `support` with size in [lmin, lmax]; visit(subset,
// sum of log p over the subset).
template <typename Visit>
void enumerate_subsets(const std::vector<int>& support, const std::vector<double>& logp,
                       int lmin, int lmax, std::vector<int>& cur, double sumlog,
                       std::size_t from, Visit&& visit) {
  const int sz = int(cur.size());
  if (sz >= lmin && sz <= lmax) visit(cur, sumlog);
  if (sz == lmax) return;
  for (std::size_t t = from; t < support.size(); ++t) {
    cur.push_back(support[t]);
    enumerate_subsets(support, logp, lmin, lmax, cur, sumlog + logp[t], t + 1, visit);
    cur.pop_back();
  }
}

inline double subset_count(int n, int lmin, int lmax) {
  double total = 0.0;
  for (int l = lmin; l <= std::min(lmax, n); ++l) total += binom(n, l);
  return total;
}

}  // namespace detail

struct BuildOptions {
  Linearization variant = Linearization::variant2;
  double subset_budget = 2e5;
};

/// Full linearized reformulation; presolve-classified special rows emit
/// their compact forms instead of product expansions.
inline BipModel build_full(const Instance& inst, const PresolveResult& pres,
                           const BuildOptions& opt = {}) {
  BipModel model = detail::base_model(inst);
  for (std::size_t idx = 0; idx < pres.kept_rows.size(); ++idx) {
    const int i = pres.kept_rows[idx];
    const RowClass& rc = pres.kinds[idx];
    switch (rc.kind) {
      case RowKind::infeasible:
        throw InfeasibleRowError(i, rc.max_achievable);
      case RowKind::log_transform:
        detail::emit_log_transform_row(model, inst, i);
        break;
      case RowKind::equal_prob:
        detail::emit_equal_prob_row(model, inst, i, *rc.d_bar);
        break;
      case RowKind::general: {
        detail::emit_support_cut(model, inst, i);
        const int k = inst.demands[std::size_t(i)];
        const std::vector<int> supp = inst.support(i);
        const int ns = int(supp.size());
        if (detail::subset_count(ns, k, ns) > opt.subset_budget)
          throw SizeError("full reformulation for row " + std::to_string(i) +
                          " exceeds the subset budget; use the OA method");
        std::vector<double> logp;
        for (auto [j, p] : inst.rows[std::size_t(i)])
          if (p > 0.0) logp.push_back(std::log(p));

        std::map<int, detail::KahanSum> coeffs;
        std::vector<int> cur;
        detail::enumerate_subsets(
            supp, logp, k, ns, cur, 0.0, 0, [&](const std::vector<int>& T, double sumlog) {
              const int l = int(T.size());
              const double coef = detail::binom(l - 1, l - k) * std::exp(sumlog);
              const int var = linearize_product(model, T, opt.variant);
              coeffs[var].add((l - k) % 2 == 0 ? coef : -coef);
            });
        LinConstraint c;
        for (const auto& [var, acc] : coeffs) c.coeffs.emplace_back(var, double(acc.sum));
        c.sense = Sense::ge;
        c.rhs = 1.0 - inst.risks[std::size_t(i)];
        model.add_constraint(std::move(c));
        break;
      }
    }
  }
  return model;
}

/// Truncated relaxation g_{t_i}(x) <= eps_i per general row (odd t_i);
/// special rows as in build_full.
inline BipModel build_oa_relaxation(const Instance& inst, const PresolveResult& pres,
                                    const TruncationState& state, const BuildOptions& opt = {}) {
  BipModel model = detail::base_model(inst);
  for (std::size_t idx = 0; idx < pres.kept_rows.size(); ++idx) {
    const int i = pres.kept_rows[idx];
    const RowClass& rc = pres.kinds[idx];
    switch (rc.kind) {
      case RowKind::infeasible:
        throw InfeasibleRowError(i, rc.max_achievable);
      case RowKind::log_transform:
        detail::emit_log_transform_row(model, inst, i);
        break;
      case RowKind::equal_prob:
        detail::emit_equal_prob_row(model, inst, i, *rc.d_bar);
        break;
      case RowKind::general: {
        detail::emit_support_cut(model, inst, i);
        const int k = inst.demands[std::size_t(i)];
        const std::vector<int> supp = inst.support(i);
        const int ns = int(supp.size());
        const int t = std::min(state.t[std::size_t(i)], ns);
        const int lmax = std::min(t + k - 1, ns);
        if (detail::subset_count(ns, 0, lmax) > opt.subset_budget)
          throw SizeError("OA relaxation for row " + std::to_string(i) +
                          " exceeds the subset budget");
        std::vector<double> logp;
        for (auto [j, p] : inst.rows[std::size_t(i)])
          if (p > 0.0) logp.push_back(std::log(p));

        std::map<int, detail::KahanSum> coeffs;
        detail::KahanSum constant;
        std::vector<int> cur;
        detail::enumerate_subsets(
            supp, logp, 0, lmax, cur, 0.0, 0, [&](const std::vector<int>& T, double sumlog) {
              const int l = int(T.size());
              // coefficient of h-term for subset T summed over admissible d
              detail::KahanSum cf;
              for (int d = 0; d <= k - 1; ++d) {
                if (l < d || l > t + d) continue;
                const double term = detail::binom(l, d);
                cf.add((l - d) % 2 == 0 ? term : -term);
              }
              if (cf.sum == 0.0) return;
              const double coef = cf.sum * std::exp(sumlog);
              if (l == 0) {
                constant.add(coef);
              } else {
                const int var = linearize_product(model, T, opt.variant);
                coeffs[var].add(coef);
              }
            });
        LinConstraint c;
        for (const auto& [var, acc] : coeffs) c.coeffs.emplace_back(var, double(acc.sum));
        c.sense = Sense::le;
        c.rhs = inst.risks[std::size_t(i)] - double(constant.sum);
        model.add_constraint(std::move(c));
        break;
      }
    }
  }
  return model;
}

namespace detail {

inline BipModel scenario_base(const Instance& inst, const ScenarioSet& scen) {
  if (scen.N < 1) throw std::invalid_argument("scenario model: empty scenario set");
  for (int w = 0; w < scen.N; ++w) {
    if (int(scen.draws[std::size_t(w)].size()) != inst.m ||
        (inst.m > 0 && int(scen.draws[std::size_t(w)][0].size()) != inst.n))
      throw std::invalid_argument("scenario model: dimension mismatch");
  }
  BipModel model = base_model(inst);
  for (int i = 0; i < inst.m; ++i) {
    for (int w = 0; w < scen.N; ++w) {
      const int z = model.add_var("z_" + std::to_string(i) + "_" + std::to_string(w), 0.0, true,
                                  VarClass::scenario);
      LinConstraint c;  // A_i(w) x - k_i z >= 0
      for (auto [j, p] : inst.rows[std::size_t(i)])
        if (scen.draws[std::size_t(w)][std::size_t(i)][std::size_t(j)])
          c.coeffs.emplace_back(j, 1.0);
      c.coeffs.emplace_back(z, -double(inst.demands[std::size_t(i)]));
      c.sense = Sense::ge;
      c.rhs = 0.0;
      const int row = model.add_constraint(std::move(c));
      model.scenario_links.push_back({z, row, double(inst.demands[std::size_t(i)])});
    }
  }
  return model;
}

inline int zvar_of(const BipModel& model, const Instance& inst, int i, int w, int N) {
  return inst.n + i * N + w;
}

}  // namespace detail

/// Big-M-free SAA model: coverage rows plus (1/N) sum_w z_i(w) >= 1 - alpha_i.
inline BipModel build_saa(const Instance& inst, const ScenarioSet& scen,
                          const std::vector<double>& alpha) {
  if (int(alpha.size()) != inst.m) throw std::invalid_argument("build_saa: |alpha| != m");
  BipModel model = detail::scenario_base(inst, scen);
  for (int i = 0; i < inst.m; ++i) {
    LinConstraint c;
    for (int w = 0; w < scen.N; ++w)
      c.coeffs.emplace_back(detail::zvar_of(model, inst, i, w, scen.N), 1.0);
    c.sense = Sense::ge;
    const double required = (1.0 - alpha[std::size_t(i)]) * double(scen.N);
    c.rhs = required;
    model.add_constraint(std::move(c));
    // implied by the counting row: covering any scenario of row i takes at
    // least k_i selected support columns, and at least one scenario must be
    // covered whenever the right-hand side is positive
    if (required > 1e-9) {
      LinConstraint cut;
      for (int j : inst.support(i)) cut.coeffs.emplace_back(j, 1.0);
      cut.sense = Sense::ge;
      cut.rhs = double(inst.demands[std::size_t(i)]);
      model.add_constraint(std::move(cut));
    }
  }
  return model;
}

/// IS model: coverage rows plus sum_w L_i(w) (1 - z_i(w)) <= N eps_i.
/// With unit likelihoods this reduces to build_saa with alpha = eps.
inline BipModel build_is(const Instance& inst, const ScenarioSet& scen,
                         const std::vector<double>& eps) {
  if (int(eps.size()) != inst.m) throw std::invalid_argument("build_is: |eps| != m");
  if (!scen.has_likelihoods())
    throw std::invalid_argument("build_is: scenario set carries no likelihood weights");
  BipModel model = detail::scenario_base(inst, scen);
  for (int i = 0; i < inst.m; ++i) {
    LinConstraint c;  // -sum_w L z <= N eps - sum_w L
    double sum_l = 0.0;
    for (int w = 0; w < scen.N; ++w) {
      const double l = scen.likelihoods[std::size_t(w)][std::size_t(i)];
      c.coeffs.emplace_back(detail::zvar_of(model, inst, i, w, scen.N), -l);
      sum_l += l;
    }
    c.sense = Sense::le;
    c.rhs = double(scen.N) * eps[std::size_t(i)] - sum_l;
    model.add_constraint(std::move(c));
    // implied: leaving every scenario of row i uncovered is already
    // inadmissible when the likelihood mass exceeds N eps_i, and covering
    // any scenario takes at least k_i selected support columns
    if (sum_l > double(scen.N) * eps[std::size_t(i)] + 1e-9) {
      LinConstraint cut;
      for (int j : inst.support(i)) cut.coeffs.emplace_back(j, 1.0);
      cut.sense = Sense::ge;
      cut.rhs = double(inst.demands[std::size_t(i)]);
      model.add_constraint(std::move(cut));
    }
  }
  return model;
}

}  // namespace ccsmcp
