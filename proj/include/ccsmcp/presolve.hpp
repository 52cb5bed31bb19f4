#pragma once

// Chance-constraint reduction: poset dominance over the row vectors
// (p_i1..p_in, -k_i, eps_i) keeps only minimal elements, then kept rows
// are classified into the compact-reformulation kinds.

#include <cmath>
#include <optional>
#include <vector>

#include "ccsmcp/instance.hpp"
#include "ccsmcp/probability.hpp"

namespace ccsmcp {

enum class RowKind { general, log_transform, equal_prob, infeasible };

struct RowClass {
  RowKind kind = RowKind::general;
  double equal_p = 0.0;          // equal_prob rows
  std::optional<int> d_bar;      // equal_prob rows; absent marks infeasible
  double max_achievable = 1.0;   // infeasible certificate
};

struct PresolveResult {
  std::vector<int> kept_rows;
  std::vector<std::pair<int, int>> dropped_rows;  // (row, dominating witness)
  std::vector<RowClass> kinds;                    // parallel to kept_rows
};

namespace detail {

// v^a <= v^b componentwise over (p_a1..p_an, -k_a, eps_a).
inline bool row_dominates(const Instance& inst, int a, int b) {
  if (-inst.demands[std::size_t(a)] > -inst.demands[std::size_t(b)]) return false;
  if (inst.risks[std::size_t(a)] > inst.risks[std::size_t(b)]) return false;
  // sparse merge over the two rows
  const SparseRow& ra = inst.rows[std::size_t(a)];
  const SparseRow& rb = inst.rows[std::size_t(b)];
  std::size_t ia = 0, ib = 0;
  while (ia < ra.size() || ib < rb.size()) {
    const int ja = ia < ra.size() ? ra[ia].first : inst.n;
    const int jb = ib < rb.size() ? rb[ib].first : inst.n;
    if (ja < jb) {
      if (ra[ia].second > 0.0) return false;  // pa > 0 = pb
      ++ia;
    } else if (jb < ja) {
      ++ib;
    } else {
      if (ra[ia].second > rb[ib].second) return false;
      ++ia;
      ++ib;
    }
  }
  return true;
}

}  // namespace detail

/// Keep exactly the minimal elements of the dominance poset; ties keep the
/// lowest index. O(m^2 n) pairwise scan.
inline PresolveResult dominance_reduce(const Instance& inst) {
  PresolveResult res;
  std::vector<bool> dropped(std::size_t(inst.m), false);
  for (int b = 0; b < inst.m; ++b) {
    for (int a = 0; a < inst.m; ++a) {
      if (a == b || !detail::row_dominates(inst, a, b)) continue;
      // identical vectors: keep the lowest index
      if (a > b && detail::row_dominates(inst, b, a)) continue;
      dropped[std::size_t(b)] = true;
      break;
    }
  }
  for (int i = 0; i < inst.m; ++i) {
    if (!dropped[std::size_t(i)]) {
      res.kept_rows.push_back(i);
      continue;
    }
    int witness = -1;  // lowest kept dominator; exists by transitivity
    for (int a = 0; a < inst.m && witness < 0; ++a)
      if (!dropped[std::size_t(a)] && a != i && detail::row_dominates(inst, a, i)) witness = a;
    res.dropped_rows.emplace_back(i, witness);
  }
  return res;
}

/// Fill in the row kinds for the kept rows: k = 1 rows take the
/// log-transform path, equal-probability rows the binomial fast path
/// (or an infeasibility certificate when no cardinality suffices).
inline PresolveResult classify_rows(const Instance& inst, PresolveResult res) {
  res.kinds.resize(res.kept_rows.size());
  for (std::size_t idx = 0; idx < res.kept_rows.size(); ++idx) {
    const int i = res.kept_rows[idx];
    const int k = inst.demands[std::size_t(i)];
    const double eps = inst.risks[std::size_t(i)];
    RowClass& rc = res.kinds[idx];
    if (k == 1) {
      rc.kind = RowKind::log_transform;
      continue;
    }
    const std::vector<int> supp = inst.support(i);
    bool equal = !supp.empty();
    double p0 = 0.0;
    for (auto [j, p] : inst.rows[std::size_t(i)]) {
      if (p <= 0.0) continue;
      if (p0 == 0.0)
        p0 = p;
      else if (std::fabs(p - p0) > 1e-12)
        equal = false;
    }
    if (equal) {
      const auto d = min_cover_count(k, p0, eps, int(supp.size()));
      if (d) {
        rc.kind = RowKind::equal_prob;
        rc.equal_p = p0;
        rc.d_bar = d;
      } else {
        rc.kind = RowKind::infeasible;
        rc.equal_p = p0;
        rc.max_achievable = binomial_tail(int(supp.size()), k, p0);
      }
      continue;
    }
    // general row: still certify achievability with the full support
    std::vector<double> probs;
    for (auto [j, p] : inst.rows[std::size_t(i)])
      if (p > 0.0) probs.push_back(p);
    const double best = tail_probability_dft(BernoulliRow(std::move(probs)), k);
    if (best < 1.0 - eps - 1e-9) {
      rc.kind = RowKind::infeasible;
      rc.max_achievable = best;
    } else {
      rc.kind = RowKind::general;
    }
  }
  return res;
}

inline PresolveResult presolve(const Instance& inst) {
  return classify_rows(inst, dominance_reduce(inst));
}

inline const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::general: return "general";
    case RowKind::log_transform: return "log_transform";
    case RowKind::equal_prob: return "equal_prob";
    case RowKind::infeasible: return "infeasible";
  }
  return "?";
}

}  // namespace ccsmcp
