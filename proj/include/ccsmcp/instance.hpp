#pragma once

// Problem data for the chance-constrained set multicover problem, solution
// verification, random instance generators, and JSON (de)serialization.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ccsmcp/probability.hpp"
#include "ccsmcp/rng.hpp"

namespace ccsmcp {

struct SideConstraints {
  enum class Kind { free, budget };
  Kind kind = Kind::free;
  int budget = 0;  // valid when kind == budget
};

/// One item's sparse probability row: (column, p) pairs with p > 0,
/// sorted by column.
using SparseRow = std::vector<std::pair<int, double>>;

struct Instance {
  int n = 0;  // columns (sets)
  int m = 0;  // rows (items)
  std::vector<double> costs;        // length n
  std::vector<SparseRow> rows;      // length m
  std::vector<int> demands;         // k_i >= 1
  std::vector<double> risks;        // eps_i in (0,1)
  SideConstraints side;

  void validate() const {
    if (int(costs.size()) != n) throw std::invalid_argument("instance: |costs| != n");
    if (int(rows.size()) != m) throw std::invalid_argument("instance: |rows| != m");
    if (int(demands.size()) != m) throw std::invalid_argument("instance: |demands| != m");
    if (int(risks.size()) != m) throw std::invalid_argument("instance: |risks| != m");
    for (const auto& row : rows)
      for (auto [j, p] : row) {
        if (j < 0 || j >= n) throw std::invalid_argument("instance: column index out of range");
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("instance: p outside [0,1]");
      }
    for (int k : demands)
      if (k < 1) throw std::invalid_argument("instance: demand k < 1");
    for (double e : risks)
      if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("instance: risk outside (0,1)");
    if (side.kind == SideConstraints::Kind::budget && (side.budget < 0 || side.budget > n))
      throw std::invalid_argument("instance: budget outside [0, n]");
  }

  /// Support J_i = columns with p_ij > 0.
  std::vector<int> support(int i) const {
    std::vector<int> out;
    for (auto [j, p] : rows[std::size_t(i)])
      if (p > 0.0) out.push_back(j);
    return out;
  }

  /// Probabilities of the selected support columns of row i, masked by x.
  BernoulliRow selected_row(int i, const std::vector<int>& x) const {
    std::vector<double> probs;
    for (auto [j, p] : rows[std::size_t(i)])
      if (p > 0.0 && x[std::size_t(j)] != 0) probs.push_back(p);
    return BernoulliRow(std::move(probs));
  }

  bool side_ok(const std::vector<int>& x) const {
    if (side.kind != SideConstraints::Kind::budget) return true;
    int used = 0;
    for (int v : x) used += v;
    return used <= side.budget;
  }
};

struct Solution {
  std::vector<int> x;
  double objective = 0.0;
  std::vector<double> per_item_prob;
  bool feasible = false;
};

/// Exact feasibility check with the DFT kernel per item.
inline Solution verify(const Instance& inst, const std::vector<int>& x) {
  if (int(x.size()) != inst.n) throw std::invalid_argument("verify: |x| != n");
  Solution sol;
  sol.x = x;
  for (int j = 0; j < inst.n; ++j) sol.objective += inst.costs[std::size_t(j)] * x[std::size_t(j)];
  sol.per_item_prob.resize(std::size_t(inst.m));
  sol.feasible = inst.side_ok(x);
  for (int i = 0; i < inst.m; ++i) {
    const double prob = tail_probability_dft(inst.selected_row(i, x), inst.demands[std::size_t(i)]);
    sol.per_item_prob[std::size_t(i)] = prob;
    if (prob < 1.0 - inst.risks[std::size_t(i)] - 1e-9) sol.feasible = false;
  }
  return sol;
}

enum class GenProfile { feasible, infeasible, special_case };

inline GenProfile parse_profile(const std::string& name) {
  if (name == "feasible") return GenProfile::feasible;
  if (name == "infeasible") return GenProfile::infeasible;
  if (name == "special") return GenProfile::special_case;
  throw std::invalid_argument("unknown generation profile: " + name);
}

/// Sparse random instance: each row gets n' <= 12 support columns with
/// probabilities uniform in the profile's range; unit costs.
inline Instance generate_sparse(int n, int m, double eps, std::uint64_t seed, GenProfile profile) {
  if (n < 12) throw std::invalid_argument("generate_sparse: need n >= 12 for the sparse profile");
  Instance inst;
  inst.n = n;
  inst.m = m;
  inst.costs.assign(std::size_t(n), 1.0);
  inst.risks.assign(std::size_t(m), eps);
  inst.demands.resize(std::size_t(m));
  inst.rows.resize(std::size_t(m));

  const double lo = (profile == GenProfile::infeasible) ? 0.2 : 0.9;
  const double hi = (profile == GenProfile::infeasible) ? 0.6 : 1.0;
  for (int i = 0; i < m; ++i) {
    RngStream rng = RngStream::derive(seed, std::uint64_t(i));
    const int k = (profile == GenProfile::special_case) ? rng.uniform_int(2, 3)
                                                        : rng.uniform_int(1, 3);
    inst.demands[std::size_t(i)] = k;
    const int support = rng.uniform_int(k, 12);
    // sample `support` distinct columns
    std::vector<int> cols;
    std::map<int, bool> used;
    while (int(cols.size()) < support) {
      const int j = rng.uniform_int(0, n - 1);
      if (!used[j]) {
        used[j] = true;
        cols.push_back(j);
      }
    }
    std::sort(cols.begin(), cols.end());
    SparseRow row;
    const double equal_p = rng.uniform(lo, hi);  // special-case rows share one p
    for (int j : cols) {
      const double p = (profile == GenProfile::special_case) ? equal_p : rng.uniform(lo, hi);
      row.emplace_back(j, p);
    }
    inst.rows[std::size_t(i)] = std::move(row);
  }
  inst.validate();
  return inst;
}

// ---- JSON serialization -------------------------------------------------
// Schema: {n, m, costs[], rows[[[col,p],...]], demands[], risks[],
//          side{kind, U?}}. Doubles round-trip exactly.

inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["costs"] = inst.costs;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : inst.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (auto [col, p] : row) r.push_back({col, p});
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["demands"] = inst.demands;
  j["risks"] = inst.risks;
  if (inst.side.kind == SideConstraints::Kind::budget)
    j["side"] = {{"kind", "budget"}, {"U", inst.side.budget}};
  else
    j["side"] = {{"kind", "free"}};
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  for (const char* field : {"n", "m", "costs", "rows", "demands", "risks"})
    if (!j.contains(field))
      throw std::runtime_error(std::string("instance parse error: missing field \"") + field + "\"");
  inst.n = j.at("n").get<int>();
  inst.m = j.at("m").get<int>();
  inst.costs = j.at("costs").get<std::vector<double>>();
  for (const auto& r : j.at("rows")) {
    SparseRow row;
    for (const auto& e : r) row.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    inst.rows.push_back(std::move(row));
  }
  inst.demands = j.at("demands").get<std::vector<int>>();
  inst.risks = j.at("risks").get<std::vector<double>>();
  if (j.contains("side")) {
    const std::string kind = j.at("side").at("kind").get<std::string>();
    if (kind == "budget") {
      inst.side.kind = SideConstraints::Kind::budget;
      inst.side.budget = j.at("side").at("U").get<int>();
    } else if (kind != "free") {
      throw std::runtime_error("instance parse error: unknown side kind \"" + kind + "\"");
    }
  }
  inst.validate();
  return inst;
}

inline void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_json(inst).dump(2) << "\n";
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("instance parse error in " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline nlohmann::json to_json(const Solution& sol) {
  return {{"x", sol.x},
          {"objective", sol.objective},
          {"per_item_prob", sol.per_item_prob},
          {"feasible", sol.feasible}};
}

}  // namespace ccsmcp
