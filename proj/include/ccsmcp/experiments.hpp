#pragma once

// Reproduction harness for the empirical studies: method comparisons,
// bound-convergence dumps, feasibility/optimality-ratio sweeps,
// epsilon sweeps, and infeasibility probing. Emits CSV.

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ccsmcp/bnb.hpp"
#include "ccsmcp/instance.hpp"
#include "ccsmcp/oa.hpp"
#include "ccsmcp/presolve.hpp"
#include "ccsmcp/probability.hpp"
#include "ccsmcp/reformulate.hpp"
#include "ccsmcp/sampling.hpp"

namespace ccsmcp {

enum class Method { oa1, oa2, full1, full2, saa, is, sc, exact };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::oa1: return "OA-I";
    case Method::oa2: return "OA-II";
    case Method::full1: return "FULL-I";
    case Method::full2: return "FULL-II";
    case Method::saa: return "SAA";
    case Method::is: return "IS";
    case Method::sc: return "SC";
    case Method::exact: return "exact";
  }
  return "?";
}

struct MethodResult {
  Method method;
  std::string status;             // optimal / infeasible / timeout / size
  std::optional<double> value;    // model objective when a solution exists
  bool verified_feasible = false; // exact DFT re-check
  int iterations = 0;             // OA only
  double seconds = 0.0;
};

namespace expdetail {

inline double now_minus(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace expdetail

struct SolveSettings {
  int n_scenarios = 200;
  std::vector<double> alpha;  // SAA risk; defaults to instance risks
  std::uint64_t scenario_seed = 1;
  int u_estimate = 0;  // 0 -> default estimate
  BnbLimits limits;
  BuildOptions build;
};

/// Solve one instance with one method and re-verify the output exactly.
inline MethodResult run_method(const Instance& inst, Method method, SolveSettings cfg = {}) {
  MethodResult res;
  res.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  const PresolveResult pres = presolve(inst);

  auto finish_solution = [&](const std::vector<int>& x, double model_value) {
    const Solution sol = verify(inst, x);
    res.value = model_value;
    res.verified_feasible = sol.feasible;
    res.status = "optimal";
  };

  try {
    switch (method) {
      case Method::oa1:
      case Method::oa2: {
        OaOptions opt;
        opt.build = cfg.build;
        opt.build.variant =
            method == Method::oa1 ? Linearization::variant1 : Linearization::variant2;
        opt.limits = cfg.limits;
        const OaTrace trace = solve_oa(inst, pres, opt);
        res.iterations = int(trace.iterations.size());
        if (trace.status == OaStatus::optimal) {
          finish_solution(trace.final->x, trace.final->objective);
        } else if (trace.status == OaStatus::infeasible) {
          res.status = "infeasible";
        } else {
          res.status = trace.status == OaStatus::time_limit ? "timeout" : "size";
        }
        break;
      }
      case Method::full1:
      case Method::full2: {
        BuildOptions b = cfg.build;
        b.variant = method == Method::full1 ? Linearization::variant1 : Linearization::variant2;
        const BipModel model = build_full(inst, pres, b);
        const auto warm = greedy_heuristic(inst);
        const BnbReport rep = solve_bip(model, cfg.limits, warm ? &*warm : nullptr);
        if (rep.status == BnbStatus::optimal)
          finish_solution(rep.incumbent, rep.objective);
        else
          res.status = rep.status == BnbStatus::infeasible ? "infeasible" : "timeout";
        break;
      }
      case Method::saa:
      case Method::is: {
        std::vector<double> alpha = cfg.alpha.empty() ? inst.risks : cfg.alpha;
        BipModel model;
        if (method == Method::saa) {
          const ScenarioSet scen = sample_scenarios(inst, cfg.n_scenarios, cfg.scenario_seed);
          model = build_saa(inst, scen, alpha);
        } else {
          const auto p_hat = tilt_instance(inst, cfg.u_estimate);
          const ScenarioSet scen =
              sample_scenarios(inst, p_hat, cfg.n_scenarios, cfg.scenario_seed);
          model = build_is(inst, scen, inst.risks);
        }
        const BnbReport rep = solve_bip(model, cfg.limits);
        if (rep.status == BnbStatus::optimal) {
          std::vector<int> x(rep.incumbent.begin(), rep.incumbent.begin() + inst.n);
          finish_solution(x, rep.objective);
        } else {
          res.status = rep.status == BnbStatus::infeasible ? "infeasible" : "timeout";
        }
        break;
      }
      case Method::sc: {
        // special-case path: every kept row must be equal_prob (or k = 1
        // degenerate); integrated covering model over supports
        BipModel model = detail::base_model(inst);
        bool all_special = true;
        for (std::size_t idx = 0; idx < pres.kept_rows.size(); ++idx) {
          const RowClass& rc = pres.kinds[idx];
          if (rc.kind == RowKind::equal_prob)
            detail::emit_equal_prob_row(model, inst, pres.kept_rows[idx], *rc.d_bar);
          else if (rc.kind == RowKind::infeasible)
            throw InfeasibleRowError(pres.kept_rows[idx], rc.max_achievable);
          else
            all_special = false;
        }
        if (!all_special) throw std::invalid_argument("SC requires equal-probability rows only");
        const auto warm = greedy_heuristic(inst);
        const BnbReport rep = solve_bip(model, cfg.limits, warm ? &*warm : nullptr);
        if (rep.status == BnbStatus::optimal)
          finish_solution(rep.incumbent, rep.objective);
        else
          res.status = rep.status == BnbStatus::infeasible ? "infeasible" : "timeout";
        break;
      }
      case Method::exact: {
        const auto sol = exhaustive_search(inst);
        if (sol) {
          res.value = sol->objective;
          res.verified_feasible = sol->feasible;
          res.status = "optimal";
        } else {
          res.status = "infeasible";
        }
        break;
      }
    }
  } catch (const InfeasibleRowError&) {
    res.status = "infeasible";
  } catch (const SizeError&) {
    res.status = "size";
  }
  res.seconds = expdetail::now_minus(t0);
  return res;
}

// ---- comparison study ---------------------------------------------------

struct ComparisonRow {
  int n, m;
  double eps;
  std::uint64_t seed;
  MethodResult result;
  std::optional<double> gap_percent;  // vs certified optimum, SAA/IS only
};

struct ComparisonSpec {
  std::vector<std::tuple<int, int, double>> grid;  // (n, m, eps)
  std::vector<Method> methods = {Method::oa1, Method::oa2, Method::saa, Method::is};
  std::uint64_t seed = 1;
  int n_scenarios = 200;
  double time_limit = 600.0;
};

inline std::vector<ComparisonRow> run_comparison(const ComparisonSpec& spec) {
  std::vector<ComparisonRow> rows;
  for (auto [n, m, eps] : spec.grid) {
    const Instance inst = generate_sparse(n, m, eps, spec.seed, GenProfile::feasible);
    // certified optimum via OA-II (the fastest exact method)
    SolveSettings cfg;
    cfg.n_scenarios = spec.n_scenarios;
    cfg.scenario_seed = spec.seed ^ 0x5eedull;
    cfg.limits.time_seconds = spec.time_limit;
    std::optional<double> opt_value;
    {
      const MethodResult oa = run_method(inst, Method::oa2, cfg);
      if (oa.status == "optimal") opt_value = oa.value;
    }
    for (Method method : spec.methods) {
      ComparisonRow row{n, m, eps, spec.seed, run_method(inst, method, cfg), std::nullopt};
      const bool sampling = method == Method::saa || method == Method::is;
      if (sampling && opt_value && row.result.value)
        row.gap_percent = 100.0 * (*row.result.value - *opt_value) / *opt_value;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "n,m,eps,seed,method,status,time,iterations,value,verified_feasible,gap_percent\n";
  for (const auto& r : rows) {
    out << r.n << "," << r.m << "," << r.eps << "," << r.seed << ","
        << method_name(r.result.method) << "," << r.result.status << "," << r.result.seconds
        << "," << r.result.iterations << ",";
    if (r.result.value)
      out << *r.result.value;
    else
      out << "INF";
    out << "," << (r.result.verified_feasible ? 1 : 0) << ",";
    if (r.gap_percent)
      out << *r.gap_percent;
    else
      out << "";
    out << "\n";
  }
  return out.str();
}

// ---- ratio sweep --------------------------------------------------------

struct RatioResult {
  Method method;
  int N;
  double feasibility_ratio = 0.0;
  double optimality_ratio = 0.0;
  double mean_seconds = 0.0;
  double ci_half_width = 0.0;  // 95% on solve time
};

struct RatioSpec {
  int n = 30, m = 5;
  double eps = 0.1;
  std::uint64_t seed = 1;
  std::vector<int> sample_sizes = {30, 50, 100, 150, 200};
  int replications = 50;
  double time_limit = 60.0;
};

inline std::vector<RatioResult> run_ratio_sweep(const RatioSpec& spec) {
  const Instance inst = generate_sparse(spec.n, spec.m, spec.eps, spec.seed, GenProfile::feasible);
  const OaTrace oa = solve_oa(inst);
  if (oa.status != OaStatus::optimal)
    throw std::runtime_error("ratio sweep: baseline OA solve failed");
  const double opt = oa.final->objective;

  std::vector<RatioResult> out;
  for (Method method : {Method::saa, Method::is}) {
    for (int N : spec.sample_sizes) {
      RatioResult rr;
      rr.method = method;
      rr.N = N;
      std::vector<double> times;
      int feas = 0, optimal = 0;
      for (int rep = 0; rep < spec.replications; ++rep) {
        SolveSettings cfg;
        cfg.n_scenarios = N;
        cfg.scenario_seed = detail::splitmix64(spec.seed ^ (std::uint64_t(N) << 24) ^
                                               std::uint64_t(rep) ^
                                               (method == Method::is ? 0x15u : 0u));
        cfg.limits.time_seconds = spec.time_limit;
        const MethodResult res = run_method(inst, method, cfg);
        times.push_back(res.seconds);
        if (res.status == "optimal" && res.verified_feasible) {
          ++feas;
          if (res.value && std::fabs(*res.value - opt) < 1e-6) ++optimal;
        }
      }
      const double R = double(spec.replications);
      rr.feasibility_ratio = feas / R;
      rr.optimality_ratio = optimal / R;
      double mean = 0.0;
      for (double t : times) mean += t;
      mean /= R;
      double var = 0.0;
      for (double t : times) var += (t - mean) * (t - mean);
      var = R > 1 ? var / (R - 1.0) : 0.0;
      rr.mean_seconds = mean;
      rr.ci_half_width = 1.96 * std::sqrt(var / R);
      out.push_back(rr);
    }
  }
  return out;
}

inline std::string ratio_csv(const std::vector<RatioResult>& rows) {
  std::ostringstream out;
  out << "method,N,feasibility_ratio,optimality_ratio,mean_time,ci_half_width\n";
  for (const auto& r : rows)
    out << method_name(r.method) << "," << r.N << "," << r.feasibility_ratio << ","
        << r.optimality_ratio << "," << r.mean_seconds << "," << r.ci_half_width << "\n";
  return out.str();
}

// ---- convergence dump ---------------------------------------------------

struct ConvergenceRow {
  int t;
  double g_t;
  double exact;
};

inline std::vector<ConvergenceRow> run_convergence(const std::vector<double>& probs, int k) {
  const BernoulliRow row{probs};
  const BoundSeries series = bound_series(row, k);
  std::vector<ConvergenceRow> out;
  for (std::size_t t = 0; t < series.values.size(); ++t)
    out.push_back({int(t), series.values[t], series.exact});
  return out;
}

inline int first_converged_t(const std::vector<ConvergenceRow>& rows, double tol = 1e-4) {
  for (const auto& r : rows)
    if (std::fabs(r.g_t - r.exact) <= tol) return r.t;
  return -1;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "t,g_t,exact\n";
  for (const auto& r : rows) out << r.t << "," << r.g_t << "," << r.exact << "\n";
  return out.str();
}

// ---- infeasibility probing ----------------------------------------------

struct InfeasibilitySpec {
  int n = 30, m = 10;
  double eps = 0.05;
  std::uint64_t seed = 1;
  int n_scenarios = 200;
  double time_limit = 120.0;
};

/// Generate low-probability instances (regenerating until one is truly
/// infeasible), then time each method's detection.
inline std::vector<MethodResult> run_infeasibility(const InfeasibilitySpec& spec) {
  std::uint64_t seed = spec.seed;
  Instance inst;
  for (int attempt = 0;; ++attempt) {
    inst = generate_sparse(spec.n, spec.m, spec.eps, seed, GenProfile::infeasible);
    const PresolveResult pres = presolve(inst);
    bool infeasible = false;
    for (const auto& rc : pres.kinds)
      if (rc.kind == RowKind::infeasible) infeasible = true;
    if (infeasible) break;
    if (attempt > 200) throw std::runtime_error("could not generate an infeasible instance");
    seed = detail::splitmix64(seed);
  }
  std::vector<MethodResult> out;
  SolveSettings cfg;
  cfg.n_scenarios = spec.n_scenarios;
  cfg.scenario_seed = seed ^ 0x5eedull;
  cfg.limits.time_seconds = spec.time_limit;
  for (Method method : {Method::oa1, Method::oa2, Method::saa, Method::is})
    out.push_back(run_method(inst, method, cfg));
  return out;
}

inline std::string infeasibility_csv(const std::vector<MethodResult>& rows) {
  std::ostringstream out;
  out << "method,status,time,iterations\n";
  for (const auto& r : rows)
    out << method_name(r.method) << "," << r.status << "," << r.seconds << "," << r.iterations
        << "\n";
  return out.str();
}

// ---- epsilon sweep ------------------------------------------------------

struct EpsilonSweepSpec {
  int n = 20, m = 4;
  std::vector<double> eps_grid = {0.05, 0.1, 0.3, 0.5, 0.7, 0.9};
  int replications = 5;
  std::uint64_t seed = 1;
  int n_scenarios = 50;
  double time_limit = 30.0;
};

struct EpsilonSweepRow {
  Method method;
  double eps;
  double mean_seconds;
};

inline std::vector<EpsilonSweepRow> run_epsilon_sweep(const EpsilonSweepSpec& spec) {
  std::vector<EpsilonSweepRow> out;
  for (Method method : {Method::oa1, Method::oa2, Method::saa, Method::is}) {
    for (double eps : spec.eps_grid) {
      double total = 0.0;
      for (int rep = 0; rep < spec.replications; ++rep) {
        // regenerate presolve-infeasible draws (the sweep studies solve
        // time versus eps on solvable instances); deterministic per
        // (eps, rep), so every method sees the same instance
        std::uint64_t seed = detail::splitmix64(spec.seed ^ std::uint64_t(rep + 1));
        Instance inst;
        for (int attempt = 0; attempt < 100; ++attempt) {
          inst = generate_sparse(spec.n, spec.m, eps, seed, GenProfile::feasible);
          bool bad = false;
          for (const auto& rc : presolve(inst).kinds) bad |= rc.kind == RowKind::infeasible;
          if (!bad) break;
          seed = detail::splitmix64(seed);
        }
        SolveSettings cfg;
        cfg.n_scenarios = spec.n_scenarios;
        cfg.scenario_seed = seed ^ 0x5eedull;
        cfg.limits.time_seconds = spec.time_limit;
        total += run_method(inst, method, cfg).seconds;
      }
      out.push_back({method, eps, total / double(spec.replications)});
    }
  }
  return out;
}

inline std::string epsilon_sweep_csv(const std::vector<EpsilonSweepRow>& rows) {
  std::ostringstream out;
  out << "method,eps,mean_time\n";
  for (const auto& r : rows)
    out << method_name(r.method) << "," << r.eps << "," << r.mean_seconds << "\n";
  return out.str();
}

}  // namespace ccsmcp
