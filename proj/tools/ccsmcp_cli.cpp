// Command-line front end: generate / presolve / solve / verify /
// export-lp / experiment. Exit codes: 0 success, 1 infeasible,
// 2 timeout, 64 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccsmcp/bnb.hpp"
#include "ccsmcp/experiments.hpp"
#include "ccsmcp/instance.hpp"
#include "ccsmcp/lp_writer.hpp"
#include "ccsmcp/oa.hpp"
#include "ccsmcp/presolve.hpp"
#include "ccsmcp/reformulate.hpp"
#include "ccsmcp/sampling.hpp"

namespace {

using namespace ccsmcp;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUsage = 64;

struct CommonOpts {
  std::string instance_path;
  std::string out_path;
  bool json = false;
};

void emit(const CommonOpts& c, const nlohmann::json& payload, const std::string& text) {
  std::string body = c.json ? payload.dump(2) + "\n" : text;
  if (c.out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(c.out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + c.out_path);
    out << body;
  }
}

Method parse_method(const std::string& name) {
  if (name == "oa1") return Method::oa1;
  if (name == "oa2") return Method::oa2;
  if (name == "full1") return Method::full1;
  if (name == "full2") return Method::full2;
  if (name == "saa") return Method::saa;
  if (name == "is") return Method::is;
  if (name == "sc") return Method::sc;
  if (name == "exact") return Method::exact;
  throw CLI::ValidationError("--method", "unknown method: " + name);
}

Instance load(const CommonOpts& c, double eps_override) {
  Instance inst = read_instance(c.instance_path);
  if (eps_override > 0.0) {
    inst.risks.assign(std::size_t(inst.m), eps_override);
    inst.validate();
  }
  return inst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained set multicover toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string method_name_ = "oa2";
  std::string profile_name = "feasible";
  std::string exp_name = "comparison";
  std::string lp_model = "full";
  int n = 20, m = 5, n_scenarios = 100, u_estimate = 0;
  double eps = 0.1, eps_override = 0.0, alpha = 0.0, time_limit = 600.0;
  double subset_budget = 2e5;
  std::uint64_t seed = 1;

  auto add_io = [&](CLI::App* cmd, bool needs_instance) {
    if (needs_instance)
      cmd->add_option("instance", common.instance_path, "instance JSON path")->required();
    cmd->add_option("--out", common.out_path, "write output to file instead of stdout");
    cmd->add_flag("--json", common.json, "machine-readable JSON output");
  };

  auto* gen = app.add_subcommand("generate", "generate a random instance");
  gen->add_option("--n", n, "columns")->required();
  gen->add_option("--m", m, "rows")->required();
  gen->add_option("--epsilon", eps, "uniform risk level");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--profile", profile_name, "feasible | infeasible | special");
  add_io(gen, false);

  auto* pre = app.add_subcommand("presolve", "dominance reduction and row classification");
  add_io(pre, true);

  auto* sol = app.add_subcommand("solve", "solve an instance");
  sol->add_option("--method", method_name_, "oa1|oa2|full1|full2|saa|is|sc|exact");
  sol->add_option("--n-scenarios", n_scenarios, "scenario count for saa/is");
  sol->add_option("--alpha", alpha, "SAA risk level (defaults to instance risks)");
  sol->add_option("--epsilon-override", eps_override, "replace all instance risks");
  sol->add_option("--seed", seed, "scenario seed");
  sol->add_option("--time-limit", time_limit, "wall-clock limit in seconds");
  sol->add_option("--subset-budget", subset_budget, "max enumerated subsets per build");
  sol->add_option("--u-estimate", u_estimate, "importance-sampling selection-count estimate");
  add_io(sol, true);

  auto* ver = app.add_subcommand("verify", "check a solution vector exactly");
  std::string solution_path;
  ver->add_option("--solution", solution_path, "JSON file with {\"x\": [...]}")->required();
  add_io(ver, true);

  auto* exp_lp = app.add_subcommand("export-lp", "write the model in LP format");
  exp_lp->add_option("--model", lp_model, "full | oa | saa | is");
  exp_lp->add_option("--method", method_name_, "linearization for full/oa: oa1|oa2|full1|full2");
  exp_lp->add_option("--n-scenarios", n_scenarios, "scenario count for saa/is");
  exp_lp->add_option("--alpha", alpha, "SAA risk level");
  exp_lp->add_option("--seed", seed, "scenario seed");
  exp_lp->add_option("--subset-budget", subset_budget, "max enumerated subsets per build");
  add_io(exp_lp, true);

  auto* exp = app.add_subcommand("experiment", "run a study and emit CSV");
  exp->add_option("name", exp_name, "comparison | ratio | convergence | infeasibility | epsilon")
      ->required();
  auto* exp_n = exp->add_option("--n", n, "columns");
  auto* exp_m = exp->add_option("--m", m, "rows");
  auto* exp_eps = exp->add_option("--epsilon", eps, "risk level");
  auto* exp_seed = exp->add_option("--seed", seed, "base seed");
  auto* exp_ns = exp->add_option("--n-scenarios", n_scenarios, "scenario count");
  auto* exp_tl = exp->add_option("--time-limit", time_limit, "per-solve wall limit");
  exp->add_option("--out", common.out_path, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (n < 12) {
        std::cerr << "generate: need --n >= 12 for the sparse profile\n";
        return kExitUsage;
      }
      const Instance inst = generate_sparse(n, m, eps, seed, parse_profile(profile_name));
      if (common.out_path.empty())
        std::cout << to_json(inst).dump(2) << "\n";
      else
        write_instance(inst, common.out_path);
      return kExitOk;
    }

    if (pre->parsed()) {
      const Instance inst = load(common, 0.0);
      const PresolveResult res = presolve(inst);
      nlohmann::json j;
      j["kept_rows"] = res.kept_rows;
      nlohmann::json dropped = nlohmann::json::array();
      for (auto [row, witness] : res.dropped_rows)
        dropped.push_back({{"row", row}, {"dominated_by", witness}});
      j["dropped_rows"] = std::move(dropped);
      nlohmann::json kinds = nlohmann::json::array();
      bool any_infeasible = false;
      for (std::size_t idx = 0; idx < res.kept_rows.size(); ++idx) {
        const RowClass& rc = res.kinds[idx];
        nlohmann::json k{{"row", res.kept_rows[idx]}, {"kind", row_kind_name(rc.kind)}};
        if (rc.d_bar) k["d_bar"] = *rc.d_bar;
        if (rc.kind == RowKind::infeasible) {
          k["max_achievable"] = rc.max_achievable;
          any_infeasible = true;
        }
        kinds.push_back(std::move(k));
      }
      j["kinds"] = std::move(kinds);
      std::ostringstream text;
      text << "kept " << res.kept_rows.size() << " of " << inst.m << " rows\n";
      for (auto [row, witness] : res.dropped_rows)
        text << "  row " << row << " dominated by row " << witness << "\n";
      for (std::size_t idx = 0; idx < res.kept_rows.size(); ++idx)
        text << "  row " << res.kept_rows[idx] << ": " << row_kind_name(res.kinds[idx].kind)
             << "\n";
      emit(common, j, text.str());
      return any_infeasible ? kExitInfeasible : kExitOk;
    }

    if (sol->parsed()) {
      const Instance inst = load(common, eps_override);
      SolveSettings cfg;
      cfg.n_scenarios = n_scenarios;
      cfg.scenario_seed = seed;
      cfg.u_estimate = u_estimate;
      cfg.limits.time_seconds = time_limit;
      cfg.build.subset_budget = subset_budget;
      if (alpha > 0.0) cfg.alpha.assign(std::size_t(inst.m), alpha);
      const MethodResult res = run_method(inst, parse_method(method_name_), cfg);

      nlohmann::json j;
      j["method"] = method_name(res.method);
      j["status"] = res.status;
      j["seconds"] = res.seconds;
      if (res.iterations > 0) j["iterations"] = res.iterations;
      std::ostringstream text;
      text << "status: " << res.status << "\n";
      if (res.value) {
        j["objective"] = *res.value;
        j["verified_feasible"] = res.verified_feasible;
        text << "objective: " << *res.value << "\n"
             << "verified_feasible: " << (res.verified_feasible ? "yes" : "no") << "\n";
      }
      text << "seconds: " << res.seconds << "\n";
      emit(common, j, text.str());
      if (res.status == "infeasible") return kExitInfeasible;
      if (res.status == "timeout") return kExitTimeout;
      return kExitOk;
    }

    if (ver->parsed()) {
      const Instance inst = load(common, 0.0);
      std::ifstream in(solution_path);
      if (!in) throw std::runtime_error("cannot open: " + solution_path);
      nlohmann::json sj;
      in >> sj;
      const auto x = sj.at("x").get<std::vector<int>>();
      const Solution s = verify(inst, x);
      std::ostringstream text;
      text << "objective: " << s.objective << "\nfeasible: " << (s.feasible ? "yes" : "no")
           << "\n";
      for (int i = 0; i < inst.m; ++i)
        text << "  item " << i << ": P = " << s.per_item_prob[std::size_t(i)]
             << " (need >= " << 1.0 - inst.risks[std::size_t(i)] << ")\n";
      emit(common, to_json(s), text.str());
      return s.feasible ? kExitOk : kExitInfeasible;
    }

    if (exp_lp->parsed()) {
      const Instance inst = load(common, 0.0);
      const PresolveResult pres = presolve(inst);
      BuildOptions b;
      b.subset_budget = subset_budget;
      b.variant = (method_name_ == "oa1" || method_name_ == "full1") ? Linearization::variant1
                                                                     : Linearization::variant2;
      BipModel model;
      if (lp_model == "full") {
        model = build_full(inst, pres, b);
      } else if (lp_model == "oa") {
        TruncationState state(inst.m);
        model = build_oa_relaxation(inst, pres, state, b);
      } else if (lp_model == "saa") {
        std::vector<double> a =
            alpha > 0.0 ? std::vector<double>(std::size_t(inst.m), alpha) : inst.risks;
        model = build_saa(inst, sample_scenarios(inst, n_scenarios, seed), a);
      } else if (lp_model == "is") {
        const auto p_hat = tilt_instance(inst);
        model = build_is(inst, sample_scenarios(inst, p_hat, n_scenarios, seed), inst.risks);
      } else {
        std::cerr << "export-lp: unknown --model " << lp_model << "\n";
        return kExitUsage;
      }
      const std::string text = export_lp_string(model);
      if (common.out_path.empty())
        std::cout << text;
      else
        export_lp(model, common.out_path);
      return kExitOk;
    }

    if (exp->parsed()) {
      std::string csv;
      // experiment structs carry desk-scale defaults; CLI values override
      // them only when the flag was given explicitly
      if (exp_name == "comparison") {
        ComparisonSpec spec;
        spec.grid = {{n, m, eps}};
        if (exp_seed->count()) spec.seed = seed;
        if (exp_ns->count()) spec.n_scenarios = n_scenarios;
        if (exp_tl->count()) spec.time_limit = time_limit;
        csv = comparison_csv(run_comparison(spec));
      } else if (exp_name == "ratio") {
        RatioSpec spec;
        if (exp_n->count()) spec.n = n;
        if (exp_m->count()) spec.m = m;
        if (exp_eps->count()) spec.eps = eps;
        if (exp_seed->count()) spec.seed = seed;
        if (exp_tl->count()) spec.time_limit = time_limit;
        csv = ratio_csv(run_ratio_sweep(spec));
      } else if (exp_name == "convergence") {
        // representative bound-ladder traces at a few probability levels
        std::ostringstream out;
        for (double p : {0.3, 0.6, 0.9}) {
          std::vector<double> probs(12, p);
          out << "# p = " << p << ", k = 2\n" << convergence_csv(run_convergence(probs, 2));
        }
        csv = out.str();
      } else if (exp_name == "infeasibility") {
        InfeasibilitySpec spec;
        if (exp_n->count()) spec.n = n;
        if (exp_m->count()) spec.m = m;
        if (exp_eps->count()) spec.eps = eps;
        if (exp_seed->count()) spec.seed = seed;
        if (exp_ns->count()) spec.n_scenarios = n_scenarios;
        if (exp_tl->count()) spec.time_limit = time_limit;
        csv = infeasibility_csv(run_infeasibility(spec));
      } else if (exp_name == "epsilon") {
        EpsilonSweepSpec spec;
        if (exp_n->count()) spec.n = n;
        if (exp_m->count()) spec.m = m;
        if (exp_seed->count()) spec.seed = seed;
        if (exp_ns->count()) spec.n_scenarios = n_scenarios;
        if (exp_tl->count()) spec.time_limit = time_limit;
        csv = epsilon_sweep_csv(run_epsilon_sweep(spec));
      } else {
        std::cerr << "experiment: unknown study " << exp_name << "\n";
        return kExitUsage;
      }
      if (common.out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(common.out_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + common.out_path);
        out << csv;
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
