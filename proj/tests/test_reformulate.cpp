#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccsmcp/bnb.hpp"
#include "ccsmcp/presolve.hpp"
#include "ccsmcp/reformulate.hpp"
#include "ccsmcp/rng.hpp"

using namespace ccsmcp;

namespace {

Instance running_example() {
  Instance inst;
  inst.n = 3;
  inst.m = 1;
  inst.costs = {1.0, 1.0, 1.0};
  inst.rows = {{{0, 0.9}, {1, 0.9}, {2, 0.9}}};
  inst.demands = {2};
  inst.risks = {0.1};
  return inst;
}

// force the general-row path regardless of classification shortcuts
PresolveResult all_general(const Instance& inst) {
  PresolveResult res;
  for (int i = 0; i < inst.m; ++i) res.kept_rows.push_back(i);
  res.kinds.assign(std::size_t(inst.m), RowClass{});
  return res;
}

double eval_row(const LinConstraint& c, const std::vector<double>& full) {
  double lhs = 0.0;
  for (auto [j, v] : c.coeffs) lhs += v * full[std::size_t(j)];
  return lhs;
}

}  // namespace

TEST_CASE("linearization variants agree with the true product on all points") {
  for (Linearization variant : {Linearization::variant1, Linearization::variant2}) {
    for (int sz = 2; sz <= 4; ++sz) {
      BipModel model;
      for (int j = 0; j < sz; ++j)
        model.add_var("x" + std::to_string(j), 1.0, true, VarClass::structural);
      model.num_x = sz;
      std::vector<int> subset(static_cast<std::size_t>(sz));
      for (int j = 0; j < sz; ++j) subset[std::size_t(j)] = j;
      const int y = linearize_product(model, subset, variant);

      for (std::uint32_t mask = 0; mask < (1u << sz); ++mask) {
        std::vector<int> x(static_cast<std::size_t>(sz));
        for (int j = 0; j < sz; ++j) x[std::size_t(j)] = (mask >> j) & 1;
        const auto full = bnbdetail::complete(model, x);
        int truth = 1;
        for (int v : x) truth &= v;
        CHECK(full[std::size_t(y)] == double(truth));
        CHECK(bnbdetail::satisfies(model, full));
        // the constraints also reject the wrong value of y
        auto wrong = full;
        wrong[std::size_t(y)] = 1.0 - wrong[std::size_t(y)];
        CHECK_FALSE(bnbdetail::satisfies(model, wrong));
      }
    }
  }
}

TEST_CASE("products are memoized and singletons collapse") {
  BipModel model;
  for (int j = 0; j < 3; ++j)
    model.add_var("x" + std::to_string(j), 1.0, true, VarClass::structural);
  model.num_x = 3;
  CHECK(linearize_product(model, {1}, Linearization::variant2) == 1);
  const int y1 = linearize_product(model, {0, 2}, Linearization::variant2);
  const int y2 = linearize_product(model, {0, 2}, Linearization::variant2);
  CHECK(y1 == y2);
  CHECK(model.num_vars() == 4);
}

TEST_CASE("full reformulation solves the running example to 3") {
  const Instance inst = running_example();
  for (Linearization variant : {Linearization::variant1, Linearization::variant2}) {
    BuildOptions opt;
    opt.variant = variant;
    const BipModel model = build_full(inst, all_general(inst), opt);
    const BnbReport rep = solve_bip(model);
    REQUIRE(rep.status == BnbStatus::optimal);
    CHECK(rep.objective == doctest::Approx(3.0).epsilon(1e-9));
  }
}

TEST_CASE("classified special rows emit their compact forms") {
  Instance inst;
  inst.n = 3;
  inst.m = 2;
  inst.costs = {1.0, 1.0, 1.0};
  inst.rows = {{{0, 0.7}, {1, 0.4}}, {{0, 0.9}, {1, 0.9}, {2, 0.9}}};
  inst.demands = {1, 2};
  inst.risks = {0.3, 0.1};
  const BipModel model = build_full(inst, presolve(inst));
  REQUIRE(model.constraints.size() == 2);
  // log-transform row: sum log(1-p) x <= log eps
  const auto& lg = model.constraints[0];
  CHECK(lg.sense == Sense::le);
  CHECK(lg.rhs == doctest::Approx(std::log(0.3)));
  CHECK(lg.coeffs[0].second == doctest::Approx(std::log(0.3)));  // log(1-0.7)
  CHECK(lg.coeffs[1].second == doctest::Approx(std::log(0.6)));
  // equal-probability row: cardinality >= d_bar
  const auto& eq = model.constraints[1];
  CHECK(eq.sense == Sense::ge);
  CHECK(eq.rhs == doctest::Approx(3.0));
  CHECK(eq.coeffs.size() == 3);
}

TEST_CASE("p = 1 columns get the clipped log coefficient") {
  Instance inst;
  inst.n = 2;
  inst.m = 1;
  inst.costs = {1.0, 1.0};
  inst.rows = {{{0, 1.0}, {1, 0.5}}};
  inst.demands = {1};
  inst.risks = {0.2};
  const BipModel model = build_full(inst, presolve(inst));
  CHECK(model.constraints[0].coeffs[0].second == doctest::Approx(-744.0));
}

TEST_CASE("OA relaxation with t=1, k=1 is the Bonferroni row") {
  Instance inst;
  inst.n = 2;
  inst.m = 1;
  inst.costs = {1.0, 1.0};
  inst.rows = {{{0, 0.6}, {1, 0.3}}};
  inst.demands = {1};
  inst.risks = {0.2};
  const BipModel model =
      build_oa_relaxation(inst, all_general(inst), TruncationState(1));
  // a support-cardinality cut precedes the truncated row
  REQUIRE(model.constraints.size() == 2);
  const auto& c = model.constraints.back();
  // 1 - sum p x <= eps, emitted as -sum p x <= eps - 1
  CHECK(c.sense == Sense::le);
  CHECK(c.rhs == doctest::Approx(0.2 - 1.0));
  CHECK(c.coeffs[0].second == doctest::Approx(-0.6));
  CHECK(c.coeffs[1].second == doctest::Approx(-0.3));
}

TEST_CASE("OA relaxation is an outer bound of the running example") {
  const Instance inst = running_example();
  const BipModel relax =
      build_oa_relaxation(inst, all_general(inst), TruncationState(1));
  const BnbReport rep = solve_bip(relax);
  REQUIRE(rep.status == BnbStatus::optimal);
  CHECK(rep.objective <= 3.0 + 1e-9);
  // the exact point (1,1,1) stays feasible in the relaxation
  const auto full = bnbdetail::complete(relax, {1, 1, 1});
  CHECK(bnbdetail::satisfies(relax, full));
}

TEST_CASE("OA truncated row evaluates to g_t on integral points") {
  RngStream rng = RngStream::derive(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 7);
    Instance inst;
    inst.n = n;
    inst.m = 1;
    inst.costs.assign(std::size_t(n), 1.0);
    SparseRow row;
    for (int j = 0; j < n; ++j) row.emplace_back(j, rng.uniform(0.1, 0.95));
    inst.rows = {row};
    inst.demands = {rng.uniform_int(2, std::min(3, n))};
    inst.risks = {0.1};
    TruncationState state(1);
    state.t[0] = 1 + 2 * rng.uniform_int(0, 1);
    const BipModel model = build_oa_relaxation(inst, all_general(inst), state);
    const LinConstraint& c = model.constraints.back();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> x(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) x[std::size_t(j)] = (mask >> j) & 1;
      const auto full = bnbdetail::complete(model, x);
      const double lhs = eval_row(c, full);
      const int t_eff = std::min(state.t[0], int(x.size()));
      const double g = truncated_bound(inst.selected_row(0, x), inst.demands[0],
                                       std::min(t_eff, int(inst.selected_row(0, x).size())));
      // row encodes g_t(x) - constant <= eps - constant
      CHECK(lhs - (c.rhs - 0.1) == doctest::Approx(g).epsilon(1e-9));
    }
  }
}

TEST_CASE("infeasible classified rows raise the certificate error") {
  Instance inst;
  inst.n = 3;
  inst.m = 1;
  inst.costs = {1.0, 1.0, 1.0};
  inst.rows = {{{0, 0.1}, {1, 0.1}, {2, 0.1}}};
  inst.demands = {2};
  inst.risks = {0.01};
  CHECK_THROWS_AS(build_full(inst, presolve(inst)), InfeasibleRowError);
}

TEST_CASE("subset budget trips the size error") {
  Instance inst;
  inst.n = 12;
  inst.m = 1;
  inst.costs.assign(12, 1.0);
  SparseRow row;
  for (int j = 0; j < 12; ++j) row.emplace_back(j, 0.9 + 0.005 * j);
  inst.rows = {row};
  inst.demands = {2};
  inst.risks = {0.1};
  BuildOptions opt;
  opt.subset_budget = 10;
  CHECK_THROWS_AS(build_full(inst, all_general(inst), opt), SizeError);
}
