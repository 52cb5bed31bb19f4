#include <doctest.h>

#include <cstdio>

#include "ccsmcp/instance.hpp"
#include "ccsmcp/presolve.hpp"

using namespace ccsmcp;

namespace {

Instance running_example() {
  // n=3, m=1, p=(0.9,0.9,0.9), k=2, eps=0.1
  Instance inst;
  inst.n = 3;
  inst.m = 1;
  inst.costs = {1.0, 1.0, 1.0};
  inst.rows = {{{0, 0.9}, {1, 0.9}, {2, 0.9}}};
  inst.demands = {2};
  inst.risks = {0.1};
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("verify on the running example") {
  const Instance inst = running_example();
  const Solution full = verify(inst, {1, 1, 1});
  CHECK(full.per_item_prob[0] == doctest::Approx(0.972).epsilon(1e-10));
  CHECK(full.feasible);
  CHECK(full.objective == doctest::Approx(3.0));
  const Solution partial = verify(inst, {1, 1, 0});
  CHECK(partial.per_item_prob[0] == doctest::Approx(0.81).epsilon(1e-10));
  CHECK_FALSE(partial.feasible);
}

TEST_CASE("sparse generator respects the profile ranges") {
  const Instance feas = generate_sparse(30, 10, 0.1, 7, GenProfile::feasible);
  for (int i = 0; i < feas.m; ++i) {
    CHECK(int(feas.rows[std::size_t(i)].size()) <= 12);
    CHECK(int(feas.rows[std::size_t(i)].size()) >= feas.demands[std::size_t(i)]);
    for (auto [j, p] : feas.rows[std::size_t(i)]) {
      CHECK(p >= 0.9);
      CHECK(p <= 1.0);
    }
    CHECK(feas.demands[std::size_t(i)] >= 1);
    CHECK(feas.demands[std::size_t(i)] <= 3);
  }
  const Instance inf = generate_sparse(30, 10, 0.05, 7, GenProfile::infeasible);
  for (const auto& row : inf.rows)
    for (auto [j, p] : row) {
      CHECK(p >= 0.2);
      CHECK(p <= 0.6);
    }
  const Instance special = generate_sparse(30, 10, 0.1, 7, GenProfile::special_case);
  for (int i = 0; i < special.m; ++i) {
    CHECK(special.demands[std::size_t(i)] >= 2);
    const auto& row = special.rows[std::size_t(i)];
    for (auto [j, p] : row) CHECK(p == row[0].second);
  }
}

TEST_CASE("generator is deterministic in the seed") {
  const Instance a = generate_sparse(20, 5, 0.1, 11, GenProfile::feasible);
  const Instance b = generate_sparse(20, 5, 0.1, 11, GenProfile::feasible);
  CHECK(to_json(a) == to_json(b));
  const Instance c = generate_sparse(20, 5, 0.1, 12, GenProfile::feasible);
  CHECK(to_json(a) != to_json(c));
}

TEST_CASE("JSON round trip is the identity") {
  Instance inst = generate_sparse(15, 4, 0.05, 3, GenProfile::feasible);
  inst.side.kind = SideConstraints::Kind::budget;
  inst.side.budget = 9;
  const std::string path = "roundtrip_test_instance.json";
  write_instance(inst, path);
  const Instance back = read_instance(path);
  std::remove(path.c_str());
  CHECK(to_json(inst) == to_json(back));
}

TEST_CASE("parse errors name the missing field") {
  CHECK_THROWS_WITH_AS(instance_from_json(nlohmann::json{{"n", 1}}),
                       doctest::Contains("missing field \"m\""), std::runtime_error);
}

TEST_CASE("dominance keeps the componentwise-minimal row") {
  Instance inst;
  inst.n = 2;
  inst.m = 2;
  inst.costs = {1.0, 1.0};
  inst.rows = {{{0, 0.2}, {1, 0.3}}, {{0, 0.4}, {1, 0.5}}};
  inst.demands = {2, 1};
  inst.risks = {0.05, 0.1};
  const PresolveResult res = dominance_reduce(inst);
  REQUIRE(res.kept_rows == std::vector<int>{0});
  REQUIRE(res.dropped_rows.size() == 1);
  CHECK(res.dropped_rows[0] == std::pair<int, int>{1, 0});
}

TEST_CASE("identical rows keep the lowest index") {
  Instance inst;
  inst.n = 1;
  inst.m = 3;
  inst.costs = {1.0};
  inst.rows = {{{0, 0.5}}, {{0, 0.5}}, {{0, 0.5}}};
  inst.demands = {1, 1, 1};
  inst.risks = {0.2, 0.2, 0.2};
  const PresolveResult res = dominance_reduce(inst);
  CHECK(res.kept_rows == std::vector<int>{0});
  REQUIRE(res.dropped_rows.size() == 2);
  CHECK(res.dropped_rows[0].second == 0);
  CHECK(res.dropped_rows[1].second == 0);
}

TEST_CASE("every dropped row has a kept witness") {
  const Instance inst = generate_sparse(25, 12, 0.1, 19, GenProfile::feasible);
  const PresolveResult res = dominance_reduce(inst);
  for (auto [row, witness] : res.dropped_rows) {
    CHECK(witness >= 0);
    bool kept = false;
    for (int k : res.kept_rows) kept = kept || k == witness;
    CHECK(kept);
    CHECK(detail::row_dominates(inst, witness, row));
  }
}

TEST_CASE("row classification recognizes all kinds") {
  Instance inst;
  inst.n = 3;
  inst.m = 4;
  inst.costs = {1.0, 1.0, 1.0};
  inst.rows = {{{0, 0.9}, {1, 0.9}, {2, 0.9}},   // equal_prob
               {{0, 0.1}, {1, 0.1}, {2, 0.1}},   // infeasible for eps=0.01
               {{0, 0.7}, {1, 0.4}},             // k=1 -> log transform
               {{0, 0.95}, {1, 0.9}, {2, 0.85}}};// general
  inst.demands = {2, 2, 1, 2};
  inst.risks = {0.1, 0.01, 0.3, 0.1};
  const PresolveResult res = classify_rows(inst, PresolveResult{{0, 1, 2, 3}, {}, {}});
  REQUIRE(res.kinds.size() == 4);
  CHECK(res.kinds[0].kind == RowKind::equal_prob);
  CHECK(res.kinds[0].equal_p == doctest::Approx(0.9));
  REQUIRE(res.kinds[0].d_bar.has_value());
  CHECK(*res.kinds[0].d_bar == 3);
  CHECK(res.kinds[1].kind == RowKind::infeasible);
  CHECK(res.kinds[1].max_achievable == doctest::Approx(0.028).epsilon(1e-9));
  CHECK(res.kinds[2].kind == RowKind::log_transform);
  CHECK(res.kinds[3].kind == RowKind::general);
}
