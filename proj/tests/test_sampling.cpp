#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccsmcp/bnb.hpp"
#include "ccsmcp/reformulate.hpp"
#include "ccsmcp/sampling.hpp"

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

}  // namespace

TEST_CASE("scenario sampling is deterministic and in range") {
  const Instance inst = running_example();
  const ScenarioSet a = sample_scenarios(inst, 50, 9);
  const ScenarioSet b = sample_scenarios(inst, 50, 9);
  CHECK(a.draws == b.draws);
  const ScenarioSet c = sample_scenarios(inst, 50, 10);
  CHECK(a.draws != c.draws);
  CHECK_FALSE(a.has_likelihoods());
}

TEST_CASE("likelihood ratio of a frozen draw") {
  // p = (0.5, 0.5), p_hat = (0.25, 0.25), a_hat = (1, 0) -> L = 4/3
  const double l = std::exp((std::log(0.5) - std::log(0.25)) +
                            (std::log(0.5) - std::log(0.75)));
  CHECK(l == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  // and through the sampler: average L over tilted draws has mean 1
  Instance inst;
  inst.n = 2;
  inst.m = 1;
  inst.costs = {1.0, 1.0};
  inst.rows = {{{0, 0.5}, {1, 0.5}}};
  inst.demands = {1};
  inst.risks = {0.4};
  std::vector<SparseRow> p_hat = {{{0, 0.25}, {1, 0.25}}};
  const ScenarioSet s = sample_scenarios(inst, p_hat, 20000, 4);
  double mean = 0.0;
  for (int w = 0; w < s.N; ++w) mean += s.likelihoods[std::size_t(w)][0];
  mean /= double(s.N);
  CHECK(std::fabs(mean - 1.0) < 0.05);
}

TEST_CASE("tilt parameter closed form") {
  // n'=4, k=2, homogeneous p=0.5, u=4 -> target 1, p_hat = 0.25, lambda = ln 3
  const IsParameters par = is_parameters({0.5, 0.5, 0.5, 0.5}, 2, 4);
  CHECK(par.lambda_star == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  for (double p : par.p_hat) CHECK(p == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("homogeneous tilt hits the target mean exactly") {
  for (int np : {3, 6, 10}) {
    for (int target_scale = 1; target_scale < np; ++target_scale) {
      const double p = 0.7;
      const int k = 2;
      // choose u so the target n' - u + k - 1 equals target_scale
      const int u = np + k - 1 - target_scale;
      const double target = double(np - u + k - 1);
      if (!(target > 0.0 && target < np * p)) continue;
      const IsParameters par =
          is_parameters(std::vector<double>(std::size_t(np), p), k, u);
      for (double ph : par.p_hat)
        CHECK(ph == doctest::Approx(target / double(np)).epsilon(1e-9));
    }
  }
}

TEST_CASE("unattainable target falls back to the identity tilt") {
  const IsParameters par = is_parameters({0.5, 0.5}, 1, 5);  // target < 0
  CHECK(par.lambda_star == 0.0);
  CHECK(par.p_hat == std::vector<double>{0.5, 0.5});
}

TEST_CASE("default u estimate") {
  CHECK(default_u_estimate(4, 2) == 3);   // ceil(5/2)
  CHECK(default_u_estimate(12, 3) == 7);  // ceil(14/2)
}

TEST_CASE("SAA and IS estimators target the exact violation probability") {
  const Instance inst = running_example();
  const std::vector<int> x = {1, 1, 1};
  const double q_exact = 0.028;  // 1 - 0.972
  const int N = 20000;
  const ScenarioSet nominal = sample_scenarios(inst, N, 21);
  const double q_saa = estimate_q(inst, 0, x, nominal);
  const double se_saa = std::sqrt(q_exact * (1 - q_exact) / N);
  CHECK(std::fabs(q_saa - q_exact) < 4.0 * se_saa);

  const auto p_hat = tilt_instance(inst);
  const ScenarioSet tilted = sample_scenarios(inst, p_hat, N, 22);
  const double q_is = estimate_q(inst, 0, x, tilted);
  CHECK(std::fabs(q_is - q_exact) < 0.01);
}

TEST_CASE("IS model with unit likelihoods reduces to SAA") {
  const Instance inst = running_example();
  const int N = 12;
  ScenarioSet scen = sample_scenarios(inst, N, 33);
  scen.likelihoods.assign(std::size_t(N), std::vector<double>(1, 1.0));
  const BipModel saa = build_saa(inst, scen, inst.risks);
  const BipModel isb = build_is(inst, scen, inst.risks);
  REQUIRE(saa.constraints.size() == isb.constraints.size());
  REQUIRE(saa.constraints.size() >= 2);
  // coverage rows and the trailing support cut are identical; the counting
  // rows (second to last) are scalar multiples
  for (std::size_t r = 0; r + 2 < saa.constraints.size(); ++r)
    CHECK(saa.constraints[r].coeffs == isb.constraints[r].coeffs);
  CHECK(saa.constraints.back().coeffs == isb.constraints.back().coeffs);
  CHECK(saa.constraints.back().rhs == isb.constraints.back().rhs);
  const auto& cs = saa.constraints[saa.constraints.size() - 2];
  const auto& ci = isb.constraints[isb.constraints.size() - 2];
  // sum z >= (1-eps) N  vs  -sum z <= N eps - N
  CHECK(cs.rhs == doctest::Approx((1.0 - 0.1) * N));
  CHECK(ci.rhs == doctest::Approx(N * 0.1 - N));
  for (std::size_t t = 0; t < cs.coeffs.size(); ++t) {
    CHECK(cs.coeffs[t].first == ci.coeffs[t].first);
    CHECK(ci.coeffs[t].second == doctest::Approx(-cs.coeffs[t].second));
  }
}

TEST_CASE("a costly scenario forces its indicator on") {
  // one scenario with L = 4/3 > eps N forces z = 1
  Instance inst;
  inst.n = 1;
  inst.m = 1;
  inst.costs = {1.0};
  inst.rows = {{{0, 0.9}}};
  inst.demands = {1};
  inst.risks = {0.1};
  ScenarioSet scen;
  scen.N = 1;
  scen.draws = {{{1}}};
  scen.likelihoods = {{4.0 / 3.0}};
  const BipModel model = build_is(inst, scen, inst.risks);
  const BnbReport rep = solve_bip(model);
  REQUIRE(rep.status == BnbStatus::optimal);
  // z = 1 requires coverage, so x0 = 1 and the objective is 1
  CHECK(rep.objective == doctest::Approx(1.0));
}

TEST_CASE("sample size formulas reproduce the frozen values") {
  CHECK(saa_sample_size({0.05}, {0.1}, 1, 0.05, SampleSizeMode::lower_bound) == 180);
  CHECK(saa_sample_size({0.1}, {0.05}, 1, 0.05, SampleSizeMode::feasibility, 10) == 1986);
  CHECK_THROWS_AS(saa_sample_size({0.1}, {0.05}, 1, 0.05, SampleSizeMode::lower_bound),
                  std::domain_error);
}

TEST_CASE("lower bound confidence") {
  CHECK(lower_bound_confidence({0.5}, {0.0}, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lower_bound_confidence({0.05}, {0.1}, 1, 200) >= 1.0 - std::exp(-200.0 / 60.0));
  CHECK(lower_bound_confidence({0.05}, {0.1}, 1, 400) >=
        lower_bound_confidence({0.05}, {0.1}, 1, 200));
}
