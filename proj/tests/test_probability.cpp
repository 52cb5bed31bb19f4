#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccsmcp/probability.hpp"
#include "ccsmcp/rng.hpp"

using namespace ccsmcp;

TEST_CASE("symmetric sums match hand expansion") {
  const BernoulliRow row({0.2, 0.3, 0.5});
  const auto h = symmetric_sums(row, 3);
  REQUIRE(h.size() == 4);
  CHECK(h[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h[2] == doctest::Approx(0.31).epsilon(1e-12));
  CHECK(h[3] == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("inclusion-exclusion tail on frozen rows") {
  CHECK(cover_probability_ie(BernoulliRow({0.2, 0.3, 0.5}), 2) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cover_probability_ie(BernoulliRow({0.9, 0.9, 0.9}), 2) ==
        doctest::Approx(0.972).epsilon(1e-12));
  CHECK(cover_probability_ie(BernoulliRow({0.5}), 0) == 1.0);
  CHECK(cover_probability_ie(BernoulliRow({0.5}), 2) == 0.0);
}

TEST_CASE("brute force agrees on the frozen row") {
  CHECK(brute_force_cover_probability(BernoulliRow({0.2, 0.3, 0.5}), 2) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("DFT pmf normalizes and reproduces the tail") {
  const BernoulliRow row({0.2, 0.3, 0.5});
  const auto pmf = pmf_dft(row);
  double total = 0.0;
  for (double v : pmf) total += v;
  CHECK(std::fabs(total - 1.0) < 1e-12);
  CHECK(tail_probability_dft(row, 2) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(tail_probability_dft(BernoulliRow({0.9, 0.9, 0.9}), 2) ==
        doctest::Approx(0.972).epsilon(1e-10));
  CHECK(tail_probability_dft(row, 0) == 1.0);
  CHECK(tail_probability_dft(row, 4) == 0.0);
}

TEST_CASE("three kernels agree on random rows") {
  RngStream rng = RngStream::derive(42, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(1, 12);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& v : p) v = rng.uniform();
    const BernoulliRow row(p);
    const int k = rng.uniform_int(0, n);
    const double exact = brute_force_cover_probability(row, k);
    CHECK(std::fabs(cover_probability_ie(row, k) - exact) < 1e-9);
    CHECK(std::fabs(tail_probability_dft(row, k) - exact) < 1e-9);
  }
}

TEST_CASE("truncated bounds at the frozen points") {
  const BernoulliRow row({0.5, 0.5});
  CHECK(truncated_bound(row, 1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(truncated_bound(row, 1, 2) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bound series sandwiches the exact value") {
  const BernoulliRow row({0.5, 0.5});
  const BoundSeries s = bound_series(row, 1);
  REQUIRE(s.values.size() == 3);
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.values[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.values[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.exact == doctest::Approx(0.25).epsilon(1e-10));

  std::vector<double> p(20, 0.15);
  const BoundSeries big = bound_series(BernoulliRow(p), 3);
  for (std::size_t t = 0; t < big.values.size(); ++t) {
    if (t % 2 == 0)
      CHECK(big.values[t] >= big.exact - 1e-9);
    else
      CHECK(big.values[t] <= big.exact + 1e-9);
  }
  // eventual monotonicity past the onset indices
  for (int t = big.t_min_odd; t + 2 <= 20; t += 2)
    CHECK(big.values[std::size_t(t)] <= big.values[std::size_t(t) + 2] + 1e-9);
  for (int t = big.t_min_even; t + 2 <= 20; t += 2)
    CHECK(big.values[std::size_t(t)] >= big.values[std::size_t(t) + 2] - 1e-9);
}

TEST_CASE("incomplete beta and binomial tails") {
  CHECK(regularized_incomplete_beta(2.0, 2.0, 0.9) == doctest::Approx(0.972).epsilon(1e-12));
  CHECK(binomial_tail(3, 2, 0.9) == doctest::Approx(0.972).epsilon(1e-12));
  CHECK(binomial_tail(2, 3, 0.9) == 0.0);
  CHECK(binomial_tail(3, 0, 0.9) == 1.0);
}

TEST_CASE("binomial tail three-way agreement") {
  for (int d = 1; d <= 30; ++d) {
    for (int k = 1; k <= d; ++k) {
      for (double p = 0.05; p < 0.96; p += 0.1) {
        // direct sum
        detail::KahanSum direct;
        for (int j = k; j <= d; ++j)
          direct.add(detail::binom(d, j) * std::pow(p, j) * std::pow(1.0 - p, d - j));
        const double beta = binomial_tail(d, k, p);
        const double equal_row = cover_probability_ie(
            BernoulliRow(std::vector<double>(std::size_t(d), p)), k);
        CHECK(std::fabs(direct.sum - beta) < 1e-10);
        CHECK(std::fabs(equal_row - beta) < 1e-10);
      }
    }
  }
}

TEST_CASE("min cover count and the Markov floor") {
  auto d = min_cover_count(2, 0.9, 0.1, 3);
  REQUIRE(d.has_value());
  CHECK(*d == 3);
  CHECK_FALSE(min_cover_count(2, 0.1, 0.01, 3).has_value());
  // monotone in d: the found value is minimal
  CHECK(binomial_tail(2, 2, 0.9) < 0.9);
  CHECK(binomial_tail(3, 2, 0.9) >= 0.9);
  CHECK(markov_lower_bound(2, 0.9, 0.1) <= 3);
  CHECK(markov_lower_bound(2, 0.9, 0.1) >= 2);
}
