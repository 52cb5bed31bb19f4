#pragma once

// Scenario generation, SAA/IS probability estimators, sample-size
// calculators, and the exponential-tilting parameter optimizer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccsmcp/instance.hpp"
#include "ccsmcp/probability.hpp"
#include "ccsmcp/rng.hpp"

namespace ccsmcp {

struct ScenarioSet {
  int N = 0;
  // draws[w][i] is row i of scenario w, dense over [n] (0/1)
  std::vector<std::vector<std::vector<std::uint8_t>>> draws;
  // likelihoods[w][i] = L(A_i(w)); empty for nominal sampling
  std::vector<std::vector<double>> likelihoods;
  std::uint64_t seed = 0;

  bool has_likelihoods() const { return !likelihoods.empty(); }
};

/// i.i.d. Bernoulli draws from the nominal matrix.
inline ScenarioSet sample_scenarios(const Instance& inst, int N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_scenarios: N < 1");
  ScenarioSet s;
  s.N = N;
  s.seed = seed;
  s.draws.resize(std::size_t(N));
  for (int w = 0; w < N; ++w) {
    auto& mat = s.draws[std::size_t(w)];
    mat.assign(std::size_t(inst.m), std::vector<std::uint8_t>(std::size_t(inst.n), 0));
    for (int i = 0; i < inst.m; ++i) {
      RngStream rng = RngStream::derive(seed, (std::uint64_t(w) << 20) ^ std::uint64_t(i));
      for (auto [j, p] : inst.rows[std::size_t(i)])
        if (rng.bernoulli(p)) mat[std::size_t(i)][std::size_t(j)] = 1;
    }
  }
  return s;
}

/// Draws from a tilted matrix p_hat (same sparsity as the instance), with
/// per-row likelihood ratios accumulated in log space over the support.
inline ScenarioSet sample_scenarios(const Instance& inst, const std::vector<SparseRow>& p_hat,
                                    int N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_scenarios: N < 1");
  if (int(p_hat.size()) != inst.m) throw std::invalid_argument("sample_scenarios: p_hat size");
  ScenarioSet s;
  s.N = N;
  s.seed = seed;
  s.draws.resize(std::size_t(N));
  s.likelihoods.assign(std::size_t(N), std::vector<double>(std::size_t(inst.m), 1.0));
  for (int w = 0; w < N; ++w) {
    auto& mat = s.draws[std::size_t(w)];
    mat.assign(std::size_t(inst.m), std::vector<std::uint8_t>(std::size_t(inst.n), 0));
    for (int i = 0; i < inst.m; ++i) {
      RngStream rng = RngStream::derive(seed, (std::uint64_t(w) << 20) ^ std::uint64_t(i));
      const SparseRow& nominal = inst.rows[std::size_t(i)];
      const SparseRow& tilted = p_hat[std::size_t(i)];
      if (tilted.size() != nominal.size())
        throw std::invalid_argument("sample_scenarios: p_hat sparsity mismatch");
      double log_l = 0.0;
      for (std::size_t t = 0; t < nominal.size(); ++t) {
        const auto [j, p] = nominal[t];
        const double ph = tilted[t].second;
        const bool hit = rng.bernoulli(ph);
        if (hit) mat[std::size_t(i)][std::size_t(j)] = 1;
        if (p == ph) continue;  // ratio 1, incl. the 0/0 convention
        if (ph <= 0.0 || ph >= 1.0)
          throw std::invalid_argument("sample_scenarios: degenerate tilt p_hat in {0,1}");
        log_l += hit ? std::log(p) - std::log(ph) : std::log1p(-p) - std::log1p(-ph);
      }
      s.likelihoods[std::size_t(w)][std::size_t(i)] = std::exp(log_l);
    }
  }
  return s;
}

/// Optimal one-dimensional tilt for one row: lambda_star solves
/// eta(lambda) = sum_j p_hat_j(lambda) = n' - u + k - 1 by bisection;
/// identity tilt when the target is unattainable.
struct IsParameters {
  double lambda_star = 0.0;
  std::vector<double> p_hat;
};

inline IsParameters is_parameters(const std::vector<double>& probs, int k, int u) {
  IsParameters out;
  const int np = int(probs.size());
  const double target = double(np - u + k - 1);
  double sum_p = 0.0;
  for (double p : probs) sum_p += p;
  out.p_hat = probs;
  if (!(target < sum_p) || target <= 0.0) return out;  // identity fallback

  auto eta = [&](double lambda) {
    double s = 0.0;
    for (double p : probs) {
      const double e = std::exp(-lambda) * p;
      s += e / (e + (1.0 - p));
    }
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (eta(hi) > target) {
    hi *= 2.0;
    if (hi > 1e6) break;  // target ~ 0, tilt saturates
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = eta(mid);
    if (std::fabs(v - target) <= 1e-13) {
      lo = hi = mid;
      break;
    }
    (v > target ? lo : hi) = mid;
  }
  out.lambda_star = 0.5 * (lo + hi);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double e = std::exp(-out.lambda_star) * probs[j];
    out.p_hat[j] = e / (e + (1.0 - probs[j]));
  }
  return out;
}

/// Default selection-count estimate u = ceil((n' + k - 1) / 2).
inline int default_u_estimate(int support_size, int k) {
  return (support_size + k - 1 + 1) / 2;
}

/// Tilted matrix for the whole instance: supports tilted per row, zero
/// columns untouched.
inline std::vector<SparseRow> tilt_instance(const Instance& inst, int u_override = 0) {
  std::vector<SparseRow> p_hat(std::size_t(inst.m));
  for (int i = 0; i < inst.m; ++i) {
    const SparseRow& row = inst.rows[std::size_t(i)];
    std::vector<double> probs;
    for (auto [j, p] : row) probs.push_back(p);
    const int k = inst.demands[std::size_t(i)];
    const int u = u_override > 0 ? u_override : default_u_estimate(int(probs.size()), k);
    const IsParameters par = is_parameters(probs, k, u);
    SparseRow tilted = row;
    for (std::size_t t = 0; t < tilted.size(); ++t) tilted[t].second = par.p_hat[t];
    p_hat[std::size_t(i)] = std::move(tilted);
  }
  return p_hat;
}

/// (1/N) sum_w w_l 1(A_i(w) x < k_i); weights are 1 for nominal scenario
/// sets and the likelihood ratio for tilted ones. Unbiased either way.
inline double estimate_q(const Instance& inst, int i, const std::vector<int>& x,
                         const ScenarioSet& scen) {
  const int k = inst.demands[std::size_t(i)];
  double sum = 0.0;
  for (int w = 0; w < scen.N; ++w) {
    int count = 0;
    for (auto [j, p] : inst.rows[std::size_t(i)])
      if (x[std::size_t(j)] != 0 && scen.draws[std::size_t(w)][std::size_t(i)][std::size_t(j)])
        ++count;
    if (count < k)
      sum += scen.has_likelihoods() ? scen.likelihoods[std::size_t(w)][std::size_t(i)] : 1.0;
  }
  return sum / double(scen.N);
}

enum class SampleSizeMode { lower_bound, feasibility };

/// Sample sizes from the concentration bounds: lower-bound mode needs
/// eps < alpha, feasibility mode alpha < eps.
inline int saa_sample_size(const std::vector<double>& eps, const std::vector<double>& alpha,
                           int m, double delta, SampleSizeMode mode, int n = 0) {
  if (int(eps.size()) != m || int(alpha.size()) != m)
    throw std::invalid_argument("saa_sample_size: dimension mismatch");
  if (mode == SampleSizeMode::lower_bound) {
    double kappa1 = 1e300;
    for (int i = 0; i < m; ++i) {
      const double e = eps[std::size_t(i)], a = alpha[std::size_t(i)];
      if (!(e < a)) throw std::domain_error("saa_sample_size: need eps < alpha per item");
      kappa1 = std::min(kappa1, (a - e) * (a - e) / (a + e));
    }
    return int(std::ceil(std::log(double(m) / delta) / kappa1 - 1e-9));
  }
  double kappa2 = 1e300;
  for (int i = 0; i < m; ++i) {
    const double e = eps[std::size_t(i)], a = alpha[std::size_t(i)];
    if (!(a < e)) throw std::domain_error("saa_sample_size: need alpha < eps per item");
    kappa2 = std::min(kappa2, 2.0 * (e - a) * (e - a));
  }
  return int(std::ceil((std::log(double(m) / delta) + double(n) * std::log(2.0)) / kappa2 - 1e-9));
}

/// P[SAA optimum is a valid lower bound] >= 1 - sum_i I_{eps_i}(floor(a_i N)+1, N - floor(a_i N)).
inline double lower_bound_confidence(const std::vector<double>& eps, const std::vector<double>& alpha,
                                     int m, int N) {
  if (N < 1) throw std::invalid_argument("lower_bound_confidence: N < 1");
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const int fa = int(std::floor(alpha[std::size_t(i)] * double(N) + 1e-12));
    if (fa >= N) continue;  // beta term vanishes
    s += regularized_incomplete_beta(double(fa + 1), double(N - fa), eps[std::size_t(i)]);
  }
  return std::clamp(1.0 - s, 0.0, 1.0);
}

/// Compact audit dump: one line per scenario, rows separated by '|'.
inline void write_scenarios(const ScenarioSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << s.N << " " << s.seed << "\n";
  for (int w = 0; w < s.N; ++w) {
    for (std::size_t i = 0; i < s.draws[std::size_t(w)].size(); ++i) {
      if (i) out << '|';
      for (std::uint8_t b : s.draws[std::size_t(w)][i]) out << int(b);
    }
    out << "\n";
  }
}

}  // namespace ccsmcp
