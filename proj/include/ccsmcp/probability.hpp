#pragma once

// Poisson-binomial cover-probability kernels: elementary symmetric sums,
// inclusion-exclusion tails, DFT-based PMF/CDF, truncated bound ladder,
// and binomial-tail special cases via the regularized incomplete beta.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ccsmcp {

/// Success probabilities of the selected columns for one item; the caller
/// masks by x before construction (an empty row represents x = 0).
struct BernoulliRow {
  std::vector<double> probs;

  BernoulliRow() = default;
  explicit BernoulliRow(std::vector<double> p) : probs(std::move(p)) {
    for (double v : probs) {
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("BernoulliRow: probability outside [0,1]");
    }
  }

  std::size_t size() const { return probs.size(); }
};

namespace detail {

// Kahan-compensated accumulator; extended precision tames the cancellation
// in the alternating inclusion-exclusion sums.
struct KahanSum {
  long double sum = 0.0L;
  long double c = 0.0L;
  void add(long double v) {
    long double y = v - c;
    long double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

inline double binom(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  r = std::min(r, n - r);
  double v = 1.0;
  for (int i = 1; i <= r; ++i) v = v * double(n - r + i) / double(i);
  return v;
}

// Widest available accumulator for the severely cancelling alternating
// sums (terms grow like C(n-1,k-1) * C(n,l) while the result stays in [0,1]).
#if defined(__SIZEOF_FLOAT128__)
using wide_float = __float128;
#else
using wide_float = long double;
#endif

// Extended-precision symmetric sums for the alternating kernels.
inline std::vector<long double> symmetric_sums_l(const std::vector<double>& probs,
                                                 int max_order) {
  std::vector<long double> e(static_cast<std::size_t>(max_order) + 1, 0.0L);
  e[0] = 1.0L;
  int seen = 0;
  for (double p : probs) {
    ++seen;
    for (int l = std::min(seen, max_order); l >= 1; --l)
      e[static_cast<std::size_t>(l)] += static_cast<long double>(p) * e[static_cast<std::size_t>(l) - 1];
  }
  return e;
}

}  // namespace detail

/// Elementary symmetric sums h_0..h_max_order of the row entries,
/// by the in-place recursion e_l <- e_l + p * e_{l-1}.
inline std::vector<double> symmetric_sums(const BernoulliRow& row, int max_order) {
  const int n = static_cast<int>(row.size());
  if (max_order < 0 || max_order > n)
    throw std::domain_error("symmetric_sums: max_order out of [0, n]");
  std::vector<detail::KahanSum> e(static_cast<std::size_t>(max_order) + 1);
  e[0].sum = 1.0;
  int seen = 0;
  for (double p : row.probs) {
    ++seen;
    for (int l = std::min(seen, max_order); l >= 1; --l)
      e[static_cast<std::size_t>(l)].add(p * e[static_cast<std::size_t>(l) - 1].sum);
  }
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = e[i].sum;
  return out;
}

/// P[count >= k] by the alternating inclusion-exclusion sum over h_l.
/// Retained for cross-validation; the DFT kernel below is authoritative.
inline double cover_probability_ie(const BernoulliRow& row, int k) {
  if (k < 0) throw std::domain_error("cover_probability_ie: k < 0");
  if (k == 0) return 1.0;
  const int n = static_cast<int>(row.size());
  if (k > n) return 0.0;
  std::vector<detail::wide_float> e(static_cast<std::size_t>(n) + 1, 0);
  e[0] = 1;
  int seen = 0;
  for (double p : row.probs) {
    ++seen;
    for (int l = seen; l >= 1; --l)
      e[static_cast<std::size_t>(l)] +=
          static_cast<detail::wide_float>(p) * e[static_cast<std::size_t>(l) - 1];
  }
  detail::wide_float acc = 0;
  for (int l = k; l <= n; ++l) {
    const detail::wide_float term =
        static_cast<detail::wide_float>(detail::binom(l - 1, l - k)) *
        e[static_cast<std::size_t>(l)];
    acc += (l - k) % 2 == 0 ? term : -term;
  }
  return std::clamp(static_cast<double>(acc), 0.0, 1.0);
}

/// Exact probability by enumerating all 2^n outcomes (test oracle).
inline double brute_force_cover_probability(const BernoulliRow& row, int k) {
  const int n = static_cast<int>(row.size());
  if (n > 24) throw std::domain_error("brute_force_cover_probability: row too long");
  if (k <= 0) return 1.0;
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int count = 0;
    double pr = 1.0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) {
        pr *= row.probs[static_cast<std::size_t>(j)];
        ++count;
      } else {
        pr *= 1.0 - row.probs[static_cast<std::size_t>(j)];
      }
    }
    if (count >= k) total += pr;
  }
  return total;
}

/// PMF of the Poisson-binomial count via the characteristic-function sum,
/// evaluated as a direct O(n^2) complex transform.
inline std::vector<double> pmf_dft(const BernoulliRow& row) {
  const int n = static_cast<int>(row.size());
  const int len = n + 1;
  const double w = 2.0 * M_PI / double(len);
  std::vector<std::complex<double>> xi(static_cast<std::size_t>(len));
  for (int m = 0; m < len; ++m) {
    std::complex<double> prod(1.0, 0.0);
    const std::complex<double> z = std::polar(1.0, w * m);
    for (double p : row.probs) prod *= (1.0 - p) + p * z;
    xi[static_cast<std::size_t>(m)] = prod;
  }
  std::vector<double> pmf(static_cast<std::size_t>(len));
  for (int d = 0; d < len; ++d) {
    detail::KahanSum re;
    for (int m = 0; m < len; ++m) {
      const std::complex<double> z = std::polar(1.0, -w * m * d);
      re.add((xi[static_cast<std::size_t>(m)] * z).real());
    }
    pmf[static_cast<std::size_t>(d)] = std::clamp(double(re.sum) / double(len), 0.0, 1.0);
  }
  return pmf;
}

/// P[count >= k] via the DFT PMF; the canonical feasibility kernel.
inline double tail_probability_dft(const BernoulliRow& row, int k) {
  if (k <= 0) return 1.0;
  const int n = static_cast<int>(row.size());
  if (k > n) return 0.0;
  const std::vector<double> pmf = pmf_dft(row);
  detail::KahanSum acc;
  for (int d = k; d <= n; ++d) acc.add(pmf[static_cast<std::size_t>(d)]);
  return std::clamp(double(acc.sum), 0.0, 1.0);
}

/// Truncated inclusion-exclusion bound g_t on P[count <= k-1]:
/// upper bound for even t, lower bound for odd t.
inline double truncated_bound(const BernoulliRow& row, int k, int t) {
  const int n = static_cast<int>(row.size());
  if (t < 0 || t > n) throw std::domain_error("truncated_bound: t out of [0, n]");
  if (k <= 0) return 0.0;
  const int max_l = std::min(n, t + k - 1);
  const std::vector<long double> h = detail::symmetric_sums_l(row.probs, max_l);
  detail::KahanSum acc;
  for (int d = 0; d <= k - 1; ++d) {
    for (int l = d; l <= std::min(t + d, n); ++l) {
      const long double term =
          static_cast<long double>(detail::binom(l, d)) * h[static_cast<std::size_t>(l)];
      acc.add((l - d) % 2 == 0 ? term : -term);
    }
  }
  return double(acc.sum);
}

/// The ladder g_0..g_n for one row plus the exact probability P[count <= k-1]
/// and the onset indices of eventual monotonicity of the odd/even subsequences.
struct BoundSeries {
  int k = 1;
  std::vector<double> values;   // g_t, t = 0..n
  double exact = 0.0;           // P[count <= k-1]
  int t_min_odd = 1;
  int t_min_even = 0;
};

inline BoundSeries bound_series(const BernoulliRow& row, int k) {
  if (k < 1) throw std::domain_error("bound_series: k < 1");
  const int n = static_cast<int>(row.size());
  BoundSeries out;
  out.k = k;
  out.values.resize(static_cast<std::size_t>(n) + 1);
  for (int t = 0; t <= n; ++t) out.values[static_cast<std::size_t>(t)] = truncated_bound(row, k, t);

  const std::vector<double> pmf = pmf_dft(row);
  detail::KahanSum ex;
  for (int d = 0; d < std::min(k, n + 1); ++d) ex.add(pmf[static_cast<std::size_t>(d)]);
  out.exact = std::clamp(double(ex.sum), 0.0, 1.0);

  // g_{t,d} tables for the per-d monotonicity onset.
  const std::vector<double> h = symmetric_sums(row, n);
  auto g_td = [&](int t, int d) {
    detail::KahanSum acc;
    for (int l = d; l <= std::min(t + d, n); ++l) {
      const double term = detail::binom(l, d) * h[static_cast<std::size_t>(l)];
      acc.add((l - d) % 2 == 0 ? term : -term);
    }
    return double(acc.sum);
  };
  auto onset = [&](int parity) {
    for (int t = parity; t <= n - 2; t += 2) {
      bool ok = true;
      for (int d = 0; d <= k - 1 && ok; ++d) {
        const double a = g_td(t, d);
        const double b = g_td(t + 2, d);
        if (parity == 1 ? (a > b + 1e-12) : (a < b - 1e-12)) ok = false;
      }
      if (ok) return t;
    }
    return n;  // degenerate short rows
  };
  out.t_min_odd = onset(1);
  out.t_min_even = onset(0);
  return out;
}

/// Regularized incomplete beta I_q(a,b) by continued fraction (Lentz),
/// with the symmetry transform applied when q is past the mean.
inline double regularized_incomplete_beta(double a, double b, double q) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("regularized_incomplete_beta: a, b must be positive");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::domain_error("regularized_incomplete_beta: q outside [0,1]");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;

  if (q > (a + 1.0) / (a + b + 2.0))
    return 1.0 - regularized_incomplete_beta(b, a, 1.0 - q);

  const double ln_front = a * std::log(q) + b * std::log1p(-q) -
                          (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  const double front = std::exp(ln_front) / a;

  // Lentz's algorithm for the standard continued fraction; the i-th partial
  // numerator alternates between the odd and even coefficient families.
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * q / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  const int cap = 300;
  for (int m = 1; m <= cap; ++m) {
    const double m2 = 2.0 * m;
    double numerator = m * (b - m) * q / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + numerator * d;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < tiny) c = tiny;
    f *= c * d;
    numerator = -(a + m) * (a + b + m) * q / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + numerator * d;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < tiny) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-14) return std::clamp(front * f, 0.0, 1.0);
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

/// P[Binomial(d, p) >= k] = I_p(k, d-k+1); 0 when d < k.
inline double binomial_tail(int d, int k, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_tail: p outside [0,1]");
  if (k <= 0) return 1.0;
  if (d < k) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return regularized_incomplete_beta(double(k), double(d - k + 1), p);
}

/// Smallest d in [k, n] with P[Binomial(d, p) >= k] >= 1 - eps, by binary
/// search on the monotone tail; absent when even d = n falls short.
inline std::optional<int> min_cover_count(int k, double p, double eps, int n) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("min_cover_count: p outside (0,1]");
  if (k < 1) return 0;
  if (n < k) return std::nullopt;
  const double target = 1.0 - eps;
  if (binomial_tail(n, k, p) < target) return std::nullopt;
  int lo = k, hi = n;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (binomial_tail(mid, k, p) >= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

/// Markov-inequality lower bound on the selection count of any feasible x.
inline int markov_lower_bound(int k, double p, double eps) {
  if (!(p > 0.0)) throw std::domain_error("markov_lower_bound: p must be positive");
  const double v = double(k) * (1.0 - eps) / p;
  const int m = static_cast<int>(std::ceil(v - 1e-9));
  return std::max(k, m);
}

}  // namespace ccsmcp
