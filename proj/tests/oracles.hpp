#pragma once

// Reference implementations that share no code with the library.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

// C(n, up) p^up (1-p)^down with p = (1 + s) / 2 and s = 2 eps sqrt(1 - eps^2),
// straight from the binomial law in long double.
inline long double splitter_pmf(std::int64_t dn, std::int64_t n, long double eps) {
  if (dn < -n || dn > n || ((n + dn) & 1) != 0) return 0.0L;
  const std::int64_t up = (n + dn) / 2;
  const std::int64_t down = n - up;
  const long double s = 2.0L * eps * std::sqrt(1.0L - eps * eps);
  const long double p = 0.5L * (1.0L + s);
  const long double q = 0.5L * (1.0L - s);
  long double log_c = std::lgamma(static_cast<long double>(n) + 1.0L) -
                      std::lgamma(static_cast<long double>(up) + 1.0L) -
                      std::lgamma(static_cast<long double>(down) + 1.0L);
  long double lp = up ? static_cast<long double>(up) * std::log(p) : 0.0L;
  long double lq = down ? static_cast<long double>(down) * std::log(q) : 0.0L;
  if ((up && p == 0.0L) || (down && q == 0.0L)) return 0.0L;
  return std::exp(log_c + lp + lq);
}

// Full pmf over dn = -n..n (index dn + n) by the multiplicative recurrence of
// the binomial in the number of up-counts.
inline void splitter_row(std::int64_t n, double eps, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
  const double s = 2.0 * eps * std::sqrt(1.0 - eps * eps);
  const double p = 0.5 * (1.0 + s);
  const double q = 0.5 * (1.0 - s);
  // Start at the mode to stay well scaled.
  const auto k0 = static_cast<std::int64_t>(std::floor((static_cast<double>(n) + 1.0) * p));
  const std::int64_t mode = std::clamp<std::int64_t>(k0, 0, n);
  const double log_mode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(n - mode + 1.0) +
                          (mode ? mode * std::log(p) : 0.0) + (n - mode ? (n - mode) * std::log(q) : 0.0);
  double v = std::exp(log_mode);
  for (std::int64_t k = mode; k <= n; ++k) {
    out[static_cast<std::size_t>(2 * k)] = v;
    v *= static_cast<double>(n - k) / static_cast<double>(k + 1) * (p / q);
  }
  v = std::exp(log_mode);
  for (std::int64_t k = mode - 1; k >= 0; --k) {
    v *= static_cast<double>(k + 1) / static_cast<double>(n - k) * (q / p);
    out[static_cast<std::size_t>(2 * k)] = v;
  }
}

// sum_n P(n) P(dn | n, eps) for a deterministic field.
inline std::map<std::int64_t, long double> enumerate_fixed_field(const std::vector<double>& weights,
                                                                 std::int64_t first, double eps) {
  std::map<std::int64_t, long double> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::int64_t n = first + static_cast<std::int64_t>(i);
    for (std::int64_t dn = -n; dn <= n; dn += 2) out[dn] += weights[i] * splitter_pmf(dn, n, eps);
  }
  return out;
}

// Monte Carlo of the dn distribution with the field drawn from `field`. Photon
// numbers are stratified: each n gets a share of the samples proportional to
// P(n) and its sample mean is weighted by P(n) exactly.
template <class FieldSampler>
std::map<std::int64_t, double> monte_carlo(const std::vector<double>& weights, std::int64_t first,
                                           std::int64_t samples, std::uint64_t seed, FieldSampler field) {
  std::mt19937_64 rng(seed);
  std::map<std::int64_t, double> out;
  std::vector<double> row;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const std::int64_t n = first + static_cast<std::int64_t>(i);
    const auto count = std::max<std::int64_t>(1, std::llround(weights[i] * static_cast<double>(samples)));
    std::vector<double> acc(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (std::int64_t s = 0; s < count; ++s) {
      splitter_row(n, field(rng), row);
      for (std::size_t j = 0; j < row.size(); ++j) acc[j] += row[j];
    }
    for (std::int64_t dn = -n; dn <= n; ++dn) {
      out[dn] += weights[i] * acc[static_cast<std::size_t>(dn + n)] / static_cast<double>(count);
    }
  }
  return out;
}

// Coefficients of the degree (nodes - 1) interpolating polynomial of
// (1 + s)^up (1 - s)^down, the splitter pmf relative to its balanced value,
// through the given eps nodes. 50-digit arithmetic.
inline std::vector<Big> interpolated_ratio_series(std::int64_t n, std::int64_t dn, const std::vector<double>& nodes) {
  const std::size_t N = nodes.size();
  const std::int64_t up = (n + dn) / 2;
  const std::int64_t down = n - up;
  std::vector<std::vector<Big>> A(N, std::vector<Big>(N + 1));
  for (std::size_t r = 0; r < N; ++r) {
    const Big e = Big(nodes[r]);
    const Big s = 2 * e * sqrt(1 - e * e);
    Big x = 1;
    for (std::size_t c = 0; c < N; ++c) {
      A[r][c] = x;
      x *= e;
    }
    A[r][N] = pow(1 + s, up) * pow(1 - s, down);
  }
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < N; ++r) {
      if (abs(A[r][c]) > abs(A[pivot][c])) pivot = r;
    }
    std::swap(A[c], A[pivot]);
    for (std::size_t r = 0; r < N; ++r) {
      if (r == c) continue;
      const Big f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= N; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<Big> coeffs(N);
  for (std::size_t c = 0; c < N; ++c) coeffs[c] = A[c][N] / A[c][c];
  return coeffs;
}

// Derivatives at eps = 0 of the same ratio, by exact series arithmetic in
// 50 digits: log ratio = up log(1 + s) + down log(1 - s), s(eps) expanded.
inline std::vector<Big> exact_ratio_series(std::int64_t n, std::int64_t dn, int K) {
  const std::size_t M = static_cast<std::size_t>(K) + 1;
  auto mul = [&](const std::vector<Big>& a, const std::vector<Big>& b) {
    std::vector<Big> c(M, Big(0));
    for (std::size_t i = 0; i < M; ++i) {
      for (std::size_t j = 0; i + j < M; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  // sqrt(1 - e^2) = sum binom(1/2, k) (-e^2)^k
  std::vector<Big> root(M, Big(0));
  Big c = 1;
  for (std::size_t k = 0; 2 * k < M; ++k) {
    root[2 * k] = (k % 2 ? -c : c);
    c = c * (Big(1) / 2 - Big(static_cast<int>(k))) / Big(static_cast<int>(k) + 1);
  }
  std::vector<Big> e(M, Big(0));
  if (M > 1) e[1] = 2;
  const std::vector<Big> s = mul(e, root);
  // log(1 + x) and log(1 - x) for x = s (s has no constant term).
  std::vector<Big> lp(M, Big(0)), lm(M, Big(0)), power = s;
  for (int k = 1; k < static_cast<int>(M); ++k) {
    for (std::size_t i = 0; i < M; ++i) {
      lp[i] += (k % 2 ? power[i] : -power[i]) / k;
      lm[i] -= power[i] / k;
    }
    power = mul(power, s);
  }
  std::vector<Big> L(M, Big(0));
  for (std::size_t i = 0; i < M; ++i) L[i] = Big(static_cast<double>((n + dn) / 2)) * lp[i] + Big(static_cast<double>(n - (n + dn) / 2)) * lm[i];
  // exp of a series without constant term.
  std::vector<Big> out(M, Big(0)), term(M, Big(0));
  term[0] = 1;
  for (int k = 0; k < static_cast<int>(M); ++k) {
    for (std::size_t i = 0; i < M; ++i) out[i] += term[i];
    term = mul(term, L);
    for (auto& t : term) t /= (k + 1);
  }
  return out;
}

inline double vacuum_wigner(double r) { return 2.0 / std::numbers::pi * std::exp(-2.0 * r * r); }
inline double fock1_wigner(double r) { return 2.0 / std::numbers::pi * (4.0 * r * r - 1.0) * std::exp(-2.0 * r * r); }
inline double thermal_wigner(double nu, double r) {
  const double w = 2.0 * nu + 1.0;
  return 2.0 / (std::numbers::pi * w) * std::exp(-2.0 * r * r / w);
}

// 2 pi int r max(0, -W) dr on a fine fixed grid (midpoint rule).
template <class F>
double radial_negativity(F w, double r_max, int steps) {
  const double h = r_max / steps;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double r = (i + 0.5) * h;
    acc += std::max(0.0, -w(r)) * r;
  }
  return 2.0 * std::numbers::pi * acc * h;
}

}  // namespace oracle
