#include "eoslab/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "eoslab/errors.hpp"

namespace eoslab::numerics {

double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("log_binomial: need 0 <= k <= n, got n=" + std::to_string(n) +
                      ", k=" + std::to_string(k));
  }
  k = std::min(k, n - k);
  if (k == 0) return 0.0;
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double gaussian_binomial_approx(std::int64_t n, double delta_n) {
  if (n < 1) throw DomainError("gaussian_binomial_approx: n must be >= 1");
  const auto nd = static_cast<double>(n);
  return std::sqrt(2.0 / (nd * std::numbers::pi)) * std::exp(-delta_n * delta_n / (2.0 * nd));
}

double log_balanced_split(std::int64_t n, std::int64_t delta_n) {
  if (n < 0 || std::abs(delta_n) > n || ((n + delta_n) & 1) != 0) {
    return -std::numeric_limits<double>::infinity();
  }
  if (n > kExactBinomialLimit) {
    const auto nd = static_cast<double>(n);
    const auto dn = static_cast<double>(delta_n);
    return 0.5 * std::log(2.0 / (nd * std::numbers::pi)) - dn * dn / (2.0 * nd);
  }
  return log_binomial(n, (n + delta_n) / 2) - static_cast<double>(n) * std::numbers::ln2;
}

double laguerre(int m, double x) {
  if (m < 0) throw DomainError("laguerre: order must be >= 0");
  if (m == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 - x;
  for (int k = 1; k < m; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

constexpr double kLaguerreBig = 1e150;

// Runs the Laguerre recurrence for `lanes` arguments in lockstep. L_m(x) is held
// as value * exp(log_scale), with the e^{-x/2} envelope folded into the scale;
// once exp(log_scale) underflows, a term is below 1e150 * e^-745 and is dropped.
template <int kLanes>
void laguerre_block(std::span<const double> weights, std::int64_t first, const double* xs, int lanes,
                    double* out) {
  const double log_big = std::log(kLaguerreBig);
  const std::int64_t last = first + static_cast<std::int64_t>(weights.size()) - 1;
  double x[kLanes], log_scale[kLanes], factor[kLanes], prev[kLanes], cur[kLanes], sum[kLanes];
  for (int l = 0; l < kLanes; ++l) {
    x[l] = l < lanes ? xs[l] : 0.0;
    log_scale[l] = -0.5 * x[l];
    factor[l] = std::exp(log_scale[l]);
    prev[l] = 0.0;
    cur[l] = 1.0;
    sum[l] = 0.0;
  }
  if (first == 0) {
    for (int l = 0; l < kLanes; ++l) sum[l] = weights[0] * factor[l];
  }
  for (std::int64_t m = 0; m < last; ++m) {
    const auto md = static_cast<double>(m);
    const double inv = 1.0 / (md + 1.0);
    const double two_m_plus_one = 2.0 * md + 1.0;
    for (int l = 0; l < kLanes; ++l) {
      const double next = ((two_m_plus_one - x[l]) * cur[l] - md * prev[l]) * inv;
      prev[l] = cur[l];
      cur[l] = next;
    }
    // Four steps grow |L_m| by less than 1e100 for the arguments in use, so
    // checking every fourth step keeps the scaled values finite.
    if ((m & 3) == 3) {
      for (int l = 0; l < kLanes; ++l) {
        if (std::abs(cur[l]) > kLaguerreBig) {
          cur[l] /= kLaguerreBig;
          prev[l] /= kLaguerreBig;
          log_scale[l] += log_big;
          factor[l] = std::exp(log_scale[l]);
        }
      }
    }
    if (m + 1 >= first) {
      const double w = weights[static_cast<std::size_t>(m + 1 - first)];
      const double signed_w = ((m + 1) & 1) != 0 ? -w : w;
      for (int l = 0; l < kLanes; ++l) sum[l] += signed_w * cur[l] * factor[l];
    }
  }
  for (int l = 0; l < lanes; ++l) out[l] = sum[l];
}

}  // namespace

double alternating_laguerre_sum(std::span<const double> weights, std::int64_t first, double x) {
  if (weights.empty()) return 0.0;
  double out = 0.0;
  laguerre_block<1>(weights, first, &x, 1, &out);
  return out;
}

void alternating_laguerre_sums(std::span<const double> weights, std::int64_t first,
                               std::span<const double> xs, std::span<double> out) {
  if (out.size() != xs.size()) throw DomainError("alternating_laguerre_sums: size mismatch");
  if (weights.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  constexpr int kLanes = 8;
  for (std::size_t i = 0; i < xs.size(); i += kLanes) {
    const int lanes = static_cast<int>(std::min<std::size_t>(kLanes, xs.size() - i));
    laguerre_block<kLanes>(weights, first, xs.data() + i, lanes, out.data() + i);
  }
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 30, rel_tol, &error, &l1);
  if (!std::isfinite(value) || error > std::max(rel_tol * l1, abs_tol) * 10.0) {
    throw NumericalError("integrate: no convergence on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "], error estimate " + std::to_string(error));
  }
  return value;
}

double euler_maclaurin_sum(const std::function<double(double)>& f, std::int64_t a, std::int64_t b) {
  if (a > b) throw DomainError("euler_maclaurin_sum: need a <= b");
  const auto ad = static_cast<double>(a);
  const auto bd = static_cast<double>(b);
  if (a == b) return f(ad);
  return 0.5 * (f(ad) + f(bd)) + integrate(f, ad, bd, 1e-10);
}

LogFactorialTable::LogFactorialTable(std::size_t size) {
  reserve_up_to(static_cast<std::int64_t>(size) - 1);
}

void LogFactorialTable::reserve_up_to(std::int64_t n) {
  if (n < size()) return;
  const auto old = table_.size();
  table_.resize(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = old; i < table_.size(); ++i) {
    table_[i] = std::lgamma(static_cast<double>(i) + 1.0);
  }
}

}  // namespace eoslab::numerics
