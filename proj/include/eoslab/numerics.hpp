#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace eoslab::numerics {

/// Largest photon number for which binomial weights use exact log-gamma;
/// above it the Gaussian (Stirling) form is used.
inline constexpr std::int64_t kExactBinomialLimit = 10'000;

/// Natural log of C(n, k). Throws DomainError unless 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

/// Gaussian approximation of C(n, (n+dn)/2) 2^-n, valid for |dn| << n.
double gaussian_binomial_approx(std::int64_t n, double delta_n);

/// ln[C(n, (n+dn)/2) 2^-n], the balanced-splitter probability of a count
/// difference dn. Exact up to kExactBinomialLimit, Gaussian form above.
/// Returns -infinity for |dn| > n or a parity mismatch.
double log_balanced_split(std::int64_t n, std::int64_t delta_n);

/// Laguerre polynomial L_m(x) by the three-term recurrence.
double laguerre(int m, double x);

/// Sum_m weights[m - first] * (-1)^m L_m(x) e^{-x/2}, for m in
/// [first, first + weights.size()).
///
/// The recurrence runs on rescaled values with a separate log-magnitude so that
/// neither L_m(x) nor e^{-x/2} has to be representable on its own.
double alternating_laguerre_sum(std::span<const double> weights, std::int64_t first, double x);

/// alternating_laguerre_sum at several arguments in one pass over the weights.
void alternating_laguerre_sums(std::span<const double> weights, std::int64_t first,
                               std::span<const double> xs, std::span<double> out);

/// Adaptive Gauss-Kronrod integral of f over [a, b].
/// Throws NumericalError when the error estimate stays above the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 0.0);

/// First-order Euler-Maclaurin estimate of sum_{n=a}^{b} f(n):
/// (f(a) + f(b)) / 2 + integral_a^b f.
double euler_maclaurin_sum(const std::function<double(double)>& f, std::int64_t a, std::int64_t b);

/// Cached ln(n!) for n in [0, size).
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::size_t size = 0);

  void reserve_up_to(std::int64_t n);
  double operator()(std::int64_t n) const { return table_[static_cast<std::size_t>(n)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(table_.size()); }

 private:
  std::vector<double> table_;
};

}  // namespace eoslab::numerics
