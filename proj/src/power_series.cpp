#include "eoslab/power_series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eoslab/errors.hpp"

namespace eoslab {

PowerSeries::PowerSeries(int max_order) {
  if (max_order < 0) throw DomainError("PowerSeries: negative order");
  coefficients_.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
}

PowerSeries::PowerSeries(int max_order, std::initializer_list<double> coefficients)
    : PowerSeries(max_order) {
  int k = 0;
  for (double c : coefficients) {
    if (k > max_order) break;
    (*this)[k++] = c;
  }
}

PowerSeries PowerSeries::constant(int max_order, double value) {
  PowerSeries s(max_order);
  s[0] = value;
  return s;
}

PowerSeries PowerSeries::variable(int max_order) {
  PowerSeries s(max_order);
  if (max_order >= 1) s[1] = 1.0;
  return s;
}

PowerSeries PowerSeries::truncated(int order) const {
  PowerSeries s(order);
  for (int k = 0; k <= std::min(order, max_order()); ++k) s[k] = (*this)[k];
  return s;
}

double PowerSeries::evaluate(double x) const {
  double acc = 0.0;
  for (int k = max_order(); k >= 0; --k) acc = acc * x + (*this)[k];
  return acc;
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& other) {
  for (int k = 0; k <= std::min(max_order(), other.max_order()); ++k) (*this)[k] += other[k];
  return *this;
}

PowerSeries& PowerSeries::operator-=(const PowerSeries& other) {
  for (int k = 0; k <= std::min(max_order(), other.max_order()); ++k) (*this)[k] -= other[k];
  return *this;
}

PowerSeries& PowerSeries::operator*=(double scale) {
  for (double& c : coefficients_) c *= scale;
  return *this;
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  const int K = a.max_order();
  PowerSeries out(K);
  for (int i = 0; i <= K; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j <= std::min(K - i, b.max_order()); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

PowerSeries PowerSeries::compose(const PowerSeries& inner) const {
  if (inner[0] != 0.0) throw DomainError("PowerSeries::compose: inner series must vanish at 0");
  const int K = max_order();
  // Horner in the series ring.
  PowerSeries acc = PowerSeries::constant(K, (*this)[K]);
  const PowerSeries x = inner.truncated(K);
  for (int k = K - 1; k >= 0; --k) {
    acc = acc * x;
    acc[0] += (*this)[k];
  }
  return acc;
}

PowerSeries exp(const PowerSeries& s) {
  const int K = s.max_order();
  PowerSeries out(K);
  out[0] = std::exp(s[0]);
  // r' = s' r  =>  k r_k = sum_j j s_j r_{k-j}
  for (int k = 1; k <= K; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * s[j] * out[k - j];
    out[k] = acc / k;
  }
  return out;
}

PowerSeries log(const PowerSeries& s) {
  if (!(s[0] > 0.0)) throw DomainError("log(PowerSeries): constant term must be positive");
  const int K = s.max_order();
  PowerSeries out(K);
  out[0] = std::log(s[0]);
  // s r' = s'  =>  k s_0 r_k = k s_k - sum_{j=1}^{k-1} j r_j s_{k-j}
  for (int k = 1; k <= K; ++k) {
    double acc = k * s[k];
    for (int j = 1; j < k; ++j) acc -= j * out[j] * s[k - j];
    out[k] = acc / (k * s[0]);
  }
  return out;
}

PowerSeries sqrt(const PowerSeries& s) {
  if (!(s[0] > 0.0)) throw DomainError("sqrt(PowerSeries): constant term must be positive");
  const int K = s.max_order();
  PowerSeries out(K);
  out[0] = std::sqrt(s[0]);
  // r^2 = s  =>  2 r_0 r_k = s_k - sum_{j=1}^{k-1} r_j r_{k-j}
  for (int k = 1; k <= K; ++k) {
    double acc = s[k];
    for (int j = 1; j < k; ++j) acc -= out[j] * out[k - j];
    out[k] = acc / (2.0 * out[0]);
  }
  return out;
}

SplittingExponents splitting_exponents(int K) {
  const PowerSeries eps = PowerSeries::variable(K);
  const PowerSeries one = PowerSeries::constant(K, 1.0);
  const PowerSeries s = 2.0 * eps * sqrt(one - eps * eps);
  const PowerSeries log_plus = log(one + s);
  const PowerSeries log_minus = log(one - s);
  return {0.5 * (log_plus - log_minus), 0.5 * (log_plus + log_minus)};
}

PowerSeries series_of_splitting(std::int64_t n, std::int64_t delta_n, int K) {
  if (n < 0 || std::abs(delta_n) > n) {
    throw DomainError("series_of_splitting: need |dn| <= n");
  }
  if (((n + delta_n) & 1) != 0) {
    throw DomainError("series_of_splitting: dn and n must have the same parity (n=" +
                      std::to_string(n) + ", dn=" + std::to_string(delta_n) + ")");
  }
  const auto [odd, even] = splitting_exponents(K);
  return exp(static_cast<double>(delta_n) * odd + static_cast<double>(n) * even);
}

namespace {

// Bivariate polynomial in (dn, n) with powers up to K each, dense.
struct Bivariate {
  int K;
  std::vector<double> c;
  explicit Bivariate(int K_) : K(K_), c(static_cast<std::size_t>((K_ + 1) * (K_ + 1)), 0.0) {}
  double& at(int i, int j) { return c[static_cast<std::size_t>(i * (K + 1) + j)]; }
  double at(int i, int j) const { return c[static_cast<std::size_t>(i * (K + 1) + j)]; }
};

Bivariate multiply(const Bivariate& a, const Bivariate& b) {
  Bivariate out(a.K);
  for (int i1 = 0; i1 <= a.K; ++i1)
    for (int j1 = 0; j1 <= a.K; ++j1) {
      const double x = a.at(i1, j1);
      if (x == 0.0) continue;
      for (int i2 = 0; i1 + i2 <= a.K; ++i2)
        for (int j2 = 0; j1 + j2 <= a.K; ++j2) out.at(i1 + i2, j1 + j2) += x * b.at(i2, j2);
    }
  return out;
}

}  // namespace

SplittingPolynomials::SplittingPolynomials(int K)
    : K_(K), dense_(static_cast<std::size_t>((K + 1) * (K + 1) * (K + 1)), 0.0), terms_(K + 1) {
  if (K < 0) throw DomainError("SplittingPolynomials: negative order");
  const auto [odd, even] = splitting_exponents(K);
  // Exponent coefficients L_j = dn * odd_j + n * even_j.
  std::vector<Bivariate> exponent(static_cast<std::size_t>(K) + 1, Bivariate(K));
  for (int j = 1; j <= K; ++j) {
    exponent[j].at(1, 0) = odd[j];
    exponent[j].at(0, 1) = even[j];
  }
  std::vector<Bivariate> r(static_cast<std::size_t>(K) + 1, Bivariate(K));
  r[0].at(0, 0) = 1.0;
  for (int k = 1; k <= K; ++k) {
    Bivariate acc(K);
    for (int j = 1; j <= k; ++j) {
      const Bivariate prod = multiply(exponent[j], r[k - j]);
      for (std::size_t idx = 0; idx < acc.c.size(); ++idx) acc.c[idx] += j * prod.c[idx];
    }
    for (double& v : acc.c) v /= k;
    r[k] = std::move(acc);
  }
  for (int k = 0; k <= K; ++k)
    for (int i = 0; i <= K; ++i)
      for (int j = 0; j <= K; ++j) {
        const double v = r[k].at(i, j);
        dense_[static_cast<std::size_t>((k * (K + 1) + i) * (K + 1) + j)] = v;
        if (v != 0.0) terms_[k].push_back({i, j, v});
      }
}

double SplittingPolynomials::coefficient(int k, int i, int j) const {
  if (k < 0 || k > K_ || i < 0 || i > K_ || j < 0 || j > K_) return 0.0;
  return dense_[static_cast<std::size_t>((k * (K_ + 1) + i) * (K_ + 1) + j)];
}

double SplittingPolynomials::evaluate(int k, double delta_n, double n) const {
  double acc = 0.0;
  for (const Term& t : terms(k)) {
    acc += t.coefficient * std::pow(delta_n, t.dn_power) * std::pow(n, t.n_power);
  }
  return acc;
}

}  // namespace eoslab
