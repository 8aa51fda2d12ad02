#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace eoslab {

/// Default truncation order for moment expansions.
inline constexpr int kDefaultMaxOrder = 8;

/// Real power series truncated at a fixed order. All arithmetic keeps the
/// order of the left operand; coefficients beyond it are dropped.
class PowerSeries {
 public:
  explicit PowerSeries(int max_order);
  PowerSeries(int max_order, std::initializer_list<double> coefficients);

  static PowerSeries constant(int max_order, double value);
  /// The expansion variable itself, x.
  static PowerSeries variable(int max_order);

  int max_order() const { return static_cast<int>(coefficients_.size()) - 1; }
  double operator[](int k) const { return coefficients_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return coefficients_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& coefficients() const { return coefficients_; }

  PowerSeries truncated(int order) const;
  double evaluate(double x) const;

  PowerSeries& operator+=(const PowerSeries& other);
  PowerSeries& operator-=(const PowerSeries& other);
  PowerSeries& operator*=(double scale);

  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
  friend PowerSeries operator*(PowerSeries a, double s) { return a *= s; }
  friend PowerSeries operator*(double s, PowerSeries a) { return a *= s; }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  PowerSeries operator-() const { return *this * -1.0; }

  /// f(inner(x)); requires inner[0] == 0.
  PowerSeries compose(const PowerSeries& inner) const;

 private:
  std::vector<double> coefficients_;
};

PowerSeries exp(const PowerSeries& s);
/// Requires s[0] > 0.
PowerSeries log(const PowerSeries& s);
/// Requires s[0] > 0.
PowerSeries sqrt(const PowerSeries& s);

/// Taylor series in the field parameter eps of P(dn; n, eps) / P(dn; n, 0)
/// for the nonlinear beamsplitter, up to order K. Coefficient k equals
/// alpha_k(n, dn) / alpha_0(n, dn).
///
/// Built as exp(dn * T(eps) + n * U(eps)) with T = atanh(s), U = log(1 - s^2) / 2
/// and s = 2 eps sqrt(1 - eps^2).
PowerSeries series_of_splitting(std::int64_t n, std::int64_t delta_n, int K);

/// The odd (T) and even (U) exponent series of series_of_splitting.
struct SplittingExponents {
  PowerSeries odd;   // multiplies dn
  PowerSeries even;  // multiplies n
};
SplittingExponents splitting_exponents(int K);

/// alpha_k / alpha_0 written as bivariate polynomials in (dn, n):
///   alpha_k / alpha_0 = sum_{i,j} c[k][i][j] dn^i n^j.
/// Only i + 2 j <= k terms are non-zero.
class SplittingPolynomials {
 public:
  explicit SplittingPolynomials(int K);

  int max_order() const { return K_; }
  /// Highest power of n present in any order.
  int max_n_power() const { return K_ / 2; }
  double coefficient(int k, int i, int j) const;
  double evaluate(int k, double delta_n, double n) const;

  struct Term {
    int dn_power;
    int n_power;
    double coefficient;
  };
  /// Non-zero terms of order k.
  const std::vector<Term>& terms(int k) const { return terms_[static_cast<std::size_t>(k)]; }

 private:
  int K_;
  // [k][i][j], dense (K+1)^3 storage.
  std::vector<double> dense_;
  std::vector<std::vector<Term>> terms_;
};

}  // namespace eoslab
