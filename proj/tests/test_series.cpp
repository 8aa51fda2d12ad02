#include "doctest.h"

#include <cmath>

#include "eoslab/errors.hpp"
#include "eoslab/power_series.hpp"
#include "oracles.hpp"

using namespace eoslab;

TEST_CASE("power series arithmetic") {
  const PowerSeries x = PowerSeries::variable(6);
  const PowerSeries one = PowerSeries::constant(6, 1.0);
  const PowerSeries geometric = exp(-log(one - x));  // 1 / (1 - x)
  for (int k = 0; k <= 6; ++k) CHECK(geometric[k] == doctest::Approx(1.0).epsilon(1e-14));
  const PowerSeries e = exp(x);
  double fact = 1.0;
  for (int k = 0; k <= 6; ++k) {
    CHECK(e[k] == doctest::Approx(1.0 / fact).epsilon(1e-14));
    fact *= k + 1;
  }
  const PowerSeries r = sqrt(one + x);
  const PowerSeries sq = r * r;
  CHECK(sq[0] == doctest::Approx(1.0));
  CHECK(sq[1] == doctest::Approx(1.0));
  for (int k = 2; k <= 6; ++k) CHECK(std::abs(sq[k]) < 1e-14);
  CHECK(e.evaluate(0.1) == doctest::Approx(std::exp(0.1)).epsilon(1e-9));
  CHECK((x * x).truncated(1).max_order() == 1);
  CHECK_THROWS_AS(log(x), DomainError);
  CHECK_THROWS_AS(e.compose(e), DomainError);
  // exp(x) composed with 2x is exp(2x).
  const PowerSeries twice = e.compose(2.0 * x);
  CHECK(twice[3] == doctest::Approx(8.0 / 6.0));
}

TEST_CASE("splitting series: leading coefficients") {
  for (std::int64_t n : {1, 2, 7, 40, 1000}) {
    for (std::int64_t dn = -n; dn <= n; dn += 2) {
      const PowerSeries s = series_of_splitting(n, dn, 4);
      CHECK(s[0] == 1.0);
      CHECK(s[1] == doctest::Approx(2.0 * dn).epsilon(1e-14));
      CHECK(s[2] == doctest::Approx(2.0 * dn * dn - 2.0 * n).epsilon(1e-13).scale(1.0));
    }
  }
  CHECK_THROWS_AS(series_of_splitting(3, 0, 4), DomainError);
  CHECK_THROWS_AS(series_of_splitting(3, 5, 4), DomainError);
}

TEST_CASE("splitting series agrees with exact differentiation to every order") {
  const int K = 12;
  for (auto [n, dn] : std::vector<std::pair<int, int>>{{1, 1}, {4, 0}, {9, -3}, {30, 12}, {500, 40}, {2000, -64}}) {
    const auto exact = oracle::exact_ratio_series(n, dn, K);
    const PowerSeries s = series_of_splitting(n, dn, K);
    const SplittingPolynomials poly(K);
    for (int k = 0; k <= K; ++k) {
      const double e = static_cast<double>(exact[static_cast<std::size_t>(k)]);
      const double scale = std::max(1.0, std::abs(e));
      CHECK(std::abs(s[k] - e) <= 1e-11 * scale);
      CHECK(std::abs(poly.evaluate(k, dn, n) - e) <= 1e-11 * scale);
    }
  }
}

TEST_CASE("splitting polynomials: structure") {
  const SplittingPolynomials p(10);
  CHECK(p.max_order() == 10);
  CHECK(p.max_n_power() == 5);
  CHECK(p.coefficient(1, 1, 0) == doctest::Approx(2.0));
  CHECK(p.coefficient(2, 2, 0) == doctest::Approx(2.0));
  CHECK(p.coefficient(2, 0, 1) == doctest::Approx(-2.0));
  for (int k = 0; k <= 10; ++k) {
    for (const auto& t : p.terms(k)) {
      CHECK(t.dn_power + 2 * t.n_power <= k);
      // alpha_k flips sign with dn exactly when k is odd.
      CHECK((t.dn_power % 2) == (k % 2));
      CHECK(t.coefficient != 0.0);
    }
  }
}

TEST_CASE("splitting exponents are odd and even") {
  const auto e = splitting_exponents(9);
  for (int k = 0; k <= 9; k += 2) CHECK(e.odd[k] == 0.0);
  for (int k = 1; k <= 9; k += 2) CHECK(e.even[k] == 0.0);
  CHECK(e.odd[1] == doctest::Approx(2.0));
  CHECK(e.even[2] == doctest::Approx(-2.0));
}
