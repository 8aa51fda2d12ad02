#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "eoslab/errors.hpp"
#include "eoslab/numerics.hpp"
#include "oracles.hpp"

using namespace eoslab::numerics;

TEST_CASE("log_binomial small cases") {
  CHECK(log_binomial(2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_binomial(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  for (std::int64_t n : {0, 1, 7, 1000, 123456}) CHECK(log_binomial(n, 0) == 0.0);
  CHECK_THROWS_AS(log_binomial(3, 4), eoslab::DomainError);
  CHECK_THROWS_AS(log_binomial(3, -1), eoslab::DomainError);
}

TEST_CASE("log_binomial matches multiprecision products") {
  for (auto [n, k] : std::vector<std::pair<int, int>>{{10, 3}, {50, 25}, {300, 17}, {2000, 999}}) {
    oracle::Big c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    CHECK(log_binomial(n, k) == doctest::Approx(static_cast<double>(log(c))).epsilon(1e-13));
  }
}

TEST_CASE("gaussian approximation of the balanced splitter") {
  const oracle::Big closed = sqrt(oracle::Big(2) / (100 * boost::math::constants::pi<oracle::Big>()));
  CHECK(gaussian_binomial_approx(100, 0.0) == doctest::Approx(static_cast<double>(closed)).epsilon(1e-15));
  const std::int64_t n = 1'000'000;
  const double exact = std::exp(log_binomial(n, n / 2) - static_cast<double>(n) * std::numbers::ln2);
  CHECK(std::abs(gaussian_binomial_approx(n, 0.0) / exact - 1.0) < 1e-5);
  for (double d : {2.0, 10.0, 300.0}) CHECK(gaussian_binomial_approx(n, d) == gaussian_binomial_approx(n, -d));
  CHECK_THROWS_AS(gaussian_binomial_approx(0, 0.0), eoslab::DomainError);
}

TEST_CASE("log_balanced_split: parity, range, symmetry") {
  CHECK(std::isinf(log_balanced_split(3, 0)));
  CHECK(std::isinf(log_balanced_split(3, 5)));
  CHECK(std::exp(log_balanced_split(2, 0)) == doctest::Approx(0.5));
  CHECK(std::exp(log_balanced_split(2, 2)) == doctest::Approx(0.25));
  for (std::int64_t n : {10, 501, 20000}) {
    for (std::int64_t d = n % 2; d < std::min<std::int64_t>(n, 200); d += 2) {
      CHECK(log_balanced_split(n, d) == log_balanced_split(n, -d));
    }
  }
  double total = 0.0;
  for (std::int64_t d = -400; d <= 400; d += 2) total += std::exp(log_balanced_split(400, d));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("laguerre values") {
  CHECK(laguerre(0, 3.7) == 1.0);
  CHECK(laguerre(1, 4.0) == doctest::Approx(-3.0));
  CHECK(laguerre(2, 2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
  for (double x : {0.1, 1.5, 7.0}) {
    CHECK(laguerre(3, x) == doctest::Approx((6.0 - 18.0 * x + 9.0 * x * x - x * x * x) / 6.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(laguerre(-1, 0.0), eoslab::DomainError);
}

TEST_CASE("alternating laguerre sum agrees with the direct sum where it is representable") {
  std::vector<double> w{0.1, 0.2, 0.3, 0.15, 0.25};
  for (std::int64_t first : {0, 3}) {
    for (double x : {0.0, 0.4, 2.5, 11.0}) {
      double direct = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const auto m = first + static_cast<std::int64_t>(i);
        direct += w[i] * (m % 2 ? -1.0 : 1.0) * laguerre(static_cast<int>(m), x) * std::exp(-x / 2);
      }
      CHECK(alternating_laguerre_sum(w, first, x) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("alternating laguerre sum survives huge orders and arguments") {
  // A single Fock weight: (-1)^m L_m(x) e^{-x/2} stays bounded by one.
  for (std::int64_t m : {1000, 20000}) {
    std::vector<double> w{1.0};
    for (double x : {0.0, 1.0, 4.0 * m, 4.0 * m + 10.0, 8.0 * m}) {
      const double v = alternating_laguerre_sum(w, m, x);
      CHECK(std::isfinite(v));
      CHECK(std::abs(v) <= 1.0 + 1e-10);
    }
    CHECK(alternating_laguerre_sum(w, m, 0.0) == doctest::Approx(m % 2 ? -1.0 : 1.0));
  }
}

TEST_CASE("batched laguerre sums equal the scalar routine") {
  std::vector<double> w(300);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-0.02 * static_cast<double>(i));
  std::vector<double> xs;
  for (int i = 0; i < 21; ++i) xs.push_back(0.37 * i * i);
  std::vector<double> out(xs.size());
  alternating_laguerre_sums(w, 40, xs, out);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(out[i] == doctest::Approx(alternating_laguerre_sum(w, 40, xs[i])).epsilon(1e-12).scale(1e-300));
  }
  std::vector<double> bad(xs.size() - 1);
  CHECK_THROWS_AS(alternating_laguerre_sums(w, 40, xs, bad), eoslab::DomainError);
}

TEST_CASE("integrate") {
  CHECK(integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(integrate([](double x) { return x * x * x; }, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("euler-maclaurin sums") {
  CHECK(euler_maclaurin_sum([](double) { return 2.5; }, 0, 10) == doctest::Approx(27.5));
  CHECK(euler_maclaurin_sum([](double x) { return x; }, 0, 40) == doctest::Approx(40.0 * 41.0 / 2.0));
  double exact = 0.0;
  for (int n = 0; n <= 100; ++n) exact += n * n;
  CHECK(std::abs(euler_maclaurin_sum([](double x) { return x * x; }, 0, 100) / exact - 1.0) < 1e-3);
  CHECK_THROWS_AS(euler_maclaurin_sum([](double x) { return x; }, 5, 4), eoslab::DomainError);
}

TEST_CASE("log factorial table") {
  LogFactorialTable t(10);
  t.reserve_up_to(500);
  CHECK(t.size() >= 501);
  CHECK(t(0) == 0.0);
  CHECK(t(5) == doctest::Approx(std::log(120.0)));
  CHECK(t(500) == doctest::Approx(std::lgamma(501.0)).epsilon(1e-14));
}
