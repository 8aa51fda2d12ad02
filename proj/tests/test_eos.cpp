#include "doctest.h"

#include <cmath>
#include <random>

#include "eoslab/eos.hpp"
#include "eoslab/errors.hpp"
#include "oracles.hpp"

using namespace eoslab;

namespace {

double tv_against(const DeltaNDistribution& d, const std::map<std::int64_t, long double>& ref) {
  long double sum = 0.0L;
  std::map<std::int64_t, long double> diff(ref);
  for (auto& [dn, p] : diff) p = -p;
  for (std::size_t g = 0; g < d.grid.size(); ++g) diff[d.grid[g]] += d.probabilities[g];
  for (const auto& [dn, p] : diff) sum += std::abs(p);
  return static_cast<double>(0.5L * sum);
}

double tv_against(const DeltaNDistribution& d, const std::map<std::int64_t, double>& ref) {
  std::map<std::int64_t, long double> r;
  for (const auto& [dn, p] : ref) r[dn] = p;
  return tv_against(d, r);
}

std::vector<PhotonDistribution> small_probes() {
  return {coherent_dist(20.0), thermal_dist(xi_from_mean(5.0)), fock_dist(10),
          bcs_dist(xi_from_mean(5.0), BandScheme({Band{4, 9}}))};
}

}  // namespace

TEST_CASE("nonlinear beamsplitter probabilities") {
  CHECK(nlbs_prob(0, 2, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(nlbs_prob(2, 2, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(nlbs_prob(-2, 2, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  for (std::int64_t n : {1, 6, 31}) CHECK(nlbs_prob(n, n, kMaxMonotoneEps) == doctest::Approx(1.0).epsilon(1e-14));
  for (double eps : {0.0, 0.1, -0.4}) CHECK(nlbs_prob(1, 2, eps) == 0.0);
  CHECK(nlbs_prob(9, 7, 0.1) == 0.0);
  CHECK_THROWS_AS(nlbs_prob(0, 2, 1.1), DomainError);
  for (std::int64_t n : {3, 40, 2500}) {
    for (double eps : {-0.3, 0.0, 0.001, 0.2}) {
      for (std::int64_t dn = -n; dn <= n; dn += std::max<std::int64_t>(2, 2 * (n / 20))) {
        const double ref = static_cast<double>(oracle::splitter_pmf(dn, n, eps));
        CHECK(nlbs_prob(dn, n, eps) == doctest::Approx(ref).epsilon(1e-11).scale(1e-300));
      }
    }
  }
}

TEST_CASE("zero signal reproduces the balanced binomial") {
  const auto d = eos_distribution(fock_dist(2), vacuum_moments(0.0, 4), 4);
  for (std::size_t g = 0; g < d.grid.size(); ++g) {
    const std::int64_t dn = d.grid[g];
    const double expected = dn == 0 ? 0.5 : (std::abs(dn) == 2 ? 0.25 : 0.0);
    CHECK(d.probabilities[g] == doctest::Approx(expected).epsilon(1e-15));
  }
  const auto t = susceptibilities(coherent_dist(300.0), 6);
  const auto none = combine(t, vacuum_moments(0.0, 6), 6);
  CHECK(none.probabilities == t.chi(0));
  // An order-0 table carries the same no-signal distribution on its own grid,
  // up to its narrower window far in the tails.
  const auto k0 = susceptibilities(coherent_dist(300.0), 0);
  for (std::size_t g = 0; g < k0.grid().size(); ++g) {
    const auto i = static_cast<std::size_t>(k0.grid()[g] - t.grid().front());
    CHECK(std::abs(k0.chi(0)[g] - t.chi(0)[i]) <= 1e-14 * t.chi(0)[i] + 1e-20);
  }
}

TEST_CASE("deterministic field matches exact enumeration") {
  const int K = 12;
  for (const auto& probe : small_probes()) {
    for (double eps : {0.002, -0.01}) {
      const auto d = eos_distribution(probe, classical_field_moments(eps, K), K);
      const auto ref = oracle::enumerate_fixed_field(probe.weights(), probe.support_min(), eps);
      CAPTURE(probe.descriptor());
      CHECK(tv_against(d, ref) < 1e-8);
    }
  }
}

TEST_CASE("vacuum field matches a stratified Monte Carlo") {
  const int K = 12;
  const double g = 0.02;
  const auto probe = coherent_dist(20.0);
  const auto d = eos_distribution(probe, vacuum_moments(g, K), K);
  std::normal_distribution<double> field(0.0, g);
  const auto mc = oracle::monte_carlo(probe.weights(), probe.support_min(), 1'000'000, 7,
                                      [&](std::mt19937_64& rng) { return field(rng); });
  CHECK(tv_against(d, mc) < 1e-3);
}

TEST_CASE("first moment follows the linear susceptibility") {
  const int K = 8;
  const double m1 = 0.01;
  const auto probe = coherent_dist(100.0);
  const auto d = eos_distribution(probe, classical_field_moments(m1, K), K);
  const auto ref = oracle::enumerate_fixed_field(probe.weights(), probe.support_min(), m1);
  double mean = 0.0;
  long double ref_mean = 0.0L;
  for (std::size_t g = 0; g < d.grid.size(); ++g) mean += static_cast<double>(d.grid[g]) * d.probabilities[g];
  for (const auto& [dn, p] : ref) ref_mean += static_cast<long double>(dn) * p;
  CHECK(mean == doctest::Approx(static_cast<double>(ref_mean)).epsilon(1e-9));
  CHECK(mean == doctest::Approx(2.0 * 100.0 * m1).epsilon(1e-3));
}

TEST_CASE("susceptibility table structure") {
  const int K = 8;
  const auto probe = coherent_dist(1000.0);
  const auto t = susceptibilities(probe, K);
  const auto& grid = t.grid();
  REQUIRE(grid.size() % 2 == 1);
  CHECK(grid[grid.size() / 2] == 0);
  const auto none = eos_distribution(probe, vacuum_moments(0.0, K), K);
  CHECK(none.probabilities == t.chi(0));
  CHECK(none.total() == doctest::Approx(1.0).epsilon(1e-12));
  const std::size_t G = grid.size();
  for (int k = 0; k <= K; ++k) {
    const double scale = t.peak_abs(k);
    for (std::size_t g = 0; g < G; ++g) {
      const double mirrored = t.chi(k)[G - 1 - g];
      CHECK(std::abs(t.chi(k)[g] - (k % 2 ? -mirrored : mirrored)) <= 1e-12 * scale);
    }
    const auto norm = t.normalized(k);
    double m = 0.0;
    for (double v : norm) m = std::max(m, std::abs(v));
    CHECK(m == doctest::Approx(1.0));
  }
  // Reconstruction of the combined distribution.
  const auto signal = cat_moments(kDefaultCatAlpha, 0.003, K);
  const auto d = combine(t, signal, K);
  for (std::size_t g = 0; g < G; ++g) {
    double acc = 0.0;
    for (int k = 0; k <= K; ++k) acc += t.chi(k)[g] * signal[k];
    CHECK(std::abs(acc - d.probabilities[g]) < 1e-10);
  }
  CHECK(std::string(SusceptibilityTable::kCouplingConvention) == "raw");
}

TEST_CASE("D curves: zero, parity, normalization") {
  const int K = 16;
  for (const auto& probe : {coherent_dist(1000.0), thermal_dist(xi_from_mean(1000.0)), fock_dist(3000),
                            bcs_dist(xi_from_mean(1000.0), BandScheme::upper(6000))}) {
    CAPTURE(probe.descriptor());
    const auto t = susceptibilities(probe, K);
    const auto zero = d_curve(t, vacuum_moments(0.0, K), K);
    CHECK(d_max_abs(zero) == 0.0);
    CHECK(d_peak_to_peak(zero) == 0.0);
    for (const auto& signal : {vacuum_moments(0.0047, K), cat_moments(kDefaultCatAlpha, 0.0047 / std::sqrt(3.0), K)}) {
      const auto d = d_curve(t, signal, K);
      double sum = 0.0;
      for (double v : d.values) sum += v;
      CHECK(std::abs(sum) < 1e-8);
      const std::size_t G = d.values.size();
      for (std::size_t g = 0; g < G; ++g) CHECK(std::abs(d.values[g] - d.values[G - 1 - g]) < 1e-12);
    }
  }
}

TEST_CASE("peak-to-peak and distances") {
  CHECK(d_peak_to_peak(DCurve{{-1, 1}, {-0.02, 0.04}}) == doctest::Approx(0.06));
  CHECK(d_peak_to_peak(DCurve{{-1, 1}, {0.0, 0.06}}) == doctest::Approx(0.06));
  CHECK(d_max_abs(DCurve{{-1, 1}, {-0.05, 0.04}}) == doctest::Approx(0.05));
  CHECK(l1_distance(DCurve{{-1, 1}, {0.1, 0.2}}, DCurve{{-1, 1}, {0.0, 0.5}}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(l1_distance(DCurve{{-1, 1}, {0.1, 0.2}}, DCurve{{0, 1}, {0.0, 0.5}}), DomainError);
  CHECK_THROWS_AS(d_peak_to_peak(DCurve{}), DomainError);
}

TEST_CASE("truncation failures are reported") {
  const auto t = susceptibilities(coherent_dist(1000.0), 2);
  CHECK_THROWS_AS(combine(t, vacuum_moments(0.2, 2), 2), TruncationError);
  CHECK_THROWS_AS(combine(t, vacuum_moments(0.01, 4), 4), DomainError);
  CHECK_THROWS_AS(combine(t, vacuum_moments(0.01, 1), 2), DomainError);
}

TEST_CASE("results do not depend on the thread count") {
  const auto probe = bcs_dist(xi_from_mean(1000.0), BandScheme::upper(5000));
  EosOptions one;
  one.threads = 1;
  EosOptions four;
  four.threads = 4;
  const auto a = susceptibilities(probe, 10, one);
  const auto b = susceptibilities(probe, 10, four);
  for (int k = 0; k <= 10; ++k) CHECK(a.chi(k) == b.chi(k));
}

TEST_CASE("upper-tail tables equal tables of the conditioned probe") {
  const double xi = xi_from_mean(1000.0);
  const auto parent = thermal_dist(xi);
  const std::vector<std::int64_t> thresholds{0, 2500, 7000};
  const auto tables = upper_tail_susceptibilities(parent, thresholds, 8);
  REQUIRE(tables.size() == thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const auto direct = susceptibilities(bcs_dist(xi, BandScheme::upper(thresholds[i])), 8);
    const auto signal = vacuum_moments(0.0047, 8);
    const auto a = d_curve(tables[i], signal, 8);
    const auto b = d_curve(direct, signal, 8);
    // Grids may differ; compare on the shared range.
    std::map<std::int64_t, double> ref;
    for (std::size_t g = 0; g < b.grid.size(); ++g) ref[b.grid[g]] = b.values[g];
    for (std::size_t g = 0; g < a.grid.size(); ++g) {
      const auto it = ref.find(a.grid[g]);
      const double expected = it == ref.end() ? 0.0 : it->second;
      CHECK(std::abs(a.values[g] - expected) < 1e-9);
    }
  }
  CHECK_THROWS_AS(upper_tail_susceptibilities(parent, {parent.support_max() + 5}, 4), ConditioningError);
}

TEST_CASE("euler-maclaurin photon sum tracks the exact sum") {
  EosOptions em;
  em.photon_sum = PhotonSum::kEulerMaclaurin;
  const auto probe = coherent_dist(1000.0);
  const auto signal = vacuum_moments(0.0047, 6);
  const auto exact = d_curve(susceptibilities(probe, 6), signal, 6);
  const auto approx = d_curve(susceptibilities(probe, 6, em), signal, 6);
  REQUIRE(exact.grid == approx.grid);
  const double tolerance = 1e-3 * d_max_abs(exact);
  for (std::size_t g = 0; g < exact.grid.size(); ++g) CHECK(std::abs(exact.values[g] - approx.values[g]) < tolerance);
}

TEST_CASE("coarse graining") {
  const auto probe = coherent_dist(1000.0);
  const auto d = eos_distribution(probe, vacuum_moments(0.0047, 6), 6);
  CHECK(coarse_grain(d, 1).probabilities == d.probabilities);
  for (std::int64_t w : {2, 3, 10}) {
    const auto c = coarse_grain(d, w);
    CHECK(c.total() == doctest::Approx(d.total()).epsilon(1e-13));
    const std::size_t G = c.grid.size();
    for (std::size_t g = 0; g < G; ++g) {
      CHECK(c.grid[g] % w == 0);
      CHECK(c.grid[g] == -c.grid[G - 1 - g]);
      CHECK(std::abs(c.probabilities[g] - c.probabilities[G - 1 - g]) < 1e-15);
    }
  }
  CHECK_THROWS_AS(coarse_grain(d, 0), DomainError);
  CHECK(plotting_bin_width(1e6) == 20);
  CHECK(plotting_bin_width(1000.0) == 1);
}
