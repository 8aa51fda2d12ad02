#include "eoslab/eos.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eoslab/errors.hpp"
#include "eoslab/numerics.hpp"
#include "eoslab/power_series.hpp"
#include "parallel.hpp"

namespace eoslab {

double nlbs_prob(std::int64_t delta_n, std::int64_t n, double eps) {
  if (!(std::abs(eps) <= 1.0)) throw DomainError("nlbs_prob: |eps| must be <= 1");
  if (n < 0 || std::abs(delta_n) > n || ((n + delta_n) & 1) != 0) return 0.0;
  const double s = 2.0 * eps * std::sqrt(1.0 - eps * eps);
  const double a2 = 0.5 * (1.0 + s);  // ((sqrt(1-eps^2) + eps) / sqrt 2)^2
  const double b2 = 0.5 * (1.0 - s);
  const std::int64_t up = (n + delta_n) / 2;
  const std::int64_t down = (n - delta_n) / 2;
  if ((a2 == 0.0 && up > 0) || (b2 == 0.0 && down > 0)) return 0.0;
  double log_p = numerics::log_binomial(n, up);
  if (up > 0) log_p += static_cast<double>(up) * std::log(a2);
  if (down > 0) log_p += static_cast<double>(down) * std::log(b2);
  return std::exp(log_p);
}

SusceptibilityTable::SusceptibilityTable(std::vector<std::int64_t> grid,
                                         std::vector<std::vector<double>> chis,
                                         std::string probe_ref)
    : grid_(std::move(grid)), chis_(std::move(chis)), probe_ref_(std::move(probe_ref)) {}

double SusceptibilityTable::peak_abs(int k) const {
  double peak = 0.0;
  for (double v : chi(k)) peak = std::max(peak, std::abs(v));
  return peak;
}

std::vector<double> SusceptibilityTable::normalized(int k) const {
  const double peak = peak_abs(k);
  std::vector<double> out = chi(k);
  if (peak > 0.0) {
    for (double& v : out) v /= peak;
  }
  return out;
}

double DeltaNDistribution::total() const {
  double sum = 0.0;
  for (double p : probabilities) sum += p;
  return sum;
}

namespace {

// Number of standard deviations of the balanced split kept on each side.
double window_sigmas(int K) { return 10.0 + 0.5 * K; }

std::int64_t grid_half_width(const PhotonDistribution& probe, int K, const EosOptions& options) {
  const std::int64_t n_max = probe.support_max();
  if (options.half_width > 0) return std::min(options.half_width, std::max<std::int64_t>(n_max, 0));
  const auto reach = static_cast<std::int64_t>(
      std::ceil(window_sigmas(K) * std::sqrt(static_cast<double>(n_max)))) + 4;
  return std::min(n_max, reach);
}

// ln alpha_0 for real n (Euler-Maclaurin integrand), matching the discrete form.
double log_balanced_split_continuous(double n, double delta_n) {
  if (n > static_cast<double>(numerics::kExactBinomialLimit)) {
    return 0.5 * std::log(2.0 / (n * std::numbers::pi)) - delta_n * delta_n / (2.0 * n);
  }
  return std::lgamma(n + 1.0) - std::lgamma(0.5 * (n + delta_n) + 1.0) -
         std::lgamma(0.5 * (n - delta_n) + 1.0) - n * std::numbers::ln2;
}

using MomentArrays = std::vector<std::vector<double>>;  // [j][grid index]

// Adds P(n) alpha_0(n, dn) n^j to M for every dn of the right parity in
// [dn_begin, dn_end) that lies inside the window of n. alpha_0 is evaluated once
// near dn = 0 and propagated outward with its exact neighbour ratio
// (n - dn) / (n + dn + 2).
class MomentKernel {
 public:
  MomentKernel(int J, std::int64_t L, int K, std::int64_t n_max)
      : J_(J), L_(L), sigmas_(window_sigmas(K)), powers_(static_cast<std::size_t>(J) + 1) {
    lf_.reserve_up_to(std::min(n_max, numerics::kExactBinomialLimit) + 1);
  }

  void add(std::int64_t n, double p, std::int64_t dn_begin, std::int64_t dn_end, MomentArrays& M) {
    if (p == 0.0) return;
    const auto nd = static_cast<double>(n);
    const auto window =
        std::min<std::int64_t>(n, static_cast<std::int64_t>(std::ceil(sigmas_ * std::sqrt(nd))) + 2);
    std::int64_t lo = std::max(dn_begin, -window);
    std::int64_t hi = std::min(dn_end - 1, window);
    if (((lo + n) & 1) != 0) ++lo;
    if (((hi + n) & 1) != 0) --hi;
    if (lo > hi) return;
    powers_[0] = p;
    for (int j = 1; j <= J_; ++j) powers_[static_cast<std::size_t>(j)] = powers_[static_cast<std::size_t>(j) - 1] * nd;
    const bool tabulated = n <= numerics::kExactBinomialLimit;

    // Start from the admissible dn closest to zero, then walk outward with the
    // exact binomial ratios.
    std::int64_t start = std::clamp<std::int64_t>(0, lo, hi);
    if (((start + n) & 1) != 0) start += (start < hi) ? 1 : -1;
    const auto up = (n + start) / 2;
    const auto down = (n - start) / 2;
    const double log_start =
        tabulated ? lf_(n) - lf_(up) - lf_(down)
                  : std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(up) + 1.0) -
                        std::lgamma(static_cast<double>(down) + 1.0);
    const double a_start = std::exp(log_start - nd * std::numbers::ln2);
    double a = a_start;
    for (std::int64_t dn = start; dn <= hi; dn += 2) {
      deposit(dn, a, M);
      a *= static_cast<double>(n - dn) / static_cast<double>(n + dn + 2);
    }
    a = a_start;
    for (std::int64_t dn = start - 2; dn >= lo; dn -= 2) {
      a *= static_cast<double>(n + dn + 2) / static_cast<double>(n - dn);
      deposit(dn, a, M);
    }
  }

 private:
  void deposit(std::int64_t dn, double a, MomentArrays& M) const {
    const auto g = static_cast<std::size_t>(dn + L_);
    for (int j = 0; j <= J_; ++j) M[static_cast<std::size_t>(j)][g] += a * powers_[static_cast<std::size_t>(j)];
  }

  int J_;
  std::int64_t L_;
  double sigmas_;
  numerics::LogFactorialTable lf_;
  std::vector<double> powers_;
};

MomentArrays photon_moments_exact(const PhotonDistribution& probe, int J, std::int64_t L, int K,
                                  unsigned threads) {
  const std::size_t G = static_cast<std::size_t>(2 * L + 1);
  MomentArrays M(static_cast<std::size_t>(J) + 1, std::vector<double>(G, 0.0));
  detail::parallel_chunks(G, threads, [&](std::size_t g_begin, std::size_t g_end) {
    if (g_begin >= g_end) return;
    MomentKernel kernel(J, L, K, probe.support_max());
    const std::int64_t dn_begin = static_cast<std::int64_t>(g_begin) - L;
    const std::int64_t dn_end = static_cast<std::int64_t>(g_end) - L;
    for (std::int64_t n = probe.support_min(); n <= probe.support_max(); ++n) {
      kernel.add(n, probe(n), dn_begin, dn_end, M);
    }
  });
  return M;
}

// Probe weight at real n, log-linear between neighbouring integers.
double interpolated_weight(const PhotonDistribution& probe, double x) {
  const auto lo = static_cast<std::int64_t>(std::floor(x));
  const double t = x - static_cast<double>(lo);
  const double a = probe(lo);
  const double b = probe(lo + 1);
  if (t == 0.0) return a;
  if (a <= 0.0 || b <= 0.0) return (1.0 - t) * a + t * b;
  return std::exp((1.0 - t) * std::log(a) + t * std::log(b));
}

std::vector<std::vector<double>> photon_moments_euler_maclaurin(const PhotonDistribution& probe, int J,
                                                                std::int64_t L, unsigned threads) {
  const std::size_t G = static_cast<std::size_t>(2 * L + 1);
  std::vector<std::vector<double>> M(static_cast<std::size_t>(J) + 1, std::vector<double>(G, 0.0));
  // Contiguous runs of positive weight.
  std::vector<std::pair<std::int64_t, std::int64_t>> runs;
  for (std::int64_t n = probe.support_min(); n <= probe.support_max(); ++n) {
    if (probe(n) <= 0.0) continue;
    if (!runs.empty() && runs.back().second == n - 1) {
      runs.back().second = n;
    } else {
      runs.emplace_back(n, n);
    }
  }
  // The interpolated weight has kinks at the integers, so the integral runs
  // over unit panels with a Gauss-Legendre rule on each.
  using Rule = boost::math::quadrature::gauss<double, 8>;
  detail::parallel_chunks(G, threads, [&](std::size_t g_begin, std::size_t g_end) {
    std::vector<double> acc(static_cast<std::size_t>(J) + 1);
    auto add_point = [&](double x, double d, double weight) {
      const double w = interpolated_weight(probe, x);
      if (w == 0.0) return;
      double v = weight * w * std::exp(log_balanced_split_continuous(x, d));
      for (int j = 0; j <= J; ++j) {
        acc[static_cast<std::size_t>(j)] += v;
        v *= x;
      }
    };
    for (std::size_t g = g_begin; g < g_end; ++g) {
      const std::int64_t dn = static_cast<std::int64_t>(g) - L;
      const auto d = static_cast<double>(dn);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const auto& [run_lo, run_hi] : runs) {
        std::int64_t a = std::max(run_lo, std::abs(dn));
        if (((a + dn) & 1) != 0) ++a;
        std::int64_t b = run_hi;
        if (((b + dn) & 1) != 0) --b;
        if (a > b) continue;
        add_point(static_cast<double>(a), d, 0.5);
        add_point(static_cast<double>(b), d, 0.5);
        // Terms are spaced by two (parity), so the integral is halved.
        for (std::int64_t i = a; i < b; ++i) {
          const double mid = static_cast<double>(i) + 0.5;
          for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
            const double t = 0.5 * Rule::abscissa()[k];
            const double wk = 0.25 * Rule::weights()[k];
            add_point(mid + t, d, wk);
            if (t != 0.0) add_point(mid - t, d, wk);
          }
        }
      }
      for (int j = 0; j <= J; ++j) M[static_cast<std::size_t>(j)][g] = acc[static_cast<std::size_t>(j)];
    }
  });
  return M;
}

}  // namespace

namespace {

SusceptibilityTable table_from_moments(const MomentArrays& M, std::int64_t L, int K, const SplittingPolynomials& polys,
                                       std::string probe_ref) {
  const std::size_t G = static_cast<std::size_t>(2 * L + 1);
  std::vector<std::int64_t> grid(G);
  for (std::size_t g = 0; g < G; ++g) grid[g] = static_cast<std::int64_t>(g) - L;
  std::vector<std::vector<double>> chis(static_cast<std::size_t>(K) + 1, std::vector<double>(G, 0.0));
  std::vector<double> dn_powers(static_cast<std::size_t>(K) + 1);
  for (std::size_t g = 0; g < G; ++g) {
    const auto d = static_cast<double>(grid[g]);
    dn_powers[0] = 1.0;
    for (int i = 1; i <= K; ++i) dn_powers[static_cast<std::size_t>(i)] = dn_powers[static_cast<std::size_t>(i) - 1] * d;
    for (int k = 0; k <= K; ++k) {
      double acc = 0.0;
      for (const auto& t : polys.terms(k)) {
        acc += t.coefficient * dn_powers[static_cast<std::size_t>(t.dn_power)] *
               M[static_cast<std::size_t>(t.n_power)][g];
      }
      chis[static_cast<std::size_t>(k)][g] = acc;
    }
  }
  return SusceptibilityTable(std::move(grid), std::move(chis), std::move(probe_ref));
}

}  // namespace

SusceptibilityTable susceptibilities(const PhotonDistribution& probe, int K, const EosOptions& options) {
  if (K < 0) throw DomainError("susceptibilities: negative order");
  const std::int64_t L = grid_half_width(probe, K, options);
  const int J = K / 2;
  const auto M = options.photon_sum == PhotonSum::kExact
                     ? photon_moments_exact(probe, J, L, K, options.threads)
                     : photon_moments_euler_maclaurin(probe, J, L, options.threads);
  return table_from_moments(M, L, K, SplittingPolynomials(K), probe.descriptor());
}

std::vector<SusceptibilityTable> upper_tail_susceptibilities(const PhotonDistribution& parent,
                                                             const std::vector<std::int64_t>& thresholds,
                                                             int K, const EosOptions& options) {
  if (K < 0) throw DomainError("upper_tail_susceptibilities: negative order");
  if (options.photon_sum != PhotonSum::kExact) {
    throw DomainError("upper_tail_susceptibilities: only the exact photon sum is supported");
  }
  const std::int64_t L = grid_half_width(parent, K, options);
  const int J = K / 2;
  const std::size_t G = static_cast<std::size_t>(2 * L + 1);

  // Thresholds visited from the top so that one descending pass over n
  // accumulates every tail.
  std::vector<std::size_t> order(thresholds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return thresholds[a] > thresholds[b]; });

  std::vector<MomentArrays> snapshots(thresholds.size());
  std::vector<double> tail_mass(thresholds.size(), 0.0);
  {
    double mass = 0.0;
    std::size_t next = 0;
    for (std::int64_t n = parent.support_max(); n >= parent.support_min() - 1 && next < order.size(); --n) {
      while (next < order.size() && thresholds[order[next]] > n) {
        tail_mass[order[next]] = mass;
        ++next;
      }
      if (n >= parent.support_min()) mass += parent(n);
    }
    for (; next < order.size(); ++next) tail_mass[order[next]] = mass;
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(tail_mass[i] > 0.0)) {
      throw ConditioningError("upper_tail_susceptibilities: threshold " + std::to_string(thresholds[i]) +
                              " accepts no events");
    }
    snapshots[i].assign(static_cast<std::size_t>(J) + 1, std::vector<double>(G, 0.0));
  }

  detail::parallel_chunks(G, options.threads, [&](std::size_t g_begin, std::size_t g_end) {
    if (g_begin >= g_end) return;
    MomentKernel kernel(J, L, K, parent.support_max());
    const std::int64_t dn_begin = static_cast<std::int64_t>(g_begin) - L;
    const std::int64_t dn_end = static_cast<std::int64_t>(g_end) - L;
    MomentArrays running(static_cast<std::size_t>(J) + 1, std::vector<double>(G, 0.0));
    auto snapshot = [&](std::size_t idx) {
      for (int j = 0; j <= J; ++j) {
        const auto& src = running[static_cast<std::size_t>(j)];
        auto& dst = snapshots[idx][static_cast<std::size_t>(j)];
        std::copy(src.begin() + static_cast<std::ptrdiff_t>(g_begin), src.begin() + static_cast<std::ptrdiff_t>(g_end),
                  dst.begin() + static_cast<std::ptrdiff_t>(g_begin));
      }
    };
    std::size_t next = 0;
    for (std::int64_t n = parent.support_max(); n >= parent.support_min(); --n) {
      while (next < order.size() && thresholds[order[next]] > n) snapshot(order[next++]);
      kernel.add(n, parent(n), dn_begin, dn_end, running);
    }
    while (next < order.size()) snapshot(order[next++]);
  });

  const SplittingPolynomials polys(K);
  std::vector<SusceptibilityTable> tables;
  tables.reserve(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    for (auto& row : snapshots[i]) {
      for (double& v : row) v /= tail_mass[i];
    }
    tables.push_back(table_from_moments(snapshots[i], L, K, polys,
                                        parent.descriptor() + " | n>=" + std::to_string(thresholds[i])));
  }
  return tables;
}

DeltaNDistribution combine(const SusceptibilityTable& table, const MomentSequence& signal, int K) {
  if (K > table.max_order()) throw DomainError("combine: order exceeds the susceptibility table");
  if (K > signal.max_order()) throw DomainError("combine: order exceeds the signal moments");
  DeltaNDistribution out{table.grid(), std::vector<double>(table.grid().size(), 0.0), table.probe_ref()};
  for (std::size_t g = 0; g < out.grid.size(); ++g) {
    double p = 0.0;
    for (int k = 0; k <= K; ++k) {
      if (signal[k] != 0.0) p += table.chi(k)[g] * signal[k];
    }
    if (p < 0.0) {
      if (p < -kNegativityTolerance) {
        std::ostringstream msg;
        msg << "moment expansion truncated at order " << K << " gives P(dn=" << out.grid[g]
            << ") = " << p << "; increase the order or reduce the coupling";
        throw TruncationError(msg.str());
      }
      p = 0.0;
    }
    out.probabilities[g] = p;
  }
  return out;
}

DeltaNDistribution eos_distribution(const PhotonDistribution& probe, const MomentSequence& signal, int K,
                                    const EosOptions& options) {
  if (K > signal.max_order()) throw DomainError("eos_distribution: signal has fewer than K moments");
  return combine(susceptibilities(probe, K, options), signal, K);
}

DCurve d_curve(const SusceptibilityTable& table, const MomentSequence& signal, int K) {
  const DeltaNDistribution with_signal = combine(table, signal, K);
  const std::vector<double>& baseline = table.chi(0);
  const double peak = *std::max_element(baseline.begin(), baseline.end());
  DCurve curve{table.grid(), std::vector<double>(baseline.size(), 0.0)};
  for (std::size_t g = 0; g < baseline.size(); ++g) {
    curve.values[g] = (with_signal.probabilities[g] - baseline[g]) / peak;
  }
  return curve;
}

DCurve d_measure(const PhotonDistribution& probe, const MomentSequence& signal, int K,
                 const EosOptions& options) {
  return d_curve(susceptibilities(probe, K, options), signal, K);
}

double d_peak_to_peak(const DCurve& curve) {
  if (curve.values.empty()) throw DomainError("d_peak_to_peak: empty curve");
  const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
  return *hi - *lo;
}

double d_max_abs(const DCurve& curve) {
  double m = 0.0;
  for (double v : curve.values) m = std::max(m, std::abs(v));
  return m;
}

double l1_distance(const DCurve& a, const DCurve& b) {
  if (a.grid != b.grid) throw DomainError("l1_distance: curves live on different grids");
  double sum = 0.0;
  for (std::size_t g = 0; g < a.values.size(); ++g) sum += std::abs(a.values[g] - b.values[g]);
  return sum;
}

DeltaNDistribution coarse_grain(const DeltaNDistribution& dist, std::int64_t bin_width) {
  if (bin_width < 1) throw DomainError("coarse_grain: bin width must be >= 1");
  if (bin_width == 1 || dist.grid.empty()) return dist;
  // Bins are centred on multiples of the width; for even widths the shared
  // boundary point is split between neighbours so the result stays symmetric.
  const std::int64_t lo = dist.grid.front();
  const std::int64_t hi = dist.grid.back();
  const auto floor_div = [](std::int64_t a, std::int64_t b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
  };
  // Symmetric bin range, padded by one bin on each side.
  const std::int64_t q_max = std::max(std::abs(floor_div(lo + bin_width / 2, bin_width)),
                                      std::abs(floor_div(hi + bin_width / 2, bin_width))) + 1;
  const std::int64_t q_lo = -q_max;
  const std::int64_t q_hi = q_max;
  DeltaNDistribution out;
  out.probe_ref = dist.probe_ref;
  for (std::int64_t q = q_lo; q <= q_hi; ++q) out.grid.push_back(q * bin_width);
  out.probabilities.assign(out.grid.size(), 0.0);
  for (std::size_t g = 0; g < dist.grid.size(); ++g) {
    const std::int64_t dn = dist.grid[g];
    const double p = dist.probabilities[g];
    if (bin_width % 2 == 0) {
      const std::int64_t r = ((dn % bin_width) + bin_width) % bin_width;
      if (r == bin_width / 2) {
        const std::int64_t left = floor_div(dn, bin_width);
        out.probabilities[static_cast<std::size_t>(left - q_lo)] += 0.5 * p;
        out.probabilities[static_cast<std::size_t>(left + 1 - q_lo)] += 0.5 * p;
        continue;
      }
    }
    const std::int64_t q = floor_div(dn + bin_width / 2, bin_width);
    out.probabilities[static_cast<std::size_t>(q - q_lo)] += p;
  }
  return out;
}

std::int64_t plotting_bin_width(double mean_photons) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(std::max(mean_photons, 0.0)) / 50.0)));
}

}  // namespace eoslab
