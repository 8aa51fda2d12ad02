#include "eoslab/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eoslab/errors.hpp"

namespace eoslab {

PhotonDistribution::PhotonDistribution(std::int64_t support_min, std::vector<double> weights,
                                       std::string descriptor)
    : support_min_(support_min), weights_(std::move(weights)), descriptor_(std::move(descriptor)) {
  if (support_min_ < 0) throw DomainError("PhotonDistribution: negative support");
  if (weights_.empty()) throw DomainError("PhotonDistribution: empty support");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("PhotonDistribution: invalid weight");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("PhotonDistribution: zero total weight");

  // Trim zero weights at both ends so the support is tight.
  const auto first = std::find_if(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; });
  const auto last = std::find_if(weights_.rbegin(), weights_.rend(), [](double w) { return w > 0.0; });
  const auto head = std::distance(weights_.begin(), first);
  const auto tail = std::distance(weights_.rbegin(), last);
  weights_.erase(weights_.end() - tail, weights_.end());
  weights_.erase(weights_.begin(), weights_.begin() + head);
  support_min_ += head;

  for (double& w : weights_) w /= total;
  double mean = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    mean += weights_[i] * static_cast<double>(support_min_ + static_cast<std::int64_t>(i));
  }
  double var = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double d = static_cast<double>(support_min_ + static_cast<std::int64_t>(i)) - mean;
    var += weights_[i] * d * d;
  }
  mean_ = mean;
  variance_ = var;
}

double PhotonDistribution::operator()(std::int64_t n) const {
  if (n < support_min_ || n > support_max()) return 0.0;
  return weights_[static_cast<std::size_t>(n - support_min_)];
}

BandScheme::BandScheme(std::vector<Band> bands) : bands_(std::move(bands)) {
  if (bands_.empty()) throw DomainError("BandScheme: no bands");
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    const Band& b = bands_[i];
    if (b.lo < 0) throw DomainError("BandScheme: negative band edge");
    if (b.hi && *b.hi < b.lo) throw DomainError("BandScheme: empty band " + to_string());
    if (i + 1 < bands_.size()) {
      if (!b.hi) throw DomainError("BandScheme: only the last band may be unbounded");
      if (bands_[i + 1].lo <= *b.hi) throw DomainError("BandScheme: bands overlap or are unsorted");
    }
  }
}

bool BandScheme::contains(std::int64_t m) const {
  return std::any_of(bands_.begin(), bands_.end(), [m](const Band& b) { return b.contains(m); });
}

std::string BandScheme::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (i) out << "u";
    out << "[" << bands_[i].lo << ",";
    if (bands_[i].hi) {
      out << *bands_[i].hi;
    } else {
      out << "inf";
    }
    out << "]";
  }
  return out.str();
}

void HeraldingDetector::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("HeraldingDetector: eta must be in (0, 1]");
  if (!(gain > 0.0) || !std::isfinite(gain)) throw DomainError("HeraldingDetector: gain must be > 0");
}

namespace {

std::string format_number(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

void check_span(std::int64_t lo, std::int64_t hi, const TruncationPolicy& policy) {
  if (hi - lo + 1 > policy.max_states) {
    throw DomainError("support of " + std::to_string(hi - lo + 1) + " states exceeds the cap of " +
                      std::to_string(policy.max_states));
  }
}

// Length beyond which a geometric tail with log-ratio log_ratio (< 0) carries
// less than tail_mass of the band mass.
std::int64_t geometric_tail_length(double log_ratio, double tail_mass) {
  return static_cast<std::int64_t>(std::ceil(std::log(tail_mass) / log_ratio));
}

struct Segment {
  std::int64_t lo;
  std::int64_t hi;
};

// Weights proportional to exp(slope * n) on the given segments.
PhotonDistribution geometric_on_segments(const std::vector<Segment>& segments, double slope,
                                         const TruncationPolicy& policy, std::string descriptor) {
  if (segments.empty()) throw ConditioningError("band scheme accepts no events: " + descriptor);
  const std::int64_t lo = segments.front().lo;
  const std::int64_t hi = segments.back().hi;
  check_span(lo, hi, policy);
  std::vector<double> weights(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const Segment& s : segments) {
    for (std::int64_t n = s.lo; n <= s.hi; ++n) {
      weights[static_cast<std::size_t>(n - lo)] = std::exp(slope * static_cast<double>(n - lo));
    }
  }
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw ConditioningError("band scheme accepts no events: " + descriptor);
  }
  return PhotonDistribution(lo, std::move(weights), std::move(descriptor));
}

std::string bcs_descriptor(double xi, const BandScheme& scheme,
                           const std::optional<HeraldingDetector>& detector, HeraldingModel model) {
  std::string d = "bcs(xi=" + format_number(xi) + ",bands=" + scheme.to_string();
  if (detector) {
    d += ",eta=" + format_number(detector->eta) + ",gain=" + format_number(detector->gain);
    d += model == HeraldingModel::kDelta ? ",model=delta" : ",model=quasi_gaussian";
  }
  return d + ")";
}

// Heralding counts accepted by the scheme under a thermal law exp(m log_ratio),
// truncated so the neglected tail is below the policy threshold.
std::vector<Segment> accepted_counts(const BandScheme& scheme, double log_ratio,
                                     const TruncationPolicy& policy) {
  std::vector<Segment> out;
  for (const Band& b : scheme.bands()) {
    std::int64_t hi = b.hi.value_or(std::numeric_limits<std::int64_t>::max());
    const std::int64_t tail = geometric_tail_length(log_ratio, policy.tail_mass);
    hi = std::min(hi, b.lo + tail);
    out.push_back({b.lo, hi});
  }
  return out;
}

}  // namespace

PhotonDistribution coherent_dist(double nu, const TruncationPolicy& policy) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("coherent_dist: nu must be >= 0");
  if (nu == 0.0) return PhotonDistribution(0, {1.0}, "coherent(nu=0)");
  const double log_nu = std::log(nu);
  auto log_pmf = [&](std::int64_t n) {
    const auto nd = static_cast<double>(n);
    return -nu + nd * log_nu - std::lgamma(nd + 1.0);
  };
  // Walk out from the mode until the pmf is far below the tail budget; the
  // ratio test bounds the remaining geometric tail.
  const double cutoff = std::log(policy.tail_mass) - 7.0 * std::log(10.0);
  const auto mode = static_cast<std::int64_t>(std::floor(nu));
  std::int64_t lo = mode;
  while (lo > 0 && log_pmf(lo - 1) > cutoff) --lo;
  std::int64_t hi = mode;
  while (log_pmf(hi + 1) > cutoff) ++hi;
  check_span(lo, hi, policy);
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t n = lo; n <= hi; ++n) weights.push_back(std::exp(log_pmf(n)));
  return PhotonDistribution(lo, std::move(weights), "coherent(nu=" + format_number(nu) + ")");
}

double xi_from_mean(double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("xi_from_mean: nu must be >= 0");
  return nu / (nu + 1.0);
}

PhotonDistribution thermal_dist(double xi, const TruncationPolicy& policy) {
  if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("thermal_dist: xi must be in [0, 1)");
  if (xi == 0.0) return PhotonDistribution(0, {1.0}, "thermal(xi=0)");
  const std::int64_t tail = geometric_tail_length(std::log(xi), policy.tail_mass);
  return geometric_on_segments({{0, tail}}, std::log(xi), policy,
                               "thermal(xi=" + format_number(xi) + ")");
}

PhotonDistribution fock_dist(std::int64_t nu) {
  if (nu < 0) throw DomainError("fock_dist: photon number must be >= 0");
  return PhotonDistribution(nu, {1.0}, "fock(n=" + std::to_string(nu) + ")");
}

double heralding_zeta(double xi, const HeraldingDetector& detector) {
  detector.validate();
  if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("heralding_zeta: xi must be in [0, 1)");
  const double ge = detector.gain * detector.eta;
  return ge * xi / (1.0 + xi * (ge - 1.0));
}

PhotonDistribution bcs_dist(double xi, const BandScheme& scheme,
                            const std::optional<HeraldingDetector>& detector, HeraldingModel model,
                            const TruncationPolicy& policy) {
  if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("bcs_dist: xi must be in [0, 1)");
  std::string descriptor = bcs_descriptor(xi, scheme, detector, model);

  if (!detector) {
    if (xi == 0.0) {
      if (!scheme.contains(0)) throw ConditioningError("band scheme accepts no events: " + descriptor);
      return PhotonDistribution(0, {1.0}, std::move(descriptor));
    }
    return geometric_on_segments(accepted_counts(scheme, std::log(xi), policy), std::log(xi), policy,
                                 std::move(descriptor));
  }

  detector->validate();
  const double zeta = heralding_zeta(xi, *detector);
  const double ge = detector->gain * detector->eta;
  if (zeta == 0.0) {
    if (!scheme.contains(0)) throw ConditioningError("band scheme accepts no events: " + descriptor);
    return PhotonDistribution(0, {1.0}, std::move(descriptor));
  }
  const double log_zeta = std::log(zeta);
  const std::vector<Segment> counts = accepted_counts(scheme, log_zeta, policy);

  if (model == HeraldingModel::kDelta) {
    // n = m / (gain eta) for accepted m; weight P_zeta(gain eta n).
    std::vector<Segment> photons;
    for (const Segment& s : counts) {
      const auto lo = static_cast<std::int64_t>(std::ceil(static_cast<double>(s.lo) / ge));
      const auto hi = static_cast<std::int64_t>(std::floor(static_cast<double>(s.hi) / ge));
      if (hi >= lo) photons.push_back({lo, hi});
    }
    return geometric_on_segments(photons, ge * log_zeta, policy, std::move(descriptor));
  }

  // Quasi-Gaussian pi(n|m): mean m / (g eta), variance m [1 + g (1 - eta)] / (g eta)^2.
  const double spread = (1.0 + detector->gain * (1.0 - detector->eta)) / (ge * ge);
  constexpr double kWidth = 9.0;
  std::int64_t n_lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t n_hi = 0;
  for (const Segment& s : counts) {
    for (std::int64_t m : {s.lo, s.hi}) {
      const double mu = static_cast<double>(m) / ge;
      const double sd = std::sqrt(static_cast<double>(m) * spread);
      n_lo = std::min(n_lo, std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mu - kWidth * sd)) - 1));
      n_hi = std::max(n_hi, static_cast<std::int64_t>(std::ceil(mu + kWidth * sd)) + 1);
    }
  }
  check_span(n_lo, n_hi, policy);
  std::vector<double> weights(static_cast<std::size_t>(n_hi - n_lo + 1), 0.0);
  std::vector<double> kernel;
  const std::int64_t m0 = counts.front().lo;
  for (const Segment& s : counts) {
    for (std::int64_t m = s.lo; m <= s.hi; ++m) {
      const double herald = std::exp(log_zeta * static_cast<double>(m - m0));
      if (herald == 0.0) continue;
      const double mu = static_cast<double>(m) / ge;
      const double var = static_cast<double>(m) * spread;
      if (var < 1e-6) {
        const auto n = std::max<std::int64_t>(0, std::llround(mu));
        weights[static_cast<std::size_t>(n - n_lo)] += herald;
        continue;
      }
      const double sd = std::sqrt(var);
      const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mu - kWidth * sd)));
      const auto hi = static_cast<std::int64_t>(std::ceil(mu + kWidth * sd));
      kernel.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
      double norm = 0.0;
      for (std::int64_t n = lo; n <= hi; ++n) {
        const double z = (static_cast<double>(n) - mu) / sd;
        const double k = std::exp(-0.5 * z * z);
        kernel[static_cast<std::size_t>(n - lo)] = k;
        norm += k;
      }
      for (std::int64_t n = lo; n <= hi; ++n) {
        weights[static_cast<std::size_t>(n - n_lo)] += herald * kernel[static_cast<std::size_t>(n - lo)] / norm;
      }
    }
  }
  return PhotonDistribution(n_lo, std::move(weights), std::move(descriptor));
}

double total_variation(const PhotonDistribution& a, const PhotonDistribution& b) {
  const std::int64_t lo = std::min(a.support_min(), b.support_min());
  const std::int64_t hi = std::max(a.support_max(), b.support_max());
  double sum = 0.0;
  for (std::int64_t n = lo; n <= hi; ++n) sum += std::abs(a(n) - b(n));
  return 0.5 * sum;
}

}  // namespace eoslab
