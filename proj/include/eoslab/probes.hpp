#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eoslab {

/// Photon-number distribution of a phase-symmetric probe, stored on a
/// contiguous support [support_min, support_max].
class PhotonDistribution {
 public:
  /// Weights are renormalized to sum to one; they must be non-negative with
  /// positive total.
  PhotonDistribution(std::int64_t support_min, std::vector<double> weights, std::string descriptor);

  std::int64_t support_min() const { return support_min_; }
  std::int64_t support_max() const {
    return support_min_ + static_cast<std::int64_t>(weights_.size()) - 1;
  }
  const std::vector<double>& weights() const { return weights_; }
  /// P(n); zero outside the support.
  double operator()(std::int64_t n) const;
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double fano_factor() const { return mean_ > 0.0 ? variance_ / mean_ : 0.0; }
  const std::string& descriptor() const { return descriptor_; }

 private:
  std::int64_t support_min_;
  std::vector<double> weights_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::string descriptor_;
};

/// Integer interval [lo, hi]; hi empty means unbounded.
struct Band {
  std::int64_t lo = 0;
  std::optional<std::int64_t> hi;

  bool contains(std::int64_t m) const { return m >= lo && (!hi || m <= *hi); }
  bool operator==(const Band&) const = default;
};

/// Union of disjoint, sorted, non-empty bands of heralding counts.
class BandScheme {
 public:
  /// Throws DomainError if the bands overlap, are unsorted, empty or negative.
  explicit BandScheme(std::vector<Band> bands);

  static BandScheme all() { return BandScheme({Band{0, std::nullopt}}); }
  static BandScheme upper(std::int64_t threshold) { return BandScheme({Band{threshold, std::nullopt}}); }
  static BandScheme single(std::int64_t m) { return BandScheme({Band{m, m}}); }

  const std::vector<Band>& bands() const { return bands_; }
  bool contains(std::int64_t m) const;
  bool bounded() const { return bands_.back().hi.has_value(); }
  std::string to_string() const;
  bool operator==(const BandScheme&) const = default;

 private:
  std::vector<Band> bands_;
};

struct HeraldingDetector {
  double eta = 1.0;   // effective quantum efficiency, (0, 1]
  double gain = 1.0;  // mean electrons per detected photon (Poisson parameter), > 0

  void validate() const;
};

/// Treatment of pi(n|m) for a non-ideal heralding detector.
enum class HeraldingModel {
  kQuasiGaussian,  // discretized Gaussian, renormalized over n >= 0
  kDelta,          // narrow-limit delta at n = m / (gain * eta)
};

/// Configurable truncation of unbounded supports.
struct TruncationPolicy {
  double tail_mass = 1e-13;
  std::int64_t max_states = 10'000'000;
};

PhotonDistribution coherent_dist(double nu, const TruncationPolicy& policy = {});
PhotonDistribution thermal_dist(double xi, const TruncationPolicy& policy = {});
PhotonDistribution fock_dist(std::int64_t nu);

/// Thermal parameter xi = nu / (nu + 1) of a source with mean photon number nu.
double xi_from_mean(double nu);

/// Thermal parameter seen by a heralding detector with efficiency eta and gain.
double heralding_zeta(double xi, const HeraldingDetector& detector);

/// Band-conditioned state from a two-mode squeezed vacuum with parameter xi.
/// With no detector the heralding is perfect (pi(n|m) = delta_{nm}).
/// Throws ConditioningError when the scheme accepts no events.
PhotonDistribution bcs_dist(double xi, const BandScheme& scheme,
                            const std::optional<HeraldingDetector>& detector = std::nullopt,
                            HeraldingModel model = HeraldingModel::kQuasiGaussian,
                            const TruncationPolicy& policy = {});

/// Total variation distance between two photon-number distributions.
double total_variation(const PhotonDistribution& a, const PhotonDistribution& b);

}  // namespace eoslab
