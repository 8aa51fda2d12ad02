#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoslab/probes.hpp"
#include "eoslab/signals.hpp"

namespace eoslab {

/// Probability of a count difference dn when n photons cross the nonlinear
/// beamsplitter with field parameter eps. Zero on a parity mismatch or |dn| > n.
/// Throws DomainError for |eps| > 1.
double nlbs_prob(std::int64_t delta_n, std::int64_t n, double eps);

/// Largest |eps| for which the branch amplitudes are monotone in eps.
inline constexpr double kMaxMonotoneEps = 0.70710678118654752;

enum class PhotonSum {
  kExact,            // discrete sum over every photon number of the probe support
  kEulerMaclaurin,   // first-order Euler-Maclaurin per parity class and support segment
};

struct EosOptions {
  PhotonSum photon_sum = PhotonSum::kExact;
  /// Half-width of the dn grid; 0 chooses it from the probe support.
  std::int64_t half_width = 0;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

/// chi_k(dn) = sum_n alpha_k(n, dn) P(n) for k = 0..K on an integer dn grid.
/// The coupling gamma^k lives in the signal moments, not here.
class SusceptibilityTable {
 public:
  SusceptibilityTable(std::vector<std::int64_t> grid, std::vector<std::vector<double>> chis,
                      std::string probe_ref);

  int max_order() const { return static_cast<int>(chis_.size()) - 1; }
  const std::vector<std::int64_t>& grid() const { return grid_; }
  const std::vector<double>& chi(int k) const { return chis_[static_cast<std::size_t>(k)]; }
  /// chi_k / max |chi_k|.
  std::vector<double> normalized(int k) const;
  double peak_abs(int k) const;
  const std::string& probe_ref() const { return probe_ref_; }
  static constexpr const char* kCouplingConvention = "raw";

 private:
  std::vector<std::int64_t> grid_;
  std::vector<std::vector<double>> chis_;
  std::string probe_ref_;
};

/// P(dn; psi) over the grid.
struct DeltaNDistribution {
  std::vector<std::int64_t> grid;
  std::vector<double> probabilities;
  std::string probe_ref;

  double total() const;
};

/// Relative differential noise amplitude [P(dn; psi) - P(dn; 0)] / max P(dn; 0).
struct DCurve {
  std::vector<std::int64_t> grid;
  std::vector<double> values;
};

/// Negative values above this magnitude are reported as truncation failures.
inline constexpr double kNegativityTolerance = 1e-12;

SusceptibilityTable susceptibilities(const PhotonDistribution& probe, int K,
                                     const EosOptions& options = {});

/// Tables for parent(n) restricted to n >= A and renormalized, one per threshold A,
/// from a single pass over the parent. All share the grid of the parent.
/// Throws ConditioningError if a threshold leaves no mass.
std::vector<SusceptibilityTable> upper_tail_susceptibilities(const PhotonDistribution& parent,
                                                             const std::vector<std::int64_t>& thresholds,
                                                             int K, const EosOptions& options = {});

/// sum_k chi_k m_k, clamped at tiny negatives. Throws TruncationError otherwise.
DeltaNDistribution combine(const SusceptibilityTable& table, const MomentSequence& signal, int K);
DeltaNDistribution eos_distribution(const PhotonDistribution& probe, const MomentSequence& signal,
                                    int K, const EosOptions& options = {});

DCurve d_curve(const SusceptibilityTable& table, const MomentSequence& signal, int K);
DCurve d_measure(const PhotonDistribution& probe, const MomentSequence& signal, int K,
                 const EosOptions& options = {});

double d_peak_to_peak(const DCurve& curve);
double d_max_abs(const DCurve& curve);
/// sum_dn |a - b| over a shared grid.
double l1_distance(const DCurve& a, const DCurve& b);

/// Sums probabilities over consecutive bins of the given width (plotting aid for
/// large probes). The bin is labelled by its central dn.
DeltaNDistribution coarse_grain(const DeltaNDistribution& dist, std::int64_t bin_width);

/// Bin width ceil(sqrt(nu) / 50) suggested for plotting a probe of mean nu.
std::int64_t plotting_bin_width(double mean_photons);

}  // namespace eoslab
