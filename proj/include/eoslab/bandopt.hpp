#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eoslab/eos.hpp"
#include "eoslab/probes.hpp"
#include "eoslab/signals.hpp"

namespace eoslab {

enum class ObjectiveKind {
  kPeakToPeakVacuum,   // d_peak_to_peak of the first signal
  kDiscriminationL1,   // l1_distance between the D curves of the two signals
  kMomentIsolation,    // ||chi_k g^k|| / sum_{j != k, j >= 1} ||chi_j g^j||
};

struct Objective {
  ObjectiveKind kind = ObjectiveKind::kPeakToPeakVacuum;
  MomentSequence signal_a = vacuum_moments(0.0047, 6);
  std::optional<MomentSequence> signal_b;
  double coupling = 0.0047;  // g for kMomentIsolation
  int moment_order = 2;      // k for kMomentIsolation
};

struct OptimizationProblem {
  double xi = 0.999000999000999;  // nu = 1000
  std::optional<HeraldingDetector> detector;
  HeraldingModel model = HeraldingModel::kQuasiGaussian;
  Objective objective;
  int K = 6;
  int max_bands = 1;
  std::int64_t budget = 1;
  std::uint64_t seed = 0;
  /// Largest edge move in heralding counts; 0 picks a twentieth of the heralding stddev.
  std::int64_t step = 0;
  /// Points of the threshold grid over [0, mean + 6 stddev].
  int sweep_points = 61;
  TruncationPolicy policy;
  EosOptions eos;

  /// Throws DomainError on an invalid field.
  void validate() const;
};

/// Scores a table. Signals with fewer than K moments are rejected.
double evaluate_objective(const Objective& objective, const SusceptibilityTable& table, int K);

/// Objective value per scheme, with the susceptibility tables cached by scheme.
class SchemeEvaluator {
 public:
  explicit SchemeEvaluator(const OptimizationProblem& problem);

  /// -infinity for schemes that accept no events or break the moment truncation.
  double operator()(const BandScheme& scheme);
  std::size_t cache_size() const { return cache_.size(); }

 private:
  const OptimizationProblem& problem_;
  std::map<std::string, double> cache_;
};

/// Mean and stddev of the heralding counts m (thermal with the detected parameter).
std::pair<double, double> heralding_moments(double xi, const std::optional<HeraldingDetector>& detector);

struct SweepResult {
  std::int64_t best_threshold = 0;
  double best_value = 0.0;
  std::vector<std::int64_t> thresholds;
  std::vector<double> values;  // -infinity where the band is empty
};

/// Exhaustive scan of [A, inf) over the threshold grid; ties go to the lowest A.
/// Throws ConditioningError if every threshold is infeasible.
SweepResult sweep_threshold(const OptimizationProblem& problem);

struct TraceEntry {
  std::int64_t step;
  std::string scheme;
  double objective;
  bool accepted;
};

struct SearchResult {
  BandScheme best_scheme = BandScheme::all();
  double best_value = 0.0;
  std::vector<TraceEntry> trace;
};

/// Seeded greedy local search over band edges (grow, shrink, split, merge) with
/// restarts from the best scheme seen. Starts at the swept single-band optimum;
/// every proposal counts against the budget, including the starting point.
SearchResult local_search_bands(const OptimizationProblem& problem);
SearchResult local_search_bands(const OptimizationProblem& problem, const SweepResult& sweep);

}  // namespace eoslab
