#include "eoslab/bandopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eoslab/errors.hpp"

namespace eoslab {

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

double l2_norm(const std::vector<double>& v, double scale) {
  double sum = 0.0;
  for (double x : v) sum += (x * scale) * (x * scale);
  return std::sqrt(sum);
}

}  // namespace

void OptimizationProblem::validate() const {
  if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("optimization: xi must be in [0, 1)");
  if (detector) detector->validate();
  if (K < 0) throw DomainError("optimization: K must be >= 0");
  if (max_bands < 1) throw DomainError("optimization: max_bands must be >= 1");
  if (budget < 1) throw DomainError("optimization: budget must be >= 1");
  if (step < 0) throw DomainError("optimization: step must be >= 0");
  if (sweep_points < 1) throw DomainError("optimization: sweep_points must be >= 1");
  if (objective.signal_a.max_order() < K) throw DomainError("optimization: first signal has fewer than K moments");
  if (objective.kind == ObjectiveKind::kDiscriminationL1) {
    if (!objective.signal_b) throw DomainError("optimization: discrimination needs a second signal");
    if (objective.signal_b->max_order() < K) throw DomainError("optimization: second signal has fewer than K moments");
  }
  if (objective.kind == ObjectiveKind::kMomentIsolation &&
      (objective.moment_order < 1 || objective.moment_order > K)) {
    throw DomainError("optimization: moment order must be in [1, K]");
  }
}

double evaluate_objective(const Objective& objective, const SusceptibilityTable& table, int K) {
  switch (objective.kind) {
    case ObjectiveKind::kPeakToPeakVacuum:
      return d_peak_to_peak(d_curve(table, objective.signal_a, K));
    case ObjectiveKind::kDiscriminationL1:
      if (!objective.signal_b) throw DomainError("discrimination objective needs a second signal");
      return l1_distance(d_curve(table, objective.signal_a, K), d_curve(table, *objective.signal_b, K));
    case ObjectiveKind::kMomentIsolation: {
      const int k = objective.moment_order;
      if (k < 1 || k > std::min(K, table.max_order())) throw DomainError("moment isolation order out of range");
      double others = 0.0;
      for (int j = 1; j <= std::min(K, table.max_order()); ++j) {
        if (j != k) others += l2_norm(table.chi(j), std::pow(objective.coupling, j));
      }
      const double target = l2_norm(table.chi(k), std::pow(objective.coupling, k));
      return others > 0.0 ? target / others : (target > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
  }
  throw DomainError("unknown objective");
}

SchemeEvaluator::SchemeEvaluator(const OptimizationProblem& problem) : problem_(problem) {}

double SchemeEvaluator::operator()(const BandScheme& scheme) {
  const std::string key = scheme.to_string();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  double value = kInfeasible;
  try {
    const PhotonDistribution probe =
        bcs_dist(problem_.xi, scheme, problem_.detector, problem_.model, problem_.policy);
    value = evaluate_objective(problem_.objective, susceptibilities(probe, problem_.K, problem_.eos), problem_.K);
  } catch (const ConditioningError&) {
  } catch (const TruncationError&) {
  }
  cache_.emplace(key, value);
  return value;
}

std::pair<double, double> heralding_moments(double xi, const std::optional<HeraldingDetector>& detector) {
  const double z = detector ? heralding_zeta(xi, *detector) : xi;
  return {z / (1.0 - z), std::sqrt(z) / (1.0 - z)};
}

SweepResult sweep_threshold(const OptimizationProblem& problem) {
  problem.validate();
  const auto [mean, sd] = heralding_moments(problem.xi, problem.detector);
  const double top = mean + 6.0 * sd;
  SweepResult result;
  if (problem.sweep_points == 1 || top <= 0.0) {
    result.thresholds.push_back(0);
  } else {
    const auto spacing = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(top / static_cast<double>(problem.sweep_points - 1))));
    for (std::int64_t A = 0; A <= static_cast<std::int64_t>(std::ceil(top)); A += spacing) {
      result.thresholds.push_back(A);
    }
  }
  result.values.assign(result.thresholds.size(), kInfeasible);

  if (!problem.detector && problem.eos.photon_sum == PhotonSum::kExact && problem.xi > 0.0) {
    // Ideal heralding: the upper BCS is the thermal state cut at n >= A, so one
    // pass over the thermal support serves the whole grid.
    const PhotonDistribution parent = thermal_dist(problem.xi, problem.policy);
    std::vector<std::int64_t> feasible;
    for (std::int64_t A : result.thresholds) {
      if (A <= parent.support_max()) feasible.push_back(A);
    }
    const auto tables = upper_tail_susceptibilities(parent, feasible, problem.K, problem.eos);
    for (std::size_t i = 0; i < feasible.size(); ++i) {
      try {
        result.values[i] = evaluate_objective(problem.objective, tables[i], problem.K);
      } catch (const TruncationError&) {
      }
    }
  } else {
    SchemeEvaluator evaluate(problem);
    for (std::size_t i = 0; i < result.thresholds.size(); ++i) {
      result.values[i] = evaluate(BandScheme::upper(result.thresholds[i]));
    }
  }

  std::size_t best = result.values.size();
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    if (result.values[i] == kInfeasible) continue;
    if (best == result.values.size() || result.values[i] > result.values[best]) best = i;
  }
  if (best == result.values.size()) throw ConditioningError("sweep_threshold: every threshold is infeasible");
  result.best_threshold = result.thresholds[best];
  result.best_value = result.values[best];
  return result;
}

namespace {

// One random edit of the band list; nullopt when the drawn edit is invalid.
std::optional<BandScheme> propose(const BandScheme& scheme, int max_bands, std::int64_t step,
                                  std::mt19937_64& rng) {
  std::vector<Band> bands = scheme.bands();
  std::uniform_int_distribution<int> pick_move(0, 3);
  std::uniform_int_distribution<std::size_t> pick_band(0, bands.size() - 1);
  std::uniform_int_distribution<std::int64_t> pick_step(1, step);
  const int move = pick_move(rng);
  const std::size_t b = pick_band(rng);
  const std::int64_t delta = pick_step(rng);
  const bool upper_edge = std::uniform_int_distribution<int>(0, 1)(rng) == 1;

  switch (move) {
    case 0:  // grow
      if (upper_edge) {
        if (!bands[b].hi) return std::nullopt;
        bands[b].hi = *bands[b].hi + delta;
      } else {
        bands[b].lo = std::max<std::int64_t>(0, bands[b].lo - delta);
      }
      break;
    case 1:  // shrink
      if (upper_edge) {
        if (!bands[b].hi) return std::nullopt;
        bands[b].hi = *bands[b].hi - delta;
      } else {
        bands[b].lo += delta;
      }
      break;
    case 2: {  // split: cut a gap of width delta out of the band
      if (static_cast<int>(bands.size()) >= max_bands) return std::nullopt;
      const std::int64_t lo = bands[b].lo;
      const std::int64_t hi = bands[b].hi ? *bands[b].hi : lo + 4 * step;
      if (hi - lo < delta + 2) return std::nullopt;
      const std::int64_t cut = std::uniform_int_distribution<std::int64_t>(lo + 1, hi - delta - 1)(rng);
      Band left{lo, cut - 1};
      Band right{cut + delta, bands[b].hi};
      bands[b] = left;
      bands.insert(bands.begin() + static_cast<std::ptrdiff_t>(b) + 1, right);
      break;
    }
    default:  // merge with the next band
      if (b + 1 >= bands.size()) return std::nullopt;
      bands[b].hi = bands[b + 1].hi;
      bands.erase(bands.begin() + static_cast<std::ptrdiff_t>(b) + 1);
      break;
  }
  try {
    BandScheme candidate(std::move(bands));
    if (candidate == scheme) return std::nullopt;
    return candidate;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

SearchResult local_search_bands(const OptimizationProblem& problem) {
  return local_search_bands(problem, sweep_threshold(problem));
}

SearchResult local_search_bands(const OptimizationProblem& problem, const SweepResult& sweep) {
  problem.validate();
  SchemeEvaluator evaluate(problem);
  std::mt19937_64 rng(problem.seed);
  std::int64_t step = problem.step;
  if (step == 0) {
    step = std::max<std::int64_t>(1, std::llround(heralding_moments(problem.xi, problem.detector).second / 20.0));
  }
  // Consecutive rejections before jumping back to the best scheme.
  constexpr int kPatience = 12;

  SearchResult result;
  BandScheme current = BandScheme::upper(sweep.best_threshold);
  double current_value = evaluate(current);
  result.best_scheme = current;
  result.best_value = current_value;
  result.trace.push_back({0, current.to_string(), current_value, true});

  int rejections = 0;
  for (std::int64_t s = 1; s < problem.budget; ++s) {
    std::optional<BandScheme> candidate;
    for (int attempt = 0; attempt < 64 && !candidate; ++attempt) {
      candidate = propose(current, problem.max_bands, step, rng);
    }
    if (!candidate) candidate = current;
    const double value = evaluate(*candidate);
    const bool accepted = value > current_value;
    result.trace.push_back({s, candidate->to_string(), value, accepted});
    if (accepted) {
      current = *candidate;
      current_value = value;
      rejections = 0;
      if (value > result.best_value) {
        result.best_scheme = current;
        result.best_value = value;
      }
    } else if (++rejections >= kPatience) {
      current = result.best_scheme;
      current_value = result.best_value;
      rejections = 0;
    }
  }
  return result;
}

}  // namespace eoslab
