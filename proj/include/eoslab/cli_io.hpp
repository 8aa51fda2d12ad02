#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eoslab/bandopt.hpp"
#include "eoslab/eos.hpp"
#include "eoslab/probes.hpp"
#include "eoslab/signals.hpp"
#include "eoslab/wigner.hpp"

namespace eoslab::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalError = 3 };

struct ProbeSpec {
  std::string family = "coherent";  // coherent | thermal | fock | bcs
  double nu = 1000.0;                // mean photon number (bcs: of the unconditioned source)
  std::optional<std::vector<Band>> bands;  // bcs only; empty means threshold from the sweep
  std::optional<HeraldingDetector> detector;
  HeraldingModel heralding_model = HeraldingModel::kQuasiGaussian;
  TruncationPolicy truncation;
};

struct SignalSpec {
  std::string kind = "vacuum";  // vacuum | cat | classical | custom
  double alpha = kDefaultCatAlpha;
  double eps = 0.0;                 // classical
  std::vector<double> moments;      // custom, unscaled
  /// Rescale so that m_2 equals the calibrated vacuum variance g^2.
  bool match_variance = true;
};

struct CouplingSpec {
  std::optional<double> g;  // fixed coupling; otherwise calibrated
  double target_peak_to_peak = 0.06;
  double tolerance = 1e-4;
  double initial_upper = 0.01;
  /// Mean photon number of the coherent reference used for calibration.
  double reference_nu = 1000.0;
};

struct RunConfig {
  ProbeSpec probe;
  std::vector<SignalSpec> signals{SignalSpec{}};
  CouplingSpec coupling;
  int K = 6;
  PhotonSum photon_sum = PhotonSum::kExact;
  unsigned threads = 0;
  std::int64_t bin_width = 1;  // 0: plotting_bin_width(nu)
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  int wigner_points = 400;
  double wigner_r_min = 1e-3;

  std::vector<double> etas{1.0, 0.9, 0.8, 0.75, 0.7, 0.5};
  double gain = 1.0;

  std::string objective = "peak_to_peak_vacuum";  // | discrimination_l1 | moment_isolation
  int moment_order = 2;
  int max_bands = 1;
  std::int64_t budget = 1;
  std::int64_t step = 0;
  int sweep_points = 61;

  /// Canonical JSON form (every field, sorted keys).
  nlohmann::json to_json() const;
  EosOptions eos_options() const;
};

/// Throws ConfigError on unknown keys, wrong types or out-of-range values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct CalibrationResult {
  double g = 0.0;
  double peak_to_peak = 0.0;
  int iterations = 0;
  int expansions = 0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
};

/// Bisection on g until d_peak_to_peak(vacuum) is within tolerance of the target.
/// The upper bracket doubles up to ten times; then NumericalError.
/// A truncation failure counts as overshooting the target.
CalibrationResult calibrate_peak_to_peak(const SusceptibilityTable& table, int K, double target,
                                         double tolerance = 1e-4, double initial_upper = 0.01);

/// Coupling g from the config: fixed, or calibrated on a coherent reference.
double resolve_coupling(const RunConfig& config);

/// Moment sequences of the configured signals at coupling g.
std::vector<MomentSequence> build_signals(const RunConfig& config, double g);

/// The configured probe; a bcs probe without bands uses the swept upper threshold.
PhotonDistribution build_probe(const RunConfig& config, double g);

/// Two positive maxima on the dn > 0 side, each with prominence at least
/// `prominence` times max |D|.
bool has_double_peak(const DCurve& curve, double prominence = 0.02);

struct EtaSweepRow {
  double eta;
  std::int64_t detected_threshold;
  double peak_to_peak_vacuum;
  double peak_to_peak_cat;
  double advantage_ratio;
  bool double_peak;
  DCurve d_vacuum;
  DCurve d_cat;
};

struct EtaSweep {
  std::int64_t photon_threshold = 0;
  double coherent_peak_to_peak = 0.0;
  std::vector<EtaSweepRow> rows;
};

/// Upper BCS with heralding efficiency eta, keeping the detected threshold at
/// gain * eta * A so that the accepted photon band stays at [A, inf).
EtaSweep eta_sweep(double xi, std::int64_t photon_threshold, const std::vector<double>& etas, double gain,
                   HeraldingModel model, const MomentSequence& vacuum, const MomentSequence& cat, int K,
                   double coherent_nu, const EosOptions& options = {}, const TruncationPolicy& policy = {});

/// `eoslab <command> --config <path> [--out <dir>] [--seed <int>]`.
int run(int argc, const char* const* argv);

}  // namespace eoslab::cli
