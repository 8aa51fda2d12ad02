#include "eoslab/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "eoslab/errors.hpp"

namespace eoslab::cli {

using nlohmann::json;

namespace {

// Object reader that rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  ~Fields() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string model_name(HeraldingModel m) { return m == HeraldingModel::kDelta ? "delta" : "quasi_gaussian"; }

json bands_to_json(const std::vector<Band>& bands) {
  json out = json::array();
  for (const auto& b : bands) out.push_back(json::array({b.lo, b.hi ? json(*b.hi) : json(nullptr)}));
  return out;
}

std::vector<Band> bands_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "probe.bands: expected a non-empty list of [A, B] pairs");
  std::vector<Band> bands;
  for (const auto& pair : j) {
    require(pair.is_array() && pair.size() == 2 && pair[0].is_number_integer() &&
                (pair[1].is_null() || pair[1].is_number_integer()),
            "probe.bands: each band is [A, B] with integer A and integer or null B");
    Band b{pair[0].get<std::int64_t>(), std::nullopt};
    if (!pair[1].is_null()) b.hi = pair[1].get<std::int64_t>();
    bands.push_back(b);
  }
  try {
    (void)BandScheme(bands);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("probe.bands: ") + e.what());
  }
  return bands;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << "# config-hash=" << hash << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

 private:
  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::string signal_label(const SignalSpec& s, std::size_t index) {
  return s.kind + (index ? "_" + std::to_string(index) : "");
}

}  // namespace

json RunConfig::to_json() const {
  json probe_j{{"family", probe.family},
               {"nu", probe.nu},
               {"bands", probe.bands ? bands_to_json(*probe.bands) : json(nullptr)},
               {"detector", probe.detector ? json{{"eta", probe.detector->eta}, {"gain", probe.detector->gain}}
                                           : json(nullptr)},
               {"heralding_model", model_name(probe.heralding_model)},
               {"tail_mass", probe.truncation.tail_mass},
               {"max_states", probe.truncation.max_states}};
  json signals_j = json::array();
  for (const auto& s : signals) {
    signals_j.push_back({{"kind", s.kind},
                         {"alpha", s.alpha},
                         {"eps", s.eps},
                         {"moments", s.moments},
                         {"match_variance", s.match_variance}});
  }
  return json{{"probe", probe_j},
              {"signals", signals_j},
              {"coupling",
               {{"g", coupling.g ? json(*coupling.g) : json(nullptr)},
                {"target_peak_to_peak", coupling.target_peak_to_peak},
                {"tolerance", coupling.tolerance},
                {"initial_upper", coupling.initial_upper},
                {"reference_nu", coupling.reference_nu}}},
              {"K", K},
              {"photon_sum", photon_sum == PhotonSum::kExact ? "exact" : "euler_maclaurin"},
              {"threads", threads},
              {"bin_width", bin_width},
              {"seed", seed},
              {"out_dir", out_dir.string()},
              {"wigner", {{"points", wigner_points}, {"r_min", wigner_r_min}}},
              {"eta_sweep", {{"etas", etas}, {"gain", gain}}},
              {"bandopt",
               {{"objective", objective},
                {"moment_order", moment_order},
                {"max_bands", max_bands},
                {"budget", budget},
                {"step", step},
                {"sweep_points", sweep_points}}}};
}

EosOptions RunConfig::eos_options() const {
  EosOptions o;
  o.photon_sum = photon_sum;
  o.threads = threads;
  return o;
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Fields top(j, "config");
  if (top.has("probe")) {
    Fields p(top.at("probe"), "probe");
    p.read("family", c.probe.family);
    p.read("nu", c.probe.nu);
    if (p.has("bands")) c.probe.bands = bands_from_json(p.at("bands"));
    if (p.has("detector")) {
      Fields d(p.at("detector"), "probe.detector");
      HeraldingDetector det;
      d.read("eta", det.eta);
      d.read("gain", det.gain);
      c.probe.detector = det;
    }
    std::string model = model_name(c.probe.heralding_model);
    p.read("heralding_model", model);
    require(model == "delta" || model == "quasi_gaussian", "probe.heralding_model: expected delta or quasi_gaussian");
    c.probe.heralding_model = model == "delta" ? HeraldingModel::kDelta : HeraldingModel::kQuasiGaussian;
    p.read("tail_mass", c.probe.truncation.tail_mass);
    p.read("max_states", c.probe.truncation.max_states);
  }
  if (top.has("signals")) {
    const json& list = top.at("signals");
    require(list.is_array() && !list.empty() && list.size() <= 2, "signals: expected one or two signals");
    c.signals.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      Fields s(list[i], "signals[" + std::to_string(i) + "]");
      SignalSpec spec;
      s.read("kind", spec.kind);
      s.read("alpha", spec.alpha);
      s.read("eps", spec.eps);
      s.read("moments", spec.moments);
      s.read("match_variance", spec.match_variance);
      c.signals.push_back(spec);
    }
  }
  if (top.has("coupling")) {
    Fields g(top.at("coupling"), "coupling");
    if (g.has("g")) {
      double value = 0.0;
      g.read("g", value);
      c.coupling.g = value;
    }
    g.read("target_peak_to_peak", c.coupling.target_peak_to_peak);
    g.read("tolerance", c.coupling.tolerance);
    g.read("initial_upper", c.coupling.initial_upper);
    g.read("reference_nu", c.coupling.reference_nu);
  }
  top.read("K", c.K);
  std::string sum = "exact";
  top.read("photon_sum", sum);
  require(sum == "exact" || sum == "euler_maclaurin", "photon_sum: expected exact or euler_maclaurin");
  c.photon_sum = sum == "exact" ? PhotonSum::kExact : PhotonSum::kEulerMaclaurin;
  top.read("threads", c.threads);
  top.read("bin_width", c.bin_width);
  top.read("seed", c.seed);
  std::string out_dir = c.out_dir.string();
  top.read("out_dir", out_dir);
  c.out_dir = out_dir;
  if (top.has("wigner")) {
    Fields w(top.at("wigner"), "wigner");
    w.read("points", c.wigner_points);
    w.read("r_min", c.wigner_r_min);
  }
  if (top.has("eta_sweep")) {
    Fields e(top.at("eta_sweep"), "eta_sweep");
    e.read("etas", c.etas);
    e.read("gain", c.gain);
  }
  if (top.has("bandopt")) {
    Fields b(top.at("bandopt"), "bandopt");
    b.read("objective", c.objective);
    b.read("moment_order", c.moment_order);
    b.read("max_bands", c.max_bands);
    b.read("budget", c.budget);
    b.read("step", c.step);
    b.read("sweep_points", c.sweep_points);
  }

  const auto& f = c.probe.family;
  require(f == "coherent" || f == "thermal" || f == "fock" || f == "bcs",
          "probe.family: expected coherent, thermal, fock or bcs");
  require(std::isfinite(c.probe.nu) && c.probe.nu >= 0.0, "probe.nu: must be >= 0");
  require(f != "fock" || c.probe.nu == std::floor(c.probe.nu), "probe.nu: a Fock probe needs an integer");
  require(f == "bcs" || (!c.probe.bands && !c.probe.detector), "probe.bands and probe.detector apply to bcs only");
  if (c.probe.detector) {
    try {
      c.probe.detector->validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("probe.detector: ") + e.what());
    }
  }
  require(c.probe.truncation.tail_mass > 0.0 && c.probe.truncation.tail_mass < 1.0, "probe.tail_mass: must be in (0, 1)");
  require(c.probe.truncation.max_states >= 1, "probe.max_states: must be >= 1");
  for (const auto& s : c.signals) {
    require(s.kind == "vacuum" || s.kind == "cat" || s.kind == "classical" || s.kind == "custom",
            "signals.kind: expected vacuum, cat, classical or custom");
    require(s.kind != "cat" || (std::isfinite(s.alpha) && s.alpha > 0.0), "signals.alpha: must be > 0");
    require(s.kind != "classical" || std::abs(s.eps) <= 1.0, "signals.eps: must satisfy |eps| <= 1");
    require(s.kind != "custom" || static_cast<int>(s.moments.size()) > c.K,
            "signals.moments: a custom signal needs moments 0..K");
  }
  require(!c.coupling.g || (std::isfinite(*c.coupling.g) && *c.coupling.g >= 0.0), "coupling.g: must be >= 0");
  require(c.coupling.target_peak_to_peak >= 0.0, "coupling.target_peak_to_peak: must be >= 0");
  require(c.coupling.tolerance > 0.0, "coupling.tolerance: must be > 0");
  require(c.coupling.initial_upper > 0.0, "coupling.initial_upper: must be > 0");
  require(c.coupling.reference_nu > 0.0, "coupling.reference_nu: must be > 0");
  require(c.K >= 0 && c.K <= 64, "K: must be in [0, 64]");
  require(c.bin_width >= 0, "bin_width: must be >= 0");
  require(c.wigner_points >= 2, "wigner.points: must be >= 2");
  require(c.wigner_r_min > 0.0, "wigner.r_min: must be > 0");
  require(!c.etas.empty(), "eta_sweep.etas: must not be empty");
  for (double eta : c.etas) require(eta > 0.0 && eta <= 1.0, "eta_sweep.etas: each eta must be in (0, 1]");
  require(c.gain > 0.0, "eta_sweep.gain: must be > 0");
  require(c.objective == "peak_to_peak_vacuum" || c.objective == "discrimination_l1" ||
              c.objective == "moment_isolation",
          "bandopt.objective: expected peak_to_peak_vacuum, discrimination_l1 or moment_isolation");
  require(c.objective != "discrimination_l1" || c.signals.size() == 2, "bandopt.objective: discrimination needs two signals");
  require(c.objective != "moment_isolation" || (c.moment_order >= 1 && c.moment_order <= c.K),
          "bandopt.moment_order: must be in [1, K]");
  require(c.max_bands >= 1, "bandopt.max_bands: must be >= 1");
  require(c.budget >= 1, "bandopt.budget: must be >= 1");
  require(c.step >= 0, "bandopt.step: must be >= 0");
  require(c.sweep_points >= 1, "bandopt.sweep_points: must be >= 1");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::string config_hash(const RunConfig& config) {
  json j = config.to_json();
  j.erase("out_dir");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CalibrationResult calibrate_peak_to_peak(const SusceptibilityTable& table, int K, double target, double tolerance,
                                         double initial_upper) {
  CalibrationResult r;
  if (target == 0.0) return r;
  // +infinity marks a truncation failure, which only happens past the target.
  auto pp = [&](double g) {
    try {
      return d_peak_to_peak(d_curve(table, vacuum_moments(g, K), K));
    } catch (const TruncationError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double lo = 0.0;
  double hi = initial_upper;
  double pp_hi = pp(hi);
  while (pp_hi < target) {
    if (r.expansions == 10) {
      throw NumericalError("calibration: target peak-to-peak not bracketed after 10 doublings");
    }
    lo = hi;
    hi *= 2.0;
    pp_hi = pp(hi);
    ++r.expansions;
  }
  double g = hi;
  double value = pp_hi;
  for (r.iterations = 0; r.iterations < 200; ++r.iterations) {
    if (std::abs(value - target) <= tolerance) break;
    g = 0.5 * (lo + hi);
    value = pp(g);
    (value < target ? lo : hi) = g;
  }
  if (!(std::abs(value - target) <= tolerance)) throw NumericalError("calibration: bisection did not converge");
  r.g = g;
  r.peak_to_peak = value;
  r.bracket_low = lo;
  r.bracket_high = hi;
  return r;
}

double resolve_coupling(const RunConfig& config) {
  if (config.coupling.g) return *config.coupling.g;
  const auto table = susceptibilities(coherent_dist(config.coupling.reference_nu, config.probe.truncation), config.K,
                                      config.eos_options());
  return calibrate_peak_to_peak(table, config.K, config.coupling.target_peak_to_peak, config.coupling.tolerance,
                                config.coupling.initial_upper)
      .g;
}

std::vector<MomentSequence> build_signals(const RunConfig& config, double g) {
  std::vector<MomentSequence> out;
  const int K = config.K;
  for (const auto& s : config.signals) {
    if (s.kind == "vacuum") {
      out.push_back(vacuum_moments(g, K));
    } else if (s.kind == "cat") {
      double gc = g;
      if (s.match_variance) {
        const double m2 = cat_moments(s.alpha, 1.0, 2)[2];
        gc = g / std::sqrt(m2);
      }
      out.push_back(cat_moments(s.alpha, gc, K));
    } else if (s.kind == "classical") {
      out.push_back(classical_field_moments(s.eps, K));
    } else {
      MomentSequence m = custom_moments(s.moments).truncated(K);
      double lambda = g;
      if (s.match_variance) {
        lambda = m[2] > 0.0 ? g / std::sqrt(m[2]) : 0.0;
      }
      out.push_back(m.rescaled(lambda));
    }
  }
  return out;
}

namespace {

OptimizationProblem threshold_problem(const RunConfig& config, double g) {
  OptimizationProblem p;
  p.xi = xi_from_mean(config.probe.nu);
  p.detector = config.probe.detector;
  p.model = config.probe.heralding_model;
  p.K = config.K;
  p.objective.kind = ObjectiveKind::kPeakToPeakVacuum;
  p.objective.signal_a = vacuum_moments(g, config.K);
  p.policy = config.probe.truncation;
  p.eos = config.eos_options();
  p.sweep_points = config.sweep_points;
  return p;
}

}  // namespace

PhotonDistribution build_probe(const RunConfig& config, double g) {
  const auto& p = config.probe;
  if (p.family == "coherent") return coherent_dist(p.nu, p.truncation);
  if (p.family == "thermal") return thermal_dist(xi_from_mean(p.nu), p.truncation);
  if (p.family == "fock") return fock_dist(static_cast<std::int64_t>(p.nu));
  const double xi = xi_from_mean(p.nu);
  if (p.bands) return bcs_dist(xi, BandScheme(*p.bands), p.detector, p.heralding_model, p.truncation);
  const SweepResult sweep = sweep_threshold(threshold_problem(config, g));
  return bcs_dist(xi, BandScheme::upper(sweep.best_threshold), p.detector, p.heralding_model, p.truncation);
}

bool has_double_peak(const DCurve& curve, double prominence) {
  const double scale = d_max_abs(curve);
  if (scale == 0.0) return false;
  std::vector<double> v;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    if (curve.grid[i] > 0) v.push_back(curve.values[i]);
  }
  int peaks = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    // Prominence: height above the higher of the two minima that separate this
    // peak from taller ground on either side.
    double left_min = v[i];
    std::size_t l = i;
    while (l > 0 && v[l - 1] <= v[i]) left_min = std::min(left_min, v[--l]);
    double right_min = v[i];
    std::size_t r = i;
    while (r + 1 < v.size() && v[r + 1] <= v[i]) right_min = std::min(right_min, v[++r]);
    if (v[i] - std::max(left_min, right_min) >= prominence * scale) ++peaks;
  }
  return peaks >= 2;
}

EtaSweep eta_sweep(double xi, std::int64_t photon_threshold, const std::vector<double>& etas, double gain,
                   HeraldingModel model, const MomentSequence& vacuum, const MomentSequence& cat, int K,
                   double coherent_nu, const EosOptions& options, const TruncationPolicy& policy) {
  EtaSweep sweep;
  sweep.photon_threshold = photon_threshold;
  const auto coherent_table = susceptibilities(coherent_dist(coherent_nu, policy), K, options);
  sweep.coherent_peak_to_peak = d_peak_to_peak(d_curve(coherent_table, vacuum, K));
  for (double eta : etas) {
    const HeraldingDetector detector{eta, gain};
    const auto detected = static_cast<std::int64_t>(std::llround(gain * eta * static_cast<double>(photon_threshold)));
    const auto probe = bcs_dist(xi, BandScheme::upper(detected), detector, model, policy);
    const auto table = susceptibilities(probe, K, options);
    EtaSweepRow row{eta, detected, 0.0, 0.0, 0.0, false, d_curve(table, vacuum, K), d_curve(table, cat, K)};
    row.peak_to_peak_vacuum = d_peak_to_peak(row.d_vacuum);
    row.peak_to_peak_cat = d_peak_to_peak(row.d_cat);
    row.advantage_ratio = row.peak_to_peak_vacuum / sweep.coherent_peak_to_peak;
    row.double_peak = has_double_peak(row.d_cat);
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

namespace {

json probe_summary(const PhotonDistribution& probe) {
  return json{{"descriptor", probe.descriptor()},
              {"mean", probe.mean()},
              {"variance", probe.variance()},
              {"fano_factor", probe.fano_factor()},
              {"support_min", probe.support_min()},
              {"support_max", probe.support_max()}};
}

void cmd_probe_dist(const RunConfig& config, const std::string& hash) {
  const double g = config.probe.family == "bcs" && !config.probe.bands ? resolve_coupling(config) : 0.0;
  const auto probe = build_probe(config, g);
  CsvWriter csv(config.out_dir / "probe_dist.csv", hash, {"n", "P", "log10_P"});
  for (std::int64_t n = probe.support_min(); n <= probe.support_max(); ++n) {
    const double p = probe(n);
    csv.row(n, p, std::log10(p));
  }
  write_json(config.out_dir / "probe_summary.json", probe_summary(probe));
}

void cmd_eos(const RunConfig& config, const std::string& hash) {
  const double g = resolve_coupling(config);
  const auto probe = build_probe(config, g);
  const auto signals = build_signals(config, g);
  const int K = config.K;
  const auto table = susceptibilities(probe, K, config.eos_options());
  const auto& grid = table.grid();

  std::vector<std::string> header{"dn"};
  for (int k = 0; k <= K; ++k) header.push_back("chi_" + std::to_string(k));
  for (int k = 0; k <= K; ++k) header.push_back("chi_norm_" + std::to_string(k));
  {
    CsvWriter csv(config.out_dir / "eos_susceptibilities.csv", hash, header);
    std::vector<std::vector<double>> normalized;
    for (int k = 0; k <= K; ++k) normalized.push_back(table.normalized(k));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> cells{std::to_string(grid[i])};
      for (int k = 0; k <= K; ++k) cells.push_back(format_double(table.chi(k)[i]));
      for (int k = 0; k <= K; ++k) cells.push_back(format_double(normalized[static_cast<std::size_t>(k)][i]));
      csv.row(cells);
    }
  }

  std::vector<DeltaNDistribution> dists;
  std::vector<DCurve> curves;
  for (const auto& s : signals) {
    dists.push_back(combine(table, s, K));
    curves.push_back(d_curve(table, s, K));
  }
  std::vector<std::string> dist_header{"dn", "P_none"};
  std::vector<std::string> d_header{"dn"};
  for (std::size_t i = 0; i < signals.size(); ++i) {
    dist_header.push_back("P_" + signal_label(config.signals[i], i));
    d_header.push_back("D_" + signal_label(config.signals[i], i));
  }
  {
    CsvWriter csv(config.out_dir / "eos_distribution.csv", hash, dist_header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> cells{std::to_string(grid[i]), format_double(table.chi(0)[i])};
      for (const auto& d : dists) cells.push_back(format_double(d.probabilities[i]));
      csv.row(cells);
    }
  }
  {
    CsvWriter csv(config.out_dir / "eos_d_curves.csv", hash, d_header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> cells{std::to_string(grid[i])};
      for (const auto& c : curves) cells.push_back(format_double(c.values[i]));
      csv.row(cells);
    }
  }
  const std::int64_t width = config.bin_width == 0 ? plotting_bin_width(probe.mean()) : config.bin_width;
  if (width > 1) {
    DeltaNDistribution none{grid, table.chi(0), table.probe_ref()};
    const auto binned_none = coarse_grain(none, width);
    std::vector<DeltaNDistribution> binned;
    for (const auto& d : dists) binned.push_back(coarse_grain(d, width));
    CsvWriter csv(config.out_dir / "eos_distribution_binned.csv", hash, dist_header);
    for (std::size_t i = 0; i < binned_none.grid.size(); ++i) {
      std::vector<std::string> cells{std::to_string(binned_none.grid[i]), format_double(binned_none.probabilities[i])};
      for (const auto& d : binned) cells.push_back(format_double(d.probabilities[i]));
      csv.row(cells);
    }
  }

  json summary{{"g", g},
               {"K", K},
               {"probe", probe_summary(probe)},
               {"coupling_convention", SusceptibilityTable::kCouplingConvention},
               {"bin_width", width}};
  json per_signal = json::array();
  for (std::size_t i = 0; i < signals.size(); ++i) {
    double sum = 0.0;
    for (double v : curves[i].values) sum += v;
    per_signal.push_back({{"label", signal_label(config.signals[i], i)},
                          {"descriptor", signals[i].descriptor()},
                          {"m2", K >= 2 ? signals[i][2] : 0.0},
                          {"peak_to_peak", d_peak_to_peak(curves[i])},
                          {"max_abs", d_max_abs(curves[i])},
                          {"d_sum", sum}});
  }
  summary["signals"] = per_signal;
  if (curves.size() == 2) summary["l1_distance"] = l1_distance(curves[0], curves[1]);
  json peaks = json::array();
  for (int k = 0; k <= K; ++k) peaks.push_back(table.peak_abs(k));
  summary["chi_peak_abs"] = peaks;
  write_json(config.out_dir / "eos_summary.json", summary);
}

void cmd_calibrate(const RunConfig& config, const std::string& hash) {
  (void)hash;
  const auto& c = config.coupling;
  const int K = config.K;
  const auto table = susceptibilities(coherent_dist(c.reference_nu, config.probe.truncation), K, config.eos_options());
  const auto r = calibrate_peak_to_peak(table, K, c.target_peak_to_peak, c.tolerance, c.initial_upper);
  const auto doubled =
      susceptibilities(coherent_dist(2.0 * c.reference_nu, config.probe.truncation), K, config.eos_options());
  const auto r2 = calibrate_peak_to_peak(doubled, K, c.target_peak_to_peak, c.tolerance, c.initial_upper);
  write_json(config.out_dir / "calibration.json",
             json{{"config_hash", hash},
                  {"reference_nu", c.reference_nu},
                  {"K", K},
                  {"target_peak_to_peak", c.target_peak_to_peak},
                  {"tolerance", c.tolerance},
                  {"g", r.g},
                  {"nu_g2", c.reference_nu * r.g * r.g},
                  {"achieved_peak_to_peak", r.peak_to_peak},
                  {"iterations", r.iterations},
                  {"expansions", r.expansions},
                  {"bracket", {r.bracket_low, r.bracket_high}},
                  {"g_at_double_nu", r2.g},
                  {"g_decreases_with_nu", r2.g < r.g || c.target_peak_to_peak == 0.0}});
}

void cmd_eta_sweep(const RunConfig& config, const std::string& hash) {
  require(config.probe.family == "bcs", "eta-sweep: the probe must be a bcs");
  const double g = resolve_coupling(config);
  const int K = config.K;
  std::int64_t threshold = 0;
  if (config.probe.bands) {
    const auto& bands = *config.probe.bands;
    require(bands.size() == 1 && !bands[0].hi, "eta-sweep: the bcs must be a single upper band [A, null]");
    threshold = bands[0].lo;
  } else {
    RunConfig ideal = config;
    ideal.probe.detector.reset();
    threshold = sweep_threshold(threshold_problem(ideal, g)).best_threshold;
  }
  double alpha = kDefaultCatAlpha;
  for (const auto& s : config.signals) {
    if (s.kind == "cat") {
      alpha = s.alpha;
      break;
    }
  }
  const MomentSequence vacuum = vacuum_moments(g, K);
  const MomentSequence cat = cat_moments(alpha, g / std::sqrt(cat_moments(alpha, 1.0, 2)[2]), K);
  const auto sweep = eta_sweep(xi_from_mean(config.probe.nu), threshold, config.etas, config.gain,
                               config.probe.heralding_model, vacuum, cat, K, config.probe.nu, config.eos_options(),
                               config.probe.truncation);
  {
    CsvWriter csv(config.out_dir / "eta_sweep.csv", hash,
                  {"eta", "detected_threshold", "pp_vacuum", "pp_cat", "advantage_ratio", "double_peak"});
    for (const auto& r : sweep.rows) {
      csv.row(r.eta, r.detected_threshold, r.peak_to_peak_vacuum, r.peak_to_peak_cat, r.advantage_ratio,
              r.double_peak ? 1 : 0);
    }
  }
  {
    CsvWriter csv(config.out_dir / "eta_sweep_curves.csv", hash, {"eta", "dn", "D_vacuum", "D_cat"});
    for (const auto& r : sweep.rows) {
      for (std::size_t i = 0; i < r.d_vacuum.grid.size(); ++i) {
        csv.row(r.eta, r.d_vacuum.grid[i], r.d_vacuum.values[i], r.d_cat.values[i]);
      }
    }
  }
  json rows = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    rows.push_back({{"eta", r.eta},
                    {"detected_threshold", r.detected_threshold},
                    {"advantage_ratio", r.advantage_ratio},
                    {"double_peak", r.double_peak}});
  }
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    for (std::size_t j = 0; j < sweep.rows.size(); ++j) {
      if (sweep.rows[i].eta < sweep.rows[j].eta && sweep.rows[i].advantage_ratio >= sweep.rows[j].advantage_ratio) {
        monotone = false;
      }
    }
  }
  write_json(config.out_dir / "eta_sweep.json",
             json{{"g", g},
                  {"K", K},
                  {"photon_threshold", threshold},
                  {"gain", config.gain},
                  {"heralding_model", model_name(config.probe.heralding_model)},
                  {"coherent_peak_to_peak", sweep.coherent_peak_to_peak},
                  {"advantage_decreases_with_eta", monotone},
                  {"rows", rows}});
}

void cmd_wigner(const RunConfig& config, const std::string& hash) {
  const double g = config.probe.family == "bcs" && !config.probe.bands ? resolve_coupling(config) : 0.0;
  const auto probe = build_probe(config, g);
  const WignerGrid grid = wigner_grid(probe, config.wigner_points, config.wigner_r_min);
  {
    CsvWriter csv(config.out_dir / "wigner.csv", hash, {"r", "W"});
    for (std::size_t i = 0; i < grid.radial_points.size(); ++i) csv.row(grid.radial_points[i], grid.values[i]);
  }
  write_json(config.out_dir / "wigner.json",
             json{{"source", grid.source},
                  {"radial_points", grid.radial_points},
                  {"values", grid.values},
                  {"W0", grid.values.front()},
                  {"minimum", wigner_minimum(grid)},
                  {"normalization", wigner_normalization(probe)},
                  {"negativity_volume", negativity_volume(probe)}});
}

void cmd_bandopt(const RunConfig& config, const std::string& hash) {
  require(config.probe.family == "bcs", "bandopt: the probe must be a bcs");
  const double g = resolve_coupling(config);
  OptimizationProblem p = threshold_problem(config, g);
  const auto signals = build_signals(config, g);
  if (config.objective == "discrimination_l1") {
    p.objective.kind = ObjectiveKind::kDiscriminationL1;
    p.objective.signal_a = signals.at(0);
    p.objective.signal_b = signals.at(1);
  } else if (config.objective == "moment_isolation") {
    p.objective.kind = ObjectiveKind::kMomentIsolation;
    p.objective.coupling = g;
    p.objective.moment_order = config.moment_order;
  }
  p.max_bands = config.max_bands;
  p.budget = config.budget;
  p.seed = config.seed;
  p.step = config.step;
  const SweepResult sweep = sweep_threshold(p);
  const SearchResult search = local_search_bands(p, sweep);
  {
    CsvWriter csv(config.out_dir / "bandopt_sweep.csv", hash, {"threshold", "objective"});
    for (std::size_t i = 0; i < sweep.thresholds.size(); ++i) csv.row(sweep.thresholds[i], sweep.values[i]);
  }
  {
    std::ofstream trace(config.out_dir / "bandopt_trace.jsonl");
    for (const auto& t : search.trace) {
      json line{{"step", t.step}, {"scheme", t.scheme}, {"accepted", t.accepted}};
      line["objective"] = std::isfinite(t.objective) ? json(t.objective) : json(nullptr);
      trace << line.dump() << "\n";
    }
  }
  write_json(config.out_dir / "bandopt.json",
             json{{"config_hash", hash},
                  {"g", g},
                  {"objective", config.objective},
                  {"sweep_best_threshold", sweep.best_threshold},
                  {"sweep_best_value", sweep.best_value},
                  {"best_scheme", search.best_scheme.to_string()},
                  {"best_bands", bands_to_json(search.best_scheme.bands())},
                  {"best_value", search.best_value},
                  {"evaluations", search.trace.size()}});
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"eoslab: electro-optic sampling with classical and band-conditioned probes"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"probe-dist", "Photon-number distribution of the probe"},
      {"eos", "Susceptibilities, dn distribution and D-curves for each signal"},
      {"calibrate", "Coupling g that gives the target coherent peak-to-peak"},
      {"eta-sweep", "Upper-BCS advantage versus heralding efficiency"},
      {"wigner", "Radial Wigner function, normalization and negativity"},
      {"bandopt", "Threshold sweep followed by band local search"}};
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "Random seed (overrides seed)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig config = load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) config.seed = *seed;
    std::filesystem::create_directories(config.out_dir);
    const std::string hash = config_hash(config);
    if (command == "probe-dist") cmd_probe_dist(config, hash);
    if (command == "eos") cmd_eos(config, hash);
    if (command == "calibrate") cmd_calibrate(config, hash);
    if (command == "eta-sweep") cmd_eta_sweep(config, hash);
    if (command == "wigner") cmd_wigner(config, hash);
    if (command == "bandopt") cmd_bandopt(config, hash);
  } catch (const ConfigError& e) {
    std::cerr << "eoslab: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "eoslab: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const TruncationError& e) {
    std::cerr << "eoslab: " << e.what() << "\n"
              << "advice: raise K or lower the coupling; the truncated moment series went negative\n";
    return kNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "eoslab: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "eoslab: numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kSuccess;
}

}  // namespace eoslab::cli
