#include "eoslab/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "eoslab/errors.hpp"
#include "eoslab/numerics.hpp"

namespace eoslab {

double wigner_eval(const PhotonDistribution& dist, double beta_abs) {
  if (!(beta_abs >= 0.0)) throw DomainError("wigner_eval: |beta| must be non-negative");
  const double x = 4.0 * beta_abs * beta_abs;
  return 2.0 / std::numbers::pi *
         numerics::alternating_laguerre_sum(dist.weights(), dist.support_min(), x);
}

double wigner_radial_extent(const PhotonDistribution& dist) {
  // Fock m has its outer turning point at r = sqrt(m + 1/2); five units beyond it
  // the Gaussian envelope leaves less than 1e-10 of the mass.
  return std::sqrt(static_cast<double>(dist.support_max()) + 1.0) + 5.0;
}

WignerGrid wigner_grid(const PhotonDistribution& dist, int points, double r_min) {
  if (points < 2) throw DomainError("wigner_grid: need at least two points");
  const double r_max = wigner_radial_extent(dist);
  if (!(r_min > 0.0 && r_min < r_max)) throw DomainError("wigner_grid: r_min outside (0, r_max)");
  WignerGrid grid;
  grid.source = dist.descriptor();
  grid.radial_points.reserve(static_cast<std::size_t>(points) + 1);
  grid.radial_points.push_back(0.0);
  const double ratio = std::pow(r_max / r_min, 1.0 / (points - 1));
  for (int i = 0; i < points; ++i) {
    grid.radial_points.push_back(i == points - 1 ? r_max : r_min * std::pow(ratio, i));
  }
  grid.values.reserve(grid.radial_points.size());
  for (double r : grid.radial_points) grid.values.push_back(wigner_eval(dist, r));
  return grid;
}

namespace {

// Weights above the top tail of mass kTrimMass are dropped from the radial
// integrals. Each |W_m| <= 2/pi, so the integrals move by less than that mass.
constexpr double kTrimMass = 1e-12;

struct TrimmedWeights {
  std::int64_t first;
  std::span<const double> weights;
};

TrimmedWeights trimmed(const PhotonDistribution& dist) {
  const auto& w = dist.weights();
  std::size_t end = w.size();
  double tail = 0.0;
  while (end > 1 && tail + w[end - 1] <= kTrimMass) tail += w[--end];
  return {dist.support_min(), std::span<const double>(w.data(), end)};
}



// Composite Gauss-Legendre over [0, R]. Panels span at most two local periods
// of the fastest Laguerre oscillation, 2 pi / (2 sqrt(4M + 2 - 4r^2)).
class RadialQuadrature {
 public:
  explicit RadialQuadrature(const PhotonDistribution& dist) : tw_(trimmed(dist)) {
    M_ = static_cast<double>(tw_.first + static_cast<std::int64_t>(tw_.weights.size()) - 1);
    r_max_ = std::sqrt(M_ + 1.0) + 5.0;
  }

  double r_max() const { return r_max_; }

  double panel_length(double r) const {
    const double k = 2.0 * std::sqrt(std::max(4.0 * M_ + 2.0 - 4.0 * r * r, 1.0));
    return std::min(0.2, 4.0 * std::numbers::pi / k);
  }

  void wigner(std::span<const double> r, std::span<double> out) const {
    std::vector<double> x(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) x[i] = 4.0 * r[i] * r[i];
    numerics::alternating_laguerre_sums(tw_.weights, tw_.first, x, out);
    for (double& v : out) v *= 2.0 / std::numbers::pi;
  }

  double wigner(double r) const {
    double out = 0.0;
    wigner(std::span<const double>(&r, 1), std::span<double>(&out, 1));
    return out;
  }

  // Nodes of the rule on [a, b] in increasing order, with matching weights.
  template <int kPoints = 16>
  static void nodes(double a, double b, std::vector<double>& r, std::vector<double>& w, bool append = false) {
    using Legendre = boost::math::quadrature::gauss<double, kPoints>;
    const auto& abscissa = Legendre::abscissa();
    const auto& weight = Legendre::weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    if (!append) {
      r.clear();
      w.clear();
    }
    for (std::size_t i = abscissa.size(); i-- > 0;) {
      r.push_back(mid - half * abscissa[i]);
      w.push_back(half * weight[i]);
    }
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      if (abscissa[i] == 0.0) continue;
      r.push_back(mid + half * abscissa[i]);
      w.push_back(half * weight[i]);
    }
  }

  // 2 pi int_a^b r W(r) dr with W evaluated at the supplied nodes.
  static double rule(const std::vector<double>& r, const std::vector<double>& w, const std::vector<double>& W) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) sum += w[i] * r[i] * W[i];
    return 2.0 * std::numbers::pi * sum;
  }

 private:
  TrimmedWeights tw_;
  double M_ = 0.0;
  double r_max_ = 0.0;
};

}  // namespace

double wigner_normalization(const PhotonDistribution& dist) {
  const RadialQuadrature q(dist);
  std::vector<double> r, w, W;
  double total = 0.0;
  for (double a = 0.0; a < q.r_max();) {
    const double b = std::min(q.r_max(), a + q.panel_length(a));
    RadialQuadrature::nodes(a, b, r, w);
    W.resize(r.size());
    q.wigner(r, W);
    total += RadialQuadrature::rule(r, w, W);
    a = b;
  }
  return total;
}

double negativity_volume(const PhotonDistribution& dist) {
  const RadialQuadrature q(dist);

  // Pass 1: W on every quadrature node, in increasing r.
  std::vector<double> r{0.0}, w{0.0}, W;
  std::vector<double> edges{0.0};
  for (double a = 0.0; a < q.r_max();) {
    const double b = std::min(q.r_max(), a + q.panel_length(a));
    RadialQuadrature::nodes(a, b, r, w, true);
    edges.push_back(b);
    a = b;
  }
  W.resize(r.size());
  q.wigner(r, W);

  // Pass 2: roots between neighbouring samples, refined together by regula
  // falsi. The integrand vanishes at a root, so a root error delta costs O(delta^2).
  struct Bracket {
    double lo, hi, f_lo, f_hi;
    double estimate() const { return f_hi == f_lo ? lo : lo - f_lo * (hi - lo) / (f_hi - f_lo); }
  };
  std::vector<Bracket> brackets;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if ((W[i] < 0.0) != (W[i + 1] < 0.0) && W[i] != 0.0 && W[i + 1] != 0.0) {
      brackets.push_back({r[i], r[i + 1], W[i], W[i + 1]});
    }
  }
  std::vector<double> guess(brackets.size()), f_guess(brackets.size());
  for (int iteration = 0; iteration < 2; ++iteration) {
    for (std::size_t i = 0; i < brackets.size(); ++i) guess[i] = brackets[i].estimate();
    q.wigner(guess, f_guess);
    for (std::size_t i = 0; i < brackets.size(); ++i) {
      auto& br = brackets[i];
      if (f_guess[i] == 0.0) {
        br = {guess[i], guess[i], 0.0, 0.0};
      } else if ((f_guess[i] < 0.0) == (br.f_lo < 0.0)) {
        br.lo = guess[i];
        br.f_lo = f_guess[i];
      } else {
        br.hi = guess[i];
        br.f_hi = f_guess[i];
      }
    }
  }

  // Pass 3: negative pieces, cut at panel edges, with an 8-point rule each.
  std::vector<double> cuts{0.0};
  for (const auto& br : brackets) cuts.push_back(br.estimate());
  cuts.push_back(q.r_max());
  const auto first_nonzero = std::find_if(W.begin(), W.end(), [](double v) { return v != 0.0; });
  bool negative = first_nonzero != W.end() && *first_nonzero < 0.0;
  std::vector<double> nr, nw;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i, negative = !negative) {
    if (!negative) continue;
    double lo = cuts[i];
    const double hi = cuts[i + 1];
    auto edge = std::upper_bound(edges.begin(), edges.end(), lo);
    while (lo < hi) {
      const double next = (edge != edges.end() && *edge < hi) ? *edge++ : hi;
      RadialQuadrature::nodes<8>(lo, next, nr, nw, true);
      lo = next;
    }
  }
  std::vector<double> nW(nr.size());
  q.wigner(nr, nW);
  for (double& v : nW) v = std::max(0.0, -v);
  return RadialQuadrature::rule(nr, nw, nW);
}

double wigner_minimum(const WignerGrid& grid) {
  if (grid.values.empty()) throw DomainError("wigner_minimum: empty grid");
  return *std::min_element(grid.values.begin(), grid.values.end());
}

}  // namespace eoslab
