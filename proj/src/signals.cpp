#include "eoslab/signals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "eoslab/errors.hpp"
#include "eoslab/numerics.hpp"

namespace eoslab {

namespace {

std::string format_number(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

}  // namespace

MomentSequence::MomentSequence(std::vector<double> moments, std::string descriptor)
    : moments_(std::move(moments)), descriptor_(std::move(descriptor)) {
  if (moments_.empty()) throw DomainError("MomentSequence: empty");
  for (double m : moments_) {
    if (!std::isfinite(m)) throw DomainError("MomentSequence: non-finite moment");
  }
  if (std::abs(moments_[0] - 1.0) > 1e-12) throw DomainError("MomentSequence: m_0 must be 1");
  if (moments_.size() > 2 && moments_[2] < 0.0) throw DomainError("MomentSequence: m_2 < 0");
  if (moments_.size() > 4 && moments_[4] < moments_[2] * moments_[2] * (1.0 - 1e-12)) {
    throw DomainError("MomentSequence: m_4 < m_2^2 is not a valid state");
  }
}

MomentSequence MomentSequence::rescaled(double lambda) const {
  std::vector<double> out(moments_.size());
  double power = 1.0;
  for (std::size_t k = 0; k < moments_.size(); ++k) {
    out[k] = moments_[k] * power;
    power *= lambda;
  }
  return MomentSequence(std::move(out), descriptor_ + "*" + format_number(lambda));
}

MomentSequence MomentSequence::truncated(int K) const {
  if (K > max_order()) throw DomainError("MomentSequence: requested order exceeds available moments");
  return MomentSequence(std::vector<double>(moments_.begin(), moments_.begin() + K + 1), descriptor_);
}

MomentSequence vacuum_moments(double g, int K) {
  if (!(g >= 0.0)) throw DomainError("vacuum_moments: coupling must be >= 0");
  if (K < 0) throw DomainError("vacuum_moments: negative order");
  std::vector<double> m(static_cast<std::size_t>(K) + 1, 0.0);
  m[0] = 1.0;
  // m_{2j} = (2j-1)!! g^{2j}
  for (int k = 2; k <= K; k += 2) m[k] = m[k - 2] * (k - 1) * g * g;
  return MomentSequence(std::move(m), "vacuum(g=" + format_number(g) + ")");
}

double cat_quadrature_density(double alpha_cat, double x) {
  const double x0 = 2.0 * alpha_cat;
  const double overlap = std::exp(-0.5 * x0 * x0);
  auto gauss = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi); };
  return (gauss(x - x0) + gauss(x + x0) + 2.0 * overlap * gauss(x)) / (2.0 + 2.0 * overlap);
}

MomentSequence cat_moments(double alpha_cat, double g, int K) {
  if (!(alpha_cat > 0.0)) throw DomainError("cat_moments: amplitude must be > 0");
  if (!(g >= 0.0)) throw DomainError("cat_moments: coupling must be >= 0");
  if (K < 0) throw DomainError("cat_moments: negative order");
  const double reach = 2.0 * alpha_cat + 10.0;
  // Even density: integrate over [0, reach] and double; odd moments vanish.
  auto moment = [&](int k) {
    return 2.0 * numerics::integrate(
                     [&](double x) { return std::pow(x, k) * cat_quadrature_density(alpha_cat, x); },
                     0.0, reach, 1e-10);
  };
  const double norm = moment(0);
  std::vector<double> m(static_cast<std::size_t>(K) + 1, 0.0);
  m[0] = 1.0;
  double power = g * g;
  for (int k = 2; k <= K; k += 2) {
    m[k] = moment(k) / norm * power;
    power *= g * g;
  }
  return MomentSequence(std::move(m),
                        "cat(alpha=" + format_number(alpha_cat) + ",g=" + format_number(g) + ")");
}

MomentSequence classical_field_moments(double eps, int K) {
  if (!(std::abs(eps) <= 1.0)) throw DomainError("classical_field_moments: |eps| must be <= 1");
  std::vector<double> m(static_cast<std::size_t>(K) + 1, 1.0);
  for (int k = 1; k <= K; ++k) m[k] = m[k - 1] * eps;
  return MomentSequence(std::move(m), "field(eps=" + format_number(eps) + ")");
}

MomentSequence custom_moments(std::vector<double> moments) {
  return MomentSequence(std::move(moments), "custom");
}

double calibrate_coupling(const SignalFactory& factory, double target_m2) {
  if (!(target_m2 > 0.0)) throw DomainError("calibrate_coupling: target m_2 must be > 0");
  constexpr double g0 = 1.0;
  const MomentSequence probe = factory(g0);
  if (probe.max_order() < 2 || !(probe[2] > 0.0)) {
    throw DomainError("calibrate_coupling: signal has no second moment to calibrate");
  }
  // m_2 scales as g^2.
  return g0 * std::sqrt(target_m2 / probe[2]);
}

}  // namespace eoslab
