#pragma once

#include <functional>
#include <string>
#include <vector>

namespace eoslab {

/// Dimensionless field moments m_k = gamma^k <psi|E^k|psi>, k = 0..K, with the
/// nonlinear coupling folded in.
class MomentSequence {
 public:
  /// Validates m_0 = 1, m_2 >= 0 and m_4 >= m_2^2 (when present).
  MomentSequence(std::vector<double> moments, std::string descriptor);

  int max_order() const { return static_cast<int>(moments_.size()) - 1; }
  double operator[](int k) const { return moments_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& moments() const { return moments_; }
  const std::string& descriptor() const { return descriptor_; }

  /// Same signal observed with coupling scaled by lambda (m_k -> lambda^k m_k).
  MomentSequence rescaled(double lambda) const;
  MomentSequence truncated(int K) const;

 private:
  std::vector<double> moments_;
  std::string descriptor_;
};

/// Default cat amplitude (a few photons).
inline constexpr double kDefaultCatAlpha = 1.4142135623730951;

/// Vacuum field: Gaussian moments with m_2 = g^2.
MomentSequence vacuum_moments(double g, int K);

/// Even cat |a> + |-a>, quadrature measured along the displacement axis, in
/// units where the vacuum quadrature variance is one; moments scaled by g^k.
MomentSequence cat_moments(double alpha_cat, double g, int K);

/// Quadrature density of the even cat in standardized units.
double cat_quadrature_density(double alpha_cat, double x);

/// Deterministic field value: m_k = eps^k.
MomentSequence classical_field_moments(double eps, int K);

/// Custom sequence (validated).
MomentSequence custom_moments(std::vector<double> moments);

/// Signal family parameterized by its coupling g.
using SignalFactory = std::function<MomentSequence(double g)>;

/// Coupling g for which the factory's m_2 equals target_m2.
double calibrate_coupling(const SignalFactory& factory, double target_m2);

}  // namespace eoslab
