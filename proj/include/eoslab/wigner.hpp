#pragma once

#include <string>
#include <vector>

#include "eoslab/probes.hpp"

namespace eoslab {

/// Radial cut of a phase-symmetric Wigner function.
struct WignerGrid {
  std::vector<double> radial_points;  // |beta|
  std::vector<double> values;         // W(|beta|)
  std::string source;
};

/// W(|beta|) = (2/pi) e^{-2|beta|^2} sum_m (-1)^m L_m(4|beta|^2) P(m).
double wigner_eval(const PhotonDistribution& dist, double beta_abs);

/// Radius beyond which the Wigner function of the support is negligible.
double wigner_radial_extent(const PhotonDistribution& dist);

/// Geometric radial grid from r_min to the radial extent, with r = 0 prepended.
WignerGrid wigner_grid(const PhotonDistribution& dist, int points = 400, double r_min = 1e-3);

/// 2 pi int_0^R W(r) r dr over the radial extent R.
double wigner_normalization(const PhotonDistribution& dist);

/// 2 pi int max(0, -W(r)) r dr.
double negativity_volume(const PhotonDistribution& dist);

/// Smallest W on the grid.
double wigner_minimum(const WignerGrid& grid);

}  // namespace eoslab
