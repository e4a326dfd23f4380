#pragma once

// Cross-check of the Gaussian-state engine against the closed-form bounds over
// a grid of squeezing, sensor transmission and external losses.

#include <vector>

#include "resbound/types.hpp"

namespace resbound {

struct OracleGrid {
  std::vector<double> s = {0.0, 0.5, 1.0, 2.0};
  std::vector<double> T = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> eta = {0.7, 1.0};  ///< applied to eta_p1, eta_p2, eta_r independently
  double seeded_photons = 1e6;           ///< probe-seeded photon number of the source
  double phi = 0.4;                      ///< sensor phase, radians
};

struct OraclePoint {
  Estimand estimand = Estimand::transmission;
  double s = 0.0;
  double T = 0.0;
  LossBudget losses;
  double engine = 0.0;  ///< bound from the state's displacement and covariance
  /// Closed form with N = eta_p1 * seeded photons.
  double closed_seeded = 0.0;
  /// Closed form with N = eta_p1 * <a_p^dag a_p> of the source, spontaneous
  /// photons included; differs from closed_seeded by O(sinh^2 s / |alpha|^2).
  double closed_total = 0.0;
  double residual_seeded = 0.0;
  double residual_total = 0.0;
};

struct OracleReport {
  std::vector<OraclePoint> points;
  double max_residual_seeded(Estimand e) const;
  double max_residual_total(Estimand e) const;
};

OracleReport run_oracle_grid(const OracleGrid& grid = {});

}  // namespace resbound
