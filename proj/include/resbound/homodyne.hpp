#pragma once

// Optimized dual homodyne detection Q_p(gamma_p) - g Q_r(gamma_r) of a lossy
// bright two-mode squeezed probe, and the error-propagation variance of the
// resulting transmission and phase estimators.

#include <vector>

#include "resbound/gaussian_state.hpp"
#include "resbound/types.hpp"

namespace resbound {

/// Even n selects the amplitude quadrature, odd n the phase quadrature.
enum class Parity { even, odd };

struct QuadratureSetting {
  double gamma_p = 0.0;
  double gamma_r = 0.0;
  Parity parity = Parity::even;

  /// gamma_p = gamma_r = (n pi + phi + theta)/2 with n = 0 (even) or 1 (odd),
  /// the angles at which gamma_p + gamma_r - phi - theta = n pi.
  static QuadratureSetting optimal(Parity parity, double phi, double theta);

  /// True when gamma_p + gamma_r - phi - theta equals n pi (mod 2 pi) for the
  /// stored parity, within 1e-12.
  bool consistent(double phi, double theta) const;
};

/// Transmission is read from the amplitude quadrature, phase from the phase quadrature.
Parity parity_for(Estimand estimand);

struct HdScenario {
  ProbeSpec probe;
  LossBudget losses;
  double sensor_T = 1.0;
  double sensor_phi = 0.0;
  Estimand estimand = Estimand::transmission;

  /// Probe seeded with the given magnitudes at phase chi, with xi = chi + phi
  /// and theta = chi + xi so that the variance minimum and mean maximum align.
  static HdScenario phase_matched(double s, double alpha_mag, double beta_mag, double chi,
                                  double sensor_T, double sensor_phi, const LossBudget& losses,
                                  Estimand estimand);

  /// Throws std::invalid_argument for invalid components or when xi != chi + phi
  /// (mod 2 pi) beyond 1e-12.
  void validate() const;

  double T_p() const { return losses.eta_p1 * sensor_T * losses.eta_p2; }
  double T_r() const { return losses.eta_r; }
  /// Photons reaching the sensor, eta_p1 * seeded_photons().
  double photons_at_sensor() const { return losses.eta_p1 * probe.seeded_photons(); }
};

/// -sqrt(T_p T_r) sinh 2s cos(angle_sum) / (T_r cosh 2s + 1 - T_r).
double optimal_gain(double T_p, double T_r, double s, double angle_sum);

/// gamma_p + gamma_r - phi - theta.
double angle_sum(const HdScenario& scn, const QuadratureSetting& q);

/// Var[Q_p - g Q_r] for an arbitrary electronic gain g.
double difference_variance(const HdScenario& scn, const QuadratureSetting& q, double gain);

/// Var[Q_p - g_opt Q_r].
double optimized_difference_variance(const HdScenario& scn, const QuadratureSetting& q);

/// 2 sqrt(T_p) [|alpha| cosh s cos(chi - gamma + phi) - |beta| sinh s cos(xi + gamma - theta - phi)].
double quadrature_mean_probe(const HdScenario& scn, double gamma);
/// d<Q_p(gamma)>/d phi at fixed seed phases.
double quadrature_mean_dphi(const HdScenario& scn, double gamma);
/// d<Q_p(gamma)>/d T; +/-inf at T = 0 unless the mean vanishes identically.
double quadrature_mean_dT(const HdScenario& scn, double gamma);

/// Var[Q_p - g_opt Q_r] / |d<Q_p>/dX|^2 at the given setting; +inf when the
/// derivative vanishes.
double hd_estimator_variance(const HdScenario& scn, const QuadratureSetting& q);
/// As above at QuadratureSetting::optimal for the scenario's estimand.
double hd_estimator_variance(const HdScenario& scn);

struct SaturationGrid {
  std::vector<double> s = {0.0, 0.5, 1.0, 2.0};
  std::vector<double> T = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> eta = {0.6, 0.8, 1.0};  ///< applied to eta_p1, eta_p2, eta_r independently
  double alpha_mag = 30.0;
  double beta_mag = 5.0;
  double chi = 0.3;
  double phi = 0.7;
};

struct SaturationPoint {
  Estimand estimand = Estimand::transmission;
  double s = 0.0;
  double T = 0.0;
  LossBudget losses;
  double hd_variance = 0.0;
  double qcrb = 0.0;
  double residual = 0.0;  ///< |hd_variance - qcrb| / qcrb
};

struct SaturationReport {
  std::vector<SaturationPoint> points;
  double max_residual = 0.0;
};

/// Evaluates both estimands at every grid point against the closed-form bounds
/// at N = photons_at_sensor().
SaturationReport verify_saturation(const SaturationGrid& grid = {});

}  // namespace resbound
