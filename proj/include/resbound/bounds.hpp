#pragma once

// Closed-form quantum Cramer-Rao bounds for sensor transmission and phase with
// coherent and bright two-mode squeezed probes, in the bright limit.

#include <optional>

#include "resbound/types.hpp"

namespace resbound {

struct BoundQuery {
  Estimand estimand = Estimand::transmission;
  Probe probe = Probe::btmss(0.0);
  double T = 1.0;  ///< sensor intensity transmission
  double N = 1.0;  ///< mean photons incident on the sensor
  LossBudget losses;
  /// 1 - T when it is known to better relative accuracy than T itself (T near 1).
  std::optional<double> T_complement;

  /// Throws std::invalid_argument if T is outside [0, 1], N <= 0, s < 0 or a
  /// loss transmission is outside (0, 1].
  void validate() const;
};

/// Reference-arm loss factor (2 eta_r - 1)(1 + 2 sinh^2 s) / (1 + 2 eta_r sinh^2 s).
/// Negative for eta_r < 1/2.
double d_r(double eta_r, double s);

/// Squeezing-dependent weight 1 - sech(2s) of the correlation term.
double correlation_weight(double s);

double qcrb_transmission_btmss(const BoundQuery& q);
/// Returns +inf at T = 0.
double qcrb_phase_btmss(const BoundQuery& q);
double qcrb_transmission_coherent(const BoundQuery& q);
/// Returns +inf at T = 0.
double qcrb_phase_coherent(const BoundQuery& q);

/// Dispatches on q.estimand and q.probe.kind.
double qcrb(const BoundQuery& q);

/// Ratio of the coherent bound to the bTMSS bound; identical for both estimands.
double qef(double T, double s, const LossBudget& losses);

/// Intensity-difference squeezing 10 log10(sech 2s) in dB.
double squeezing_db(double s);

/// Squeezing used to stand in for s -> infinity.
inline constexpr double kInfiniteSqueezing = 20.0;

}  // namespace resbound
