#pragma once

#include <string_view>

namespace resbound {

/// Quantity estimated from the light leaving the sensor.
enum class Estimand { transmission, phase };

std::string_view to_string(Estimand e);

/// Intensity transmissions of the loss channels outside the sensor:
/// probe before the sensor, probe after the sensor, and reference arm.
struct LossBudget {
  double eta_p1 = 1.0;
  double eta_p2 = 1.0;
  double eta_r = 1.0;

  static constexpr LossBudget lossless() { return {}; }

  /// Throws std::invalid_argument unless every transmission is in (0, 1].
  void validate() const;

  /// Combined probe transmission eta_p1 * eta_p2.
  double probe() const { return eta_p1 * eta_p2; }
};

enum class ProbeKind { coherent, btmss };

/// Probe family used by the closed-form bounds. A coherent probe carries no
/// squeezing; s is ignored for it.
struct Probe {
  ProbeKind kind = ProbeKind::btmss;
  double s = 0.0;

  static constexpr Probe coherent() { return {ProbeKind::coherent, 0.0}; }
  static constexpr Probe btmss(double s) { return {ProbeKind::btmss, s}; }

  /// Squeezing actually applied: zero for a coherent probe.
  double squeezing() const { return kind == ProbeKind::btmss ? s : 0.0; }

  void validate() const;
};

}  // namespace resbound
