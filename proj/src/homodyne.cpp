#include "resbound/homodyne.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "resbound/bounds.hpp"
#include "resbound/numerics.hpp"

namespace resbound {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleTol = 1e-12;

// Signed distance a - b reduced to [-pi, pi].
double angle_gap(double a, double b) { return std::remainder(a - b, 2.0 * kPi); }

}  // namespace

QuadratureSetting QuadratureSetting::optimal(Parity parity, double phi, double theta) {
  const double n = parity == Parity::even ? 0.0 : 1.0;
  const double gamma = wrap_phase(0.5 * (n * kPi + phi + theta));
  return {gamma, gamma, parity};
}

bool QuadratureSetting::consistent(double phi, double theta) const {
  const double n = parity == Parity::even ? 0.0 : 1.0;
  // n pi is only defined mod 2 pi through the parity of n.
  return std::abs(angle_gap(gamma_p + gamma_r - phi - theta, n * kPi)) <= kAngleTol;
}

Parity parity_for(Estimand estimand) {
  return estimand == Estimand::transmission ? Parity::even : Parity::odd;
}

HdScenario HdScenario::phase_matched(double s, double alpha_mag, double beta_mag, double chi,
                                     double sensor_T, double sensor_phi,
                                     const LossBudget& losses, Estimand estimand) {
  HdScenario scn;
  scn.probe.s = s;
  scn.probe.alpha_mag = alpha_mag;
  scn.probe.beta_mag = beta_mag;
  scn.probe.chi = wrap_phase(chi);
  scn.probe.xi = wrap_phase(chi + sensor_phi);
  scn.probe.theta = wrap_phase(scn.probe.chi + scn.probe.xi);
  scn.losses = losses;
  scn.sensor_T = sensor_T;
  scn.sensor_phi = sensor_phi;
  scn.estimand = estimand;
  scn.validate();
  return scn;
}

void HdScenario::validate() const {
  probe.validate();
  losses.validate();
  if (!(sensor_T >= 0.0 && sensor_T <= 1.0)) {
    throw std::invalid_argument("HdScenario.sensor_T must lie in [0, 1]");
  }
  if (!std::isfinite(sensor_phi)) throw std::invalid_argument("HdScenario.sensor_phi must be finite");
  if (std::abs(angle_gap(probe.xi, probe.chi + sensor_phi)) > kAngleTol) {
    throw std::invalid_argument("HdScenario requires xi = chi + phi");
  }
}

double optimal_gain(double T_p, double T_r, double s, double angle_sum) {
  if (!(T_p >= 0.0 && T_p <= 1.0) || !(T_r >= 0.0 && T_r <= 1.0)) {
    throw std::invalid_argument("T_p and T_r must lie in [0, 1]");
  }
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  const double c2 = std::cosh(2.0 * s);
  return -std::sqrt(T_p * T_r) * std::sinh(2.0 * s) * std::cos(angle_sum) /
         (T_r * c2 + 1.0 - T_r);
}

double angle_sum(const HdScenario& scn, const QuadratureSetting& q) {
  return q.gamma_p + q.gamma_r - scn.sensor_phi - scn.probe.theta;
}

double difference_variance(const HdScenario& scn, const QuadratureSetting& q, double gain) {
  const double s = scn.probe.s;
  const double c2 = std::cosh(2.0 * s);
  const double tp = scn.T_p();
  const double tr = scn.T_r();
  const double var_p = tp * c2 + 1.0 - tp;
  const double var_r = tr * c2 + 1.0 - tr;
  const double cov = -std::sqrt(tp * tr) * std::sinh(2.0 * s) * std::cos(angle_sum(scn, q));
  return var_p - 2.0 * gain * cov + gain * gain * var_r;
}

double optimized_difference_variance(const HdScenario& scn, const QuadratureSetting& q) {
  const double s = scn.probe.s;
  const double c2 = std::cosh(2.0 * s);
  const double s2 = std::sinh(2.0 * s);
  const double tp = scn.T_p();
  const double tr = scn.T_r();
  const double c = std::cos(angle_sum(scn, q));
  return tp * c2 + 1.0 - tp - tp * tr * s2 * s2 * c * c / (tr * c2 + 1.0 - tr);
}

double quadrature_mean_probe(const HdScenario& scn, double gamma) {
  const ProbeSpec& p = scn.probe;
  const double phi = scn.sensor_phi;
  return 2.0 * std::sqrt(scn.T_p()) *
         (p.alpha_mag * std::cosh(p.s) * std::cos(p.chi - gamma + phi) -
          p.beta_mag * std::sinh(p.s) * std::cos(p.xi + gamma - p.theta - phi));
}

double quadrature_mean_dphi(const HdScenario& scn, double gamma) {
  const ProbeSpec& p = scn.probe;
  const double phi = scn.sensor_phi;
  return 2.0 * std::sqrt(scn.T_p()) *
         (-p.alpha_mag * std::cosh(p.s) * std::sin(p.chi - gamma + phi) -
          p.beta_mag * std::sinh(p.s) * std::sin(p.xi + gamma - p.theta - phi));
}

double quadrature_mean_dT(const HdScenario& scn, double gamma) {
  const ProbeSpec& p = scn.probe;
  const double phi = scn.sensor_phi;
  const double bracket = p.alpha_mag * std::cosh(p.s) * std::cos(p.chi - gamma + phi) -
                         p.beta_mag * std::sinh(p.s) * std::cos(p.xi + gamma - p.theta - phi);
  // <Q_p> = 2 sqrt(eta_p1 eta_p2 T) * bracket.
  const double eta = scn.losses.eta_p1 * scn.losses.eta_p2;
  if (scn.sensor_T == 0.0) {
    if (bracket == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), bracket);
  }
  return std::sqrt(eta / scn.sensor_T) * bracket;
}

double hd_estimator_variance(const HdScenario& scn, const QuadratureSetting& q) {
  scn.validate();
  const double slope = scn.estimand == Estimand::transmission
                           ? quadrature_mean_dT(scn, q.gamma_p)
                           : quadrature_mean_dphi(scn, q.gamma_p);
  if (slope == 0.0) return std::numeric_limits<double>::infinity();
  return optimized_difference_variance(scn, q) / (slope * slope);
}

double hd_estimator_variance(const HdScenario& scn) {
  return hd_estimator_variance(
      scn, QuadratureSetting::optimal(parity_for(scn.estimand), scn.sensor_phi, scn.probe.theta));
}

SaturationReport verify_saturation(const SaturationGrid& grid) {
  SaturationReport report;
  for (double s : grid.s) {
    for (double T : grid.T) {
      for (double e1 : grid.eta) {
        for (double e2 : grid.eta) {
          for (double er : grid.eta) {
            for (Estimand est : {Estimand::transmission, Estimand::phase}) {
              SaturationPoint pt;
              pt.estimand = est;
              pt.s = s;
              pt.T = T;
              pt.losses = {e1, e2, er};
              report.points.push_back(pt);
            }
          }
        }
      }
    }
  }
  numerics::parallel_for(report.points.size(), [&](std::size_t k) {
    SaturationPoint& pt = report.points[k];
    const HdScenario scn = HdScenario::phase_matched(pt.s, grid.alpha_mag, grid.beta_mag,
                                                     grid.chi, pt.T, grid.phi, pt.losses,
                                                     pt.estimand);
    pt.hd_variance = hd_estimator_variance(scn);
    BoundQuery b;
    b.estimand = pt.estimand;
    b.probe = Probe::btmss(pt.s);
    b.T = pt.T;
    b.N = scn.photons_at_sensor();
    b.losses = pt.losses;
    pt.qcrb = qcrb(b);
    pt.residual = std::abs(pt.hd_variance - pt.qcrb) / pt.qcrb;
  });
  for (const SaturationPoint& pt : report.points) {
    if (!(pt.residual <= report.max_residual)) report.max_residual = pt.residual;
  }
  return report;
}

}  // namespace resbound
