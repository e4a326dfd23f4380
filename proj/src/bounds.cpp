#include "resbound/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace resbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sech(2s), well defined for any s >= 0 (cosh overflow gives exactly 0).
double sech2(double s) { return 1.0 / std::cosh(2.0 * s); }

void require_btmss(const BoundQuery& q) {
  if (q.probe.kind != ProbeKind::btmss) {
    throw std::invalid_argument("bTMSS bound requested for a coherent probe");
  }
}

// 1/eta_p2 - T eta_p1 D_r (1 - sech 2s), regrouped so the lossless, strongly
// squeezed case reduces to (1 - T) + T sech 2s without cancellation.
double bracket(const BoundQuery& q) {
  const LossBudget& l = q.losses;
  const double s = q.probe.s;
  const double g = l.eta_p1 * d_r(l.eta_r, s);
  const double c = q.T_complement ? *q.T_complement : 1.0 - q.T;
  return (1.0 / l.eta_p2 - g) + g * c + q.T * g * sech2(s);
}

}  // namespace

void BoundQuery::validate() const {
  if (!(T >= 0.0 && T <= 1.0)) {
    throw std::invalid_argument("T must lie in [0, 1], got " + std::to_string(T));
  }
  if (!(N > 0.0) || !std::isfinite(N)) {
    throw std::invalid_argument("N must be finite and > 0, got " + std::to_string(N));
  }
  if (T_complement && !(*T_complement >= 0.0 && *T_complement <= 1.0)) {
    throw std::invalid_argument("T_complement must lie in [0, 1]");
  }
  probe.validate();
  losses.validate();
}

double d_r(double eta_r, double s) {
  // Same as (2 eta_r - 1)(1 + 2 sinh^2 s)/(1 + 2 eta_r sinh^2 s) after dividing
  // through by cosh 2s = 1 + 2 sinh^2 s; finite for large s and exactly 1 at eta_r = 1.
  const double u = sech2(s);
  return (2.0 * eta_r - 1.0) / (eta_r + u * (1.0 - eta_r));
}

double correlation_weight(double s) { return 1.0 - sech2(s); }

double qcrb_transmission_btmss(const BoundQuery& q) {
  q.validate();
  require_btmss(q);
  return q.T * bracket(q) / q.N;
}

double qcrb_phase_btmss(const BoundQuery& q) {
  q.validate();
  require_btmss(q);
  if (q.T == 0.0) return kInf;
  return bracket(q) / (4.0 * q.T * q.N);
}

double qcrb_transmission_coherent(const BoundQuery& q) {
  q.validate();
  return q.T / (q.losses.eta_p2 * q.N);
}

double qcrb_phase_coherent(const BoundQuery& q) {
  q.validate();
  if (q.T == 0.0) return kInf;
  return 1.0 / (4.0 * q.T * q.losses.eta_p2 * q.N);
}

double qcrb(const BoundQuery& q) {
  const bool coherent = q.probe.kind == ProbeKind::coherent;
  if (q.estimand == Estimand::transmission) {
    return coherent ? qcrb_transmission_coherent(q) : qcrb_transmission_btmss(q);
  }
  return coherent ? qcrb_phase_coherent(q) : qcrb_phase_btmss(q);
}

double qef(double T, double s, const LossBudget& losses) {
  if (!(T >= 0.0 && T <= 1.0)) throw std::invalid_argument("T must lie in [0, 1]");
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  losses.validate();
  return 1.0 / (1.0 - T * losses.eta_p1 * losses.eta_p2 * d_r(losses.eta_r, s) *
                          correlation_weight(s));
}

double squeezing_db(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  return 10.0 * std::log10(sech2(s));
}

}  // namespace resbound
