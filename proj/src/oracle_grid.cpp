#include "resbound/oracle_grid.hpp"

#include <cmath>

#include "resbound/bounds.hpp"
#include "resbound/gaussian_state.hpp"
#include "resbound/numerics.hpp"

namespace resbound {

namespace {

double max_of(const std::vector<OraclePoint>& pts, Estimand e, double OraclePoint::*field) {
  double m = 0.0;
  for (const OraclePoint& p : pts) {
    if (p.estimand == e && !(p.*field <= m)) m = p.*field;
  }
  return m;
}

}  // namespace

double OracleReport::max_residual_seeded(Estimand e) const {
  return max_of(points, e, &OraclePoint::residual_seeded);
}

double OracleReport::max_residual_total(Estimand e) const {
  return max_of(points, e, &OraclePoint::residual_total);
}

OracleReport run_oracle_grid(const OracleGrid& grid) {
  OracleReport report;
  for (Estimand est : {Estimand::phase, Estimand::transmission}) {
    for (double s : grid.s) {
      for (double T : grid.T) {
        for (double e1 : grid.eta) {
          for (double e2 : grid.eta) {
            for (double er : grid.eta) {
              OraclePoint pt;
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
    OraclePoint& pt = report.points[k];
    const ProbeSpec spec = ProbeSpec::bright(pt.s, grid.seeded_photons);
    pt.engine = qcrb_bright(spec, pt.losses, pt.T, grid.phi, pt.estimand);

    GaussianState source = displace(vacuum_state(), Mode::probe, spec.alpha());
    source = displace(source, Mode::reference, spec.beta());
    source = two_mode_squeeze(source, spec.s, spec.theta);

    BoundQuery b;
    b.estimand = pt.estimand;
    b.probe = Probe::btmss(pt.s);
    b.T = pt.T;
    b.losses = pt.losses;
    b.N = pt.losses.eta_p1 * spec.seeded_photons();
    pt.closed_seeded = qcrb(b);
    b.N = pt.losses.eta_p1 * mean_photons(source, Mode::probe);
    pt.closed_total = qcrb(b);
    pt.residual_seeded = std::abs(pt.engine - pt.closed_seeded) / pt.closed_seeded;
    pt.residual_total = std::abs(pt.engine - pt.closed_total) / pt.closed_total;
  });
  return report;
}

}  // namespace resbound
