#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "resbound/bounds.hpp"
#include "resbound/homodyne.hpp"

using namespace resbound;

namespace {

double closed_bound(const HdScenario& scn) {
  BoundQuery b;
  b.estimand = scn.estimand;
  b.probe = Probe::btmss(scn.probe.s);
  b.T = scn.sensor_T;
  b.N = scn.photons_at_sensor();
  b.losses = scn.losses;
  return qcrb(b);
}

HdScenario scenario(double s, double T, LossBudget l, Estimand e, double chi = 0.3, double phi = 0.7) {
  return HdScenario::phase_matched(s, 30.0, 5.0, chi, T, phi, l, e);
}

}  // namespace

TEST_SUITE("homodyne") {

TEST_CASE("optimal gain") {
  CHECK(optimal_gain(0.5, 0.7, 0.0, 0.2) == 0.0);
  CHECK(std::abs(optimal_gain(0.5, 0.7, 1.0, M_PI / 2)) < 1e-16);
  const double g = optimal_gain(0.5, 0.7, 1.0, 0.4);
  CHECK(optimal_gain(0.5, 0.7, 1.0, 0.4 + M_PI) == doctest::Approx(-g).epsilon(1e-14));
  const double expected = -std::sqrt(0.35) * std::sinh(2.0) * std::cos(0.4) / (0.7 * std::cosh(2.0) + 0.3);
  CHECK(g == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(optimal_gain(1.5, 0.7, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("difference variance") {
  for (double s : {0.5, 1.0, 2.0}) {
    const HdScenario scn = scenario(s, 1.0, {}, Estimand::phase, 0.0, 0.0);
    QuadratureSetting q = QuadratureSetting::optimal(Parity::even, 0.0, scn.probe.theta);
    CHECK(angle_sum(scn, q) == doctest::Approx(0.0).scale(1.0));
    CHECK(optimized_difference_variance(scn, q) == doctest::Approx(1 / std::cosh(2 * s)).epsilon(1e-9));
  }
  const HdScenario coh = scenario(0.0, 0.6, {0.9, 0.8, 0.7}, Estimand::transmission);
  CHECK(optimized_difference_variance(coh, QuadratureSetting::optimal(Parity::even, 0.7, coh.probe.theta)) ==
        doctest::Approx(1.0));

  // True minimization over the gain.
  const HdScenario scn = scenario(1.2, 0.6, {0.9, 0.8, 0.7}, Estimand::transmission);
  QuadratureSetting q{0.4, 0.9, Parity::even};
  const double sum = angle_sum(scn, q);
  const double g = optimal_gain(scn.T_p(), scn.T_r(), scn.probe.s, sum);
  const double best = difference_variance(scn, q, g);
  CHECK(best == doctest::Approx(optimized_difference_variance(scn, q)).epsilon(1e-12));
  for (double d : {-0.1, -0.01, 0.01, 0.1}) CHECK(difference_variance(scn, q, g + d) > best);

  // Conjugate quadratures with the gain sign flipped.
  QuadratureSetting c{q.gamma_p + M_PI / 2, q.gamma_r + M_PI / 2, Parity::even};
  const double gc = optimal_gain(scn.T_p(), scn.T_r(), scn.probe.s, angle_sum(scn, c));
  CHECK(gc == doctest::Approx(-g).epsilon(1e-12));
  CHECK(difference_variance(scn, c, gc) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("quadrature means") {
  HdScenario scn = scenario(0.0, 0.5, {0.8, 1, 1}, Estimand::transmission);
  scn.probe.beta_mag = 0.0;
  const double gamma = 0.25;
  CHECK(quadrature_mean_probe(scn, gamma) ==
        doctest::Approx(2 * std::sqrt(scn.T_p()) * 30.0 * std::cos(scn.probe.chi - gamma + scn.sensor_phi)));
  HdScenario dark = scenario(1.0, 0.0, {}, Estimand::phase);
  CHECK(quadrature_mean_probe(dark, 0.3) == 0.0);

  // Analytic derivatives against finite differences of the mean.
  const HdScenario base = scenario(0.8, 0.5, {0.9, 0.8, 0.7}, Estimand::phase);
  const double h = 1e-6;
  HdScenario up = base, down = base;
  // Seeds fixed: only the sensor phase moves.
  up.sensor_phi += h;
  down.sensor_phi -= h;
  const double fd_phi = (quadrature_mean_probe(up, 1.1) - quadrature_mean_probe(down, 1.1)) / (2 * h);
  CHECK(quadrature_mean_dphi(base, 1.1) == doctest::Approx(fd_phi).epsilon(1e-6));
  up = down = base;
  up.sensor_T += h;
  down.sensor_T -= h;
  const double fd_T = (quadrature_mean_probe(up, 1.1) - quadrature_mean_probe(down, 1.1)) / (2 * h);
  CHECK(quadrature_mean_dT(base, 1.1) == doctest::Approx(fd_T).epsilon(1e-6));
  CHECK(std::isinf(quadrature_mean_dT(dark, 0.3)));
}

TEST_CASE("quadrature settings") {
  const QuadratureSetting e = QuadratureSetting::optimal(Parity::even, 0.7, 1.3);
  const QuadratureSetting o = QuadratureSetting::optimal(Parity::odd, 0.7, 1.3);
  CHECK(e.gamma_p == e.gamma_r);
  CHECK(e.consistent(0.7, 1.3));
  CHECK(o.consistent(0.7, 1.3));
  CHECK_FALSE(QuadratureSetting{e.gamma_p, e.gamma_r, Parity::odd}.consistent(0.7, 1.3));
  CHECK(parity_for(Estimand::transmission) == Parity::even);
  CHECK(parity_for(Estimand::phase) == Parity::odd);
}

TEST_CASE("scenario validation") {
  HdScenario scn = scenario(1.0, 0.5, {}, Estimand::phase);
  scn.probe.xi = wrap_phase(scn.probe.xi + 0.1);
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);
  CHECK_THROWS_AS(scenario(1.0, 1.5, {}, Estimand::phase), std::invalid_argument);
}

TEST_CASE("optimized homodyne saturates the bound") {
  for (Estimand e : {Estimand::transmission, Estimand::phase}) {
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
      for (double T : {0.1, 0.45, 1.0}) {
        for (double er : {0.2, 0.6, 1.0}) {
          const HdScenario scn = scenario(s, T, {0.9, 0.8, er}, e);
          CHECK(hd_estimator_variance(scn) == doctest::Approx(closed_bound(scn)).epsilon(1e-10));
        }
      }
    }
  }
  // s = 0 reduces to the coherent bounds.
  const HdScenario coh = scenario(0.0, 0.3, {0.9, 0.8, 0.6}, Estimand::phase);
  BoundQuery b;
  b.estimand = Estimand::phase;
  b.probe = Probe::coherent();
  b.T = 0.3;
  b.N = coh.photons_at_sensor();
  b.losses = coh.losses;
  CHECK(hd_estimator_variance(coh) == doctest::Approx(qcrb(b)).epsilon(1e-12));
}

TEST_CASE("detuned and random settings stay above the bound") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI), u(0.1, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Estimand e = k % 2 ? Estimand::phase : Estimand::transmission;
    const HdScenario scn = scenario(0.2 + 1.8 * u(rng), u(rng), {u(rng), u(rng), u(rng)}, e,
                                    ang(rng), ang(rng));
    const double g = ang(rng);
    const QuadratureSetting q{g, g, parity_for(e)};
    CHECK(hd_estimator_variance(scn, q) >= closed_bound(scn) * (1 - 1e-10));
  }
  const HdScenario scn = scenario(1.0, 0.6, {}, Estimand::phase);
  QuadratureSetting q = QuadratureSetting::optimal(Parity::odd, scn.sensor_phi, scn.probe.theta);
  q.gamma_p += 0.15;
  q.gamma_r += 0.15;
  CHECK(angle_sum(scn, q) == doctest::Approx(M_PI + 0.3));
  CHECK(hd_estimator_variance(scn, q) > closed_bound(scn) * (1 + 1e-6));
}

TEST_CASE("process phase compensation") {
  const HdScenario a = scenario(1.0, 0.4, {0.9, 0.9, 0.8}, Estimand::phase, 0.3, 0.7);
  const HdScenario b = scenario(1.0, 0.4, {0.9, 0.9, 0.8}, Estimand::phase, 1.1, 0.7);
  CHECK(b.probe.theta != doctest::Approx(a.probe.theta));
  CHECK(hd_estimator_variance(a) == doctest::Approx(hd_estimator_variance(b)).epsilon(1e-12));
}

TEST_CASE("saturation grid report") {
  const SaturationReport r = verify_saturation();
  CHECK(r.points.size() == 4 * 10 * 27 * 2);
  CHECK(r.max_residual < 1e-10);
}

}  // TEST_SUITE
