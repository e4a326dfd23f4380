#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "resbound/bounds.hpp"

using namespace resbound;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

double oracle_dr(double er, double s) {
  const double sh2 = std::sinh(s) * std::sinh(s);
  return (2 * er - 1) * (1 + 2 * sh2) / (1 + 2 * er * sh2);
}

double oracle_T(double T, double N, double s, LossBudget l) {
  return T / (l.eta_p2 * N) - T * T / N * l.eta_p1 * oracle_dr(l.eta_r, s) * (1 - sech(2 * s));
}

double oracle_phi(double T, double N, double s, LossBudget l) {
  return 1 / (4 * T * l.eta_p2 * N) - 1 / (4 * N) * l.eta_p1 * oracle_dr(l.eta_r, s) * (1 - sech(2 * s));
}

BoundQuery query(Estimand e, Probe p, double T, double N, LossBudget l = {}) {
  BoundQuery q;
  q.estimand = e;
  q.probe = p;
  q.T = T;
  q.N = N;
  q.losses = l;
  return q;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("reference loss factor") {
  for (double s : {0.0, 0.5, 2.0, 5.0}) {
    CHECK(d_r(1.0, s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d_r(0.5, s) == 0.0);
  }
  const double v = d_r(0.25, 2.0);
  CHECK(v < 0.0);
  CHECK(v == doctest::Approx(oracle_dr(0.25, 2.0)).epsilon(1e-14));
  CHECK(correlation_weight(0.0) == 0.0);
  CHECK(correlation_weight(2.0) == doctest::Approx(1 - sech(4.0)).epsilon(1e-15));
}

TEST_CASE("transmission bound examples") {
  CHECK(qcrb_transmission_btmss(query(Estimand::transmission, Probe::btmss(2), 0.0, 10)) == 0.0);
  const LossBudget l{0.8, 0.7, 0.9};
  CHECK(qcrb_transmission_btmss(query(Estimand::transmission, Probe::btmss(0), 0.4, 50, l)) ==
        doctest::Approx(qcrb_transmission_coherent(query(Estimand::transmission, Probe::coherent(), 0.4, 50, l))));
  CHECK(qcrb_transmission_coherent(query(Estimand::transmission, Probe::coherent(), 0.4, 50, l)) ==
        doctest::Approx(0.4 / (0.7 * 50)));
  // Fock limit T(1 - T)/N.
  CHECK(qcrb_transmission_btmss(query(Estimand::transmission, Probe::btmss(20), 0.3, 100)) ==
        doctest::Approx(2.1e-3).epsilon(1e-12));
  CHECK(qcrb_transmission_coherent(query(Estimand::transmission, Probe::coherent(), 1.0, 100)) ==
        doctest::Approx(0.01));
}

TEST_CASE("phase bound examples") {
  const double sech4 = sech(4.0);
  CHECK(qcrb_phase_btmss(query(Estimand::phase, Probe::btmss(2), 1.0, 1)) ==
        doctest::Approx(sech4 / 4).epsilon(1e-12));
  CHECK(sech4 / 4 == doctest::Approx(9.1545e-3).epsilon(1e-4));
  CHECK(std::isinf(qcrb_phase_btmss(query(Estimand::phase, Probe::btmss(2), 0.0, 1))));
  CHECK(std::isinf(qcrb_phase_coherent(query(Estimand::phase, Probe::coherent(), 0.0, 1))));
  const LossBudget l{1.0, 0.6, 1.0};
  CHECK(qcrb_phase_btmss(query(Estimand::phase, Probe::btmss(0), 0.3, 20, l)) ==
        doctest::Approx(1 / (4 * 0.3 * 0.6 * 20)).epsilon(1e-14));
  CHECK(qcrb_phase_coherent(query(Estimand::phase, Probe::coherent(), 1.0, 100)) ==
        doctest::Approx(2.5e-3));
}

TEST_CASE("bounds match the printed formulas on random draws") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double s = 3 * u(rng);
    const double T = 0.01 + 0.99 * u(rng);
    const double N = 1 + 1e4 * u(rng);
    const LossBudget l{0.05 + 0.95 * u(rng), 0.05 + 0.95 * u(rng), 0.05 + 0.95 * u(rng)};
    CHECK(qcrb(query(Estimand::transmission, Probe::btmss(s), T, N, l)) ==
          doctest::Approx(oracle_T(T, N, s, l)).epsilon(1e-10));
    CHECK(qcrb(query(Estimand::phase, Probe::btmss(s), T, N, l)) ==
          doctest::Approx(oracle_phi(T, N, s, l)).epsilon(1e-10));
    // Cramer-Rao ordering against the coherent probe follows the sign of D_r.
    const double coh = qcrb(query(Estimand::phase, Probe::coherent(), T, N, l));
    const double sq = qcrb(query(Estimand::phase, Probe::btmss(s), T, N, l));
    if (l.eta_r > 0.5) CHECK(sq <= coh * (1 + 1e-12));
    if (l.eta_r < 0.5) CHECK(sq >= coh * (1 - 1e-12));
  }
}

TEST_CASE("quantum enhancement factor") {
  CHECK(qef(0.0, 2.0, {}) == 1.0);
  CHECK(qef(1.0, 2.0, {}) == doctest::Approx(std::cosh(4.0)).epsilon(1e-12));
  CHECK(qef(1.0, 2.0, {}) == doctest::Approx(27.31).epsilon(1e-4));
  for (double T : {0.1, 0.5, 1.0}) {
    CHECK(qef(T, 1.5, {1, 1, 0.3}) < 1.0);
    CHECK(qef(T, 1.5, {1, 1, 0.8}) > 1.0);
    // Identical ratio for both estimands.
    const LossBudget l{0.9, 0.8, 0.7};
    const double rt = qcrb(query(Estimand::transmission, Probe::coherent(), T, 3, l)) /
                      qcrb(query(Estimand::transmission, Probe::btmss(1.5), T, 3, l));
    const double rp = qcrb(query(Estimand::phase, Probe::coherent(), T, 3, l)) /
                      qcrb(query(Estimand::phase, Probe::btmss(1.5), T, 3, l));
    CHECK(qef(T, 1.5, l) == doctest::Approx(rt).epsilon(1e-12));
    CHECK(qef(T, 1.5, l) == doctest::Approx(rp).epsilon(1e-12));
  }
}

TEST_CASE("squeezing in dB") {
  CHECK(squeezing_db(0.0) == 0.0);
  CHECK(squeezing_db(1.0) == doctest::Approx(10 * std::log10(sech(2.0))).epsilon(1e-14));
  CHECK(squeezing_db(2.0) == doctest::Approx(-14.36).epsilon(2e-4));
}

TEST_CASE("infinite squeezing symmetry") {
  for (double T : {0.05, 0.2, 0.37, 0.5}) {
    BoundQuery a = query(Estimand::transmission, Probe::btmss(kInfiniteSqueezing), T, 1);
    BoundQuery b = query(Estimand::transmission, Probe::btmss(kInfiniteSqueezing), 1 - T, 1);
    b.T_complement = T;
    CHECK(qcrb(a) == doctest::Approx(qcrb(b)).epsilon(1e-8));
  }
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(qcrb(query(Estimand::phase, Probe::btmss(1), 1.2, 1)), std::invalid_argument);
  CHECK_THROWS_AS(qcrb(query(Estimand::phase, Probe::btmss(1), 0.5, 0)), std::invalid_argument);
  CHECK_THROWS_AS(qcrb(query(Estimand::phase, Probe::btmss(-1), 0.5, 1)), std::invalid_argument);
  CHECK_THROWS_AS(qcrb(query(Estimand::phase, Probe::btmss(1), 0.5, 1, {0, 1, 1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(qcrb(query(Estimand::phase, Probe::btmss(1), 0.5, 1, {1, 1, 1.1})),
                  std::invalid_argument);
}

}  // TEST_SUITE
