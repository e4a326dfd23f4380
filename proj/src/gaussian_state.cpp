#include "resbound/gaussian_state.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace resbound {

namespace {

using cd = std::complex<double>;
using Eigen::Matrix4cd;
using Eigen::Vector4cd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int index(Mode mode) { return static_cast<int>(mode); }

// Applies A -> M A to both moments and restores exact Hermiticity.
GaussianState transform(const GaussianState& in, const Matrix4cd& m) {
  GaussianState out;
  out.d = m * in.d;
  Matrix4cd s = m * in.sigma * m.adjoint();
  out.sigma = 0.5 * (s + s.adjoint());
  check_invariants(out);
  return out;
}

void check_phase(double value, const char* name) {
  if (!(value >= 0.0 && value < kTwoPi)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 2pi), got " +
                                std::to_string(value));
  }
}

}  // namespace

double wrap_phase(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double ProbeSpec::seeded_photons() const {
  const double ch = std::cosh(s);
  const double sh = std::sinh(s);
  return alpha_mag * alpha_mag * ch * ch + beta_mag * beta_mag * sh * sh -
         alpha_mag * beta_mag * std::cos(theta - chi - xi) * std::sinh(2.0 * s);
}

cd ProbeSpec::alpha() const { return std::polar(alpha_mag, chi); }
cd ProbeSpec::beta() const { return std::polar(beta_mag, xi); }

void ProbeSpec::validate() const {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("ProbeSpec.s must be finite and >= 0");
  }
  if (!(alpha_mag >= 0.0) || !(beta_mag >= 0.0)) {
    throw std::invalid_argument("ProbeSpec seed magnitudes must be >= 0");
  }
  check_phase(theta, "ProbeSpec.theta");
  check_phase(chi, "ProbeSpec.chi");
  check_phase(xi, "ProbeSpec.xi");
  // Rounding can leave a perfectly cancelled seed at -1e-16 or so.
  const double scale = (alpha_mag + beta_mag) * (alpha_mag + beta_mag) * std::cosh(2.0 * s);
  if (seeded_photons() < -1e-12 * scale) {
    throw std::invalid_argument("ProbeSpec seeds give a negative probe photon number");
  }
}

ProbeSpec ProbeSpec::bright(double s, double n0, double theta) {
  ProbeSpec spec;
  spec.s = s;
  spec.theta = wrap_phase(theta);
  spec.alpha_mag = std::sqrt(n0) / std::cosh(s);
  return spec;
}

void check_invariants(const GaussianState& state) {
  const Matrix4cd& sigma = state.sigma;
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::logic_error("covariance matrix is not Hermitian");
  }
  for (int i = 0; i < 4; ++i) {
    if (std::abs(sigma(i, i).imag()) > 1e-12 * scale) {
      throw std::logic_error("covariance diagonal is not real");
    }
    if (sigma(i, i).real() < 1.0 - 1e-12) {
      throw std::logic_error("covariance diagonal below the vacuum floor");
    }
  }
  const Vector4cd& d = state.d;
  const double dscale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if (std::abs(d[2] - std::conj(d[0])) > 1e-12 * dscale ||
      std::abs(d[3] - std::conj(d[1])) > 1e-12 * dscale) {
    throw std::logic_error("displacement vector lost its conjugate structure");
  }
}

GaussianState vacuum_state() { return GaussianState{}; }

GaussianState displace(GaussianState state, Mode mode, cd amplitude) {
  const int i = index(mode);
  state.d[i] += amplitude;
  state.d[i + 2] += std::conj(amplitude);
  check_invariants(state);
  return state;
}

GaussianState two_mode_squeeze(GaussianState state, double s, double theta) {
  if (!(s >= 0.0)) throw std::invalid_argument("squeezing parameter must be >= 0");
  const double c = std::cosh(s);
  const cd k = -std::polar(std::sinh(s), theta);
  // a_p -> c a_p - e^{i theta} sinh(s) a_r^dag, a_r -> c a_r - e^{i theta} sinh(s) a_p^dag
  Matrix4cd m = Matrix4cd::Zero();
  m(0, 0) = c;
  m(0, 3) = k;
  m(1, 1) = c;
  m(1, 2) = k;
  m(2, 2) = c;
  m(2, 1) = std::conj(k);
  m(3, 3) = c;
  m(3, 0) = std::conj(k);
  return transform(state, m);
}

GaussianState pure_loss(GaussianState state, Mode mode, double transmission) {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw std::domain_error("loss transmission must lie in [0, 1], got " +
                            std::to_string(transmission));
  }
  const int i = index(mode);
  const double t = std::sqrt(transmission);
  Matrix4cd m = Matrix4cd::Identity();
  m(i, i) = t;
  m(i + 2, i + 2) = t;
  GaussianState out;
  out.d = m * state.d;
  Matrix4cd s = m * state.sigma * m.adjoint();
  // The vacuum ancilla contributes (1 - T) to the mode's own variances.
  s(i, i) += 1.0 - transmission;
  s(i + 2, i + 2) += 1.0 - transmission;
  out.sigma = 0.5 * (s + s.adjoint());
  check_invariants(out);
  return out;
}

GaussianState phase_rotate(GaussianState state, Mode mode, double phi) {
  const int i = index(mode);
  const cd u = std::polar(1.0, phi);
  Matrix4cd m = Matrix4cd::Identity();
  m(i, i) = u;
  m(i + 2, i + 2) = std::conj(u);
  return transform(state, m);
}

double mean_photons(const GaussianState& state, Mode mode) {
  const int i = index(mode);
  return 0.5 * (state.sigma(i, i).real() - 1.0) + std::norm(state.d[i]);
}

GaussianState build_lossy_btmss(const ProbeSpec& spec, const LossBudget& losses,
                                double sensor_T, double sensor_phi) {
  spec.validate();
  losses.validate();
  if (!(sensor_T >= 0.0 && sensor_T <= 1.0)) {
    throw std::domain_error("sensor transmission must lie in [0, 1]");
  }
  GaussianState st = vacuum_state();
  st = displace(st, Mode::probe, spec.alpha());
  st = displace(st, Mode::reference, spec.beta());
  st = two_mode_squeeze(st, spec.s, spec.theta);
  st = pure_loss(st, Mode::probe, losses.eta_p1);
  st = pure_loss(st, Mode::probe, sensor_T);
  st = phase_rotate(st, Mode::probe, sensor_phi);
  st = pure_loss(st, Mode::probe, losses.eta_p2);
  st = pure_loss(st, Mode::reference, losses.eta_r);
  return st;
}

namespace {

// Second-order accurate derivative of d with respect to sensor_T; one-sided
// stencils at the edges of [0, 1] where the central stencil leaves the domain.
Vector4cd transmission_derivative(const ProbeSpec& spec, const LossBudget& losses,
                                  double T, double phi) {
  const double h = kTransmissionStep;
  auto d_at = [&](double t) { return build_lossy_btmss(spec, losses, t, phi).d; };
  // Divide by the spacing actually realized in floating point.
  if (T - h >= 0.0 && T + h <= 1.0) {
    const double lo = T - h, hi = T + h;
    return (d_at(hi) - d_at(lo)) / (hi - lo);
  }
  if (T + h > 1.0) {
    const double m1 = T - h, m2 = T - 2.0 * h;
    return (3.0 * d_at(T) - 4.0 * d_at(m1) + d_at(m2)) / (T - m2);
  }
  const double p1 = T + h, p2 = T + 2.0 * h;
  return (-3.0 * d_at(T) + 4.0 * d_at(p1) - d_at(p2)) / (p2 - T);
}

}  // namespace

double qcrb_bright(const ProbeSpec& spec, const LossBudget& losses, double sensor_T,
                   double sensor_phi, Estimand parameter) {
  const GaussianState st = build_lossy_btmss(spec, losses, sensor_T, sensor_phi);

  Vector4cd ddot = Vector4cd::Zero();
  if (parameter == Estimand::phase) {
    // Only the probe is rotated: d_p ~ e^{i phi}, its conjugate ~ e^{-i phi}.
    ddot[0] = cd(0.0, 1.0) * st.d[0];
    ddot[2] = cd(0.0, -1.0) * st.d[2];
  } else {
    if (sensor_T <= 0.0) {
      throw std::domain_error(
          "bright-limit transmission bound is undefined at sensor_T = 0; use the closed form");
    }
    ddot = transmission_derivative(spec, losses, sensor_T, sensor_phi);
  }
  if (ddot.squaredNorm() == 0.0) return std::numeric_limits<double>::infinity();

  Eigen::JacobiSVD<Matrix4cd> svd(st.sigma);
  const auto& sv = svd.singularValues();
  if (!(sv[3] > 0.0) || sv[0] / sv[3] > kMaxCovarianceCondition) {
    throw std::runtime_error("covariance matrix is numerically singular");
  }
  const Vector4cd x = st.sigma.partialPivLu().solve(ddot);
  const double information = 2.0 * ddot.dot(x).real();
  return 1.0 / information;
}

}  // namespace resbound
