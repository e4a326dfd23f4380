#pragma once

// Two-mode Gaussian states in the (a_p, a_r, a_p^dagger, a_r^dagger) basis and
// the linear optical channels needed to model a bright two-mode squeezed probe
// passing through a lossy resonance sensor.
//
// Every channel acts on the state through its Heisenberg-picture Bogoliubov
// matrix M (A -> M A + c), so that d' = M d + c and sigma' = M sigma M^dagger
// plus any vacuum contribution from a loss ancilla.

#include <complex>

#include <Eigen/Dense>

#include "resbound/types.hpp"

namespace resbound {

enum class Mode { probe = 0, reference = 1 };

/// Displacement vector and covariance matrix of a two-mode Gaussian state.
///
/// Ordering contract: index 0 = probe, 1 = reference, 2 = probe conjugate,
/// 3 = reference conjugate. sigma_ij = <A_i A_j^dag + A_j^dag A_i> - 2<A_i><A_j^dag>,
/// so the vacuum has sigma = identity.
struct GaussianState {
  Eigen::Vector4cd d = Eigen::Vector4cd::Zero();
  Eigen::Matrix4cd sigma = Eigen::Matrix4cd::Identity();
};

/// Seeds and squeezing of the parametric source. The state is generated as
/// S(s, theta) D_p(alpha) D_r(beta) |0,0>, i.e. squeezing after displacement.
struct ProbeSpec {
  double s = 0.0;
  double theta = 0.0;
  double alpha_mag = 0.0;
  double chi = 0.0;
  double beta_mag = 0.0;
  double xi = 0.0;

  /// Probe-seeded photon number |a|^2 cosh^2 s + |b|^2 sinh^2 s
  /// - |a||b| cos(theta - chi - xi) sinh 2s. Excludes the spontaneous
  /// sinh^2 s term, which is negligible in the bright regime.
  double seeded_photons() const;

  std::complex<double> alpha() const;
  std::complex<double> beta() const;

  /// Throws std::invalid_argument when s or a magnitude is negative, a phase
  /// lies outside [0, 2 pi), or seeded_photons() is negative.
  void validate() const;

  /// Probe-only seeding (beta = 0) tuned so that seeded_photons() == n0.
  static ProbeSpec bright(double s, double n0, double theta = 0.0);
};

/// Wraps an angle into [0, 2 pi).
double wrap_phase(double angle);

/// Throws std::logic_error when sigma is not Hermitian to 1e-12, a diagonal
/// entry is below the vacuum floor, or the conjugate structure of d is broken.
void check_invariants(const GaussianState& state);

GaussianState vacuum_state();
GaussianState displace(GaussianState state, Mode mode, std::complex<double> amplitude);
GaussianState two_mode_squeeze(GaussianState state, double s, double theta);
/// Beam splitter with intensity transmission in [0, 1] mixing the mode with vacuum.
GaussianState pure_loss(GaussianState state, Mode mode, double transmission);
GaussianState phase_rotate(GaussianState state, Mode mode, double phi);

/// <a^dag a> of the mode, including the spontaneous contribution.
double mean_photons(const GaussianState& state, Mode mode);

/// Source, probe loss eta_p1, sensor (transmission then phase), probe loss
/// eta_p2, reference loss eta_r.
GaussianState build_lossy_btmss(const ProbeSpec& spec, const LossBudget& losses,
                                double sensor_T, double sensor_phi);

/// Step used for the central difference of d with respect to sensor_T.
inline constexpr double kTransmissionStep = 1e-6;
/// Condition number above which sigma is treated as singular.
inline constexpr double kMaxCovarianceCondition = 1e12;

/// Bright-limit quantum Cramer-Rao bound (2 ddot^dag sigma^-1 ddot)^-1 for the
/// sensor phase or transmission. Returns +inf when the displacement carries no
/// information (e.g. phase at sensor_T = 0). Throws std::domain_error for a
/// transmission bound at sensor_T = 0, where d is not differentiable, and
/// std::runtime_error when sigma is numerically singular.
double qcrb_bright(const ProbeSpec& spec, const LossBudget& losses, double sensor_T,
                   double sensor_phi, Estimand parameter);

}  // namespace resbound
