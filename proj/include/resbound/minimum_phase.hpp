#pragma once

// Minimum-phase reconstruction: the phase of a causal resonance response is the
// Hilbert transform of ln|t| = (1/2) ln T. Two independent routes are provided,
// a discrete transform over a wide uniform grid and a direct kernel integral.

#include <functional>
#include <optional>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "resbound/lineshapes.hpp"

namespace resbound {

/// Transmission floor applied inside phase reconstruction when T reaches zero.
inline constexpr double kTransmissionFloor = 1e-12;

struct FftPhaseOptions {
  double half_range = 1000.0;        ///< transform grid spans [-half_range, half_range)
  std::size_t samples = 1u << 20;    ///< power of two
  double trusted = 3.0;              ///< output restricted to [-trusted, trusted]
  double floor = 0.0;                ///< 0 rejects non-positive T; otherwise floors T (1 + L^2)^-p, p the far-field log slope
};

/// Phase samples on a uniform grid that covers the trusted range plus a small
/// margin for derivative stencils.
class PhaseSpectrum {
 public:
  PhaseSpectrum(double first, double step, std::vector<double> phase, double trusted_min,
                double trusted_max, double floor_value, bool floor_applied);

  std::size_t size() const { return phase_.size(); }
  double lambda_at(std::size_t i) const { return first_ + static_cast<double>(i) * step_; }
  double phase_at(std::size_t i) const { return phase_[i]; }
  double step() const { return step_; }

  double trusted_min() const { return trusted_min_; }
  double trusted_max() const { return trusted_max_; }
  bool in_trusted_range(double L) const { return L >= trusted_min_ && L <= trusted_max_; }
  /// Floor used for T inside the reconstruction and whether any sample hit it.
  double floor_value() const { return floor_value_; }
  bool floor_applied() const { return floor_applied_; }

  /// Cubic-spline interpolated phase. Throws std::out_of_range outside the
  /// trusted range.
  double operator()(double L) const;
  /// Five-point central difference (step 1e-4) of the interpolated phase.
  double derivative(double L) const;

 private:
  double first_;
  double step_;
  std::vector<double> phase_;
  double trusted_min_, trusted_max_;
  double floor_value_;
  bool floor_applied_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

inline constexpr double kPhaseDerivativeStep = 1e-4;

/// Hilbert transform of (1/2) ln T via FFT. The logarithmic far-field growth of
/// ln T (T_off = 0) is removed with a matched (p/2) ln(1 + L^2) term whose
/// transform is known in closed form, so periodic wrap-around does not bias the
/// trusted range. Output is anchored to phi(0) = 0. Throws std::domain_error if
/// T <= 0 somewhere on the grid and options.floor == 0.
PhaseSpectrum minimum_phase_fft(const std::function<double(double)>& transmission,
                                const FftPhaseOptions& options = {});

struct KernelOptions {
  double abs_tol = 1e-8;        ///< quadrature target
  double max_error = 1e-6;      ///< estimated error above which evaluation fails
  double floor = kTransmissionFloor;
};

/// phi(L) = -(1/pi) int_0^inf ln|(x + L)/(x - L)| d/dx[(1/2) ln T(x)] dx, the
/// sign matching arg t for t = 1/(1 - iL). Adaptive quadrature split at the
/// logarithmic singularity x = |L| and at the lineshape's own scales. Throws
/// std::runtime_error when the error estimate exceeds options.max_error.
double minimum_phase_kernel(double L, const LineshapeSpec& spec, const KernelOptions& options = {});

/// A lineshape with its phase response: closed form for Lorentzian (and
/// Butterworth m = 1), FFT reconstruction otherwise.
class TransferFunction {
 public:
  explicit TransferFunction(LineshapeSpec spec, const FftPhaseOptions& fft = default_fft());

  const LineshapeSpec& spec() const { return spec_; }
  bool analytic_phase() const { return !reconstructed_.has_value(); }
  const std::optional<PhaseSpectrum>& reconstructed() const { return reconstructed_; }

  double transmission(double L) const { return spec_.transmission(L); }
  double complement(double L) const { return spec_.complement(L); }
  double phase(double L) const;
  /// Throws std::out_of_range for L outside the trusted range of a reconstructed phase.
  TransferDerivatives derivatives(double L) const;

  static FftPhaseOptions default_fft() {
    FftPhaseOptions o;
    o.floor = kTransmissionFloor;
    return o;
  }

 private:
  LineshapeSpec spec_;
  std::optional<PhaseSpectrum> reconstructed_;
};

/// transfer_derivatives(spec, L) for a prepared transfer function.
inline TransferDerivatives transfer_derivatives(const TransferFunction& tf, double L) {
  return tf.derivatives(L);
}

}  // namespace resbound
