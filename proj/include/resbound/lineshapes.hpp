#pragma once

// Resonance transfer functions: intensity transmission T(L) and phase phi(L)
// as functions of the generalized wavelength L = (lambda - lambda0) / HWHM.

#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace resbound {

struct Lorentzian {};

struct Butterworth {
  int order = 1;
};

/// Sampled (L, T) pairs, strictly increasing in L. Evaluated by modified Akima
/// interpolation and clamped to the end values outside the sampled range.
struct Tabulated {
  std::vector<double> lambda;
  std::vector<double> transmission;
};

using LineshapeFamily = std::variant<Lorentzian, Butterworth, Tabulated>;

class LineshapeSpec {
 public:
  /// Throws std::invalid_argument unless T_res, T_off lie in [0, 1] and differ.
  static LineshapeSpec lorentzian(double T_res, double T_off);
  static LineshapeSpec butterworth(int order, double T_res, double T_off);
  /// T_res is the interpolated value at L = 0 and T_off the value at the sample
  /// farthest from resonance.
  static LineshapeSpec tabulated(std::vector<double> lambda, std::vector<double> transmission);

  const LineshapeFamily& family() const { return family_; }
  double T_res() const { return T_res_; }
  double T_off() const { return T_off_; }

  /// True for Lorentzian and first-order Butterworth, which share the closed-form
  /// complex amplitude.
  bool is_lorentzian() const;
  /// Butterworth order, 1 for Lorentzian, 0 for tabulated.
  int order() const;

  double transmission(double L) const;
  /// 1 - T(L), evaluated without cancellation near T = 1 for the analytic families.
  double complement(double L) const;
  double transmission_derivative(double L) const;
  /// d/dL of (1/2) ln T(L), with T_res replaced by max(T_res, floor).
  double log_amplitude_slope(double L, double floor) const;

  std::string describe() const;

 private:
  class Table;
  LineshapeSpec(LineshapeFamily family, double T_res, double T_off);

  LineshapeFamily family_;
  double T_res_ = 1.0;
  double T_off_ = 0.0;
  std::shared_ptr<const Table> table_;
};

/// t(L) = (sqrt(T_res) - sqrt(T_off)) / (1 - iL) + sqrt(T_off).
std::complex<double> lorentzian_amplitude(double L, double T_res, double T_off);
/// (T_res + L^2 T_off) / (1 + L^2).
double lorentzian_transmission(double L, double T_res, double T_off);
/// arg t(L). Continuous except for the perfect dip (T_res = 0), where the phase
/// jumps by pi across L = 0 and is defined as 0 there.
double lorentzian_phase(double L, double T_res, double T_off);
/// (T_res + L^{2m} T_off) / (1 + L^{2m}).
double butterworth_transmission(double L, int order, double T_res, double T_off);

struct TransferDerivatives {
  double dT = 0.0;
  double dphi = 0.0;
};

/// Closed-form dT/dL and dphi/dL of the Lorentzian.
TransferDerivatives lorentzian_derivatives(double L, double T_res, double T_off);

/// Reads a two-column (L, T) text table; '#' starts a comment.
Tabulated load_table(const std::string& path);

}  // namespace resbound
