#pragma once

// Sensitivity per probing photon S(L|X)/N = |dX/dL|^2 / (N * var_QCRB(X)),
// its maximum over wavelength, and the derived figure of merit and effective
// quantum enhancement factor.

#include <optional>
#include <utility>
#include <vector>

#include "resbound/bounds.hpp"
#include "resbound/minimum_phase.hpp"
#include "resbound/types.hpp"

namespace resbound {

struct SensitivityQuery {
  Estimand estimand = Estimand::transmission;
  Probe probe = Probe::btmss(2.0);
  LossBudget losses;

  void validate() const;
};

/// Both |dX/dL|^2 and the bound below this are treated as a 0/0 point.
inline constexpr double kRemovableThreshold = 1e-12;
/// Offset at which a 0/0 point is replaced by its neighbour.
inline constexpr double kRemovableOffset = 1e-6;

struct SensitivityPoint {
  double value = 0.0;
  bool substituted = false;  ///< value taken at L = +/-1e-6 instead of L
};

SensitivityPoint sensitivity_point(const TransferFunction& tf, const SensitivityQuery& q,
                                   double L, double N = 1.0);

/// S(L|X)/N through the generic bound-over-derivative pipeline. Zero where the
/// phase bound is infinite (T = 0).
double sensitivity_per_photon(const TransferFunction& tf, const SensitivityQuery& q, double L,
                              double N = 1.0);

/// Direct closed form for Lorentzian lineshapes. Throws std::invalid_argument
/// for any other lineshape.
double sensitivity_closed_lorentzian(const LineshapeSpec& spec, const SensitivityQuery& q,
                                     double L);

struct SearchOptions {
  double lambda_min = -3.0;
  double lambda_max = 3.0;
  double step = 1e-3;
  double tolerance = 1e-8;  ///< golden-section bracket width
  bool keep_curve = true;
};

struct SensitivityResult {
  double lambda_star = 0.0;
  double s_max_per_photon = 0.0;
  std::vector<double> lambda;
  std::vector<double> curve;
  bool substituted = false;  ///< any curve or refinement point used a 0/0 substitution
  SensitivityQuery query;
};

/// Coarse scan then golden-section refinement. Ties between mirror-image maxima
/// resolve to L* >= 0.
SensitivityResult max_sensitivity(const TransferFunction& tf, const SensitivityQuery& q,
                                  const SearchOptions& options = {});

/// Phase maximum over transmission maximum, both with a bTMSS probe.
double fom(const TransferFunction& tf, double s, const LossBudget& losses,
           const SearchOptions& options = {});

using Polyline = std::vector<std::pair<double, double>>;

struct FomMap {
  std::size_t n = 0;
  /// Cell-centred axis (i + 0.5)/n shared by T_res (rows) and T_off (columns).
  std::vector<double> axis;
  /// Row-major, values[i * n + j] at (T_res = axis[i], T_off = axis[j]); NaN on
  /// the diagonal where the response is flat.
  std::vector<double> values;
  /// FOM = 1 level set as (T_res, T_off) polylines.
  std::vector<Polyline> contours;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// order 1 selects the Lorentzian, order > 1 a Butterworth of that order.
FomMap fom_map(int order, double s, const LossBudget& losses, std::size_t grid_n,
               const SearchOptions& options = {},
               const FftPhaseOptions& fft = TransferFunction::default_fft());

/// Marching-squares extraction of the level set of a row-major n x n field on
/// the given axis. Squares touching NaN are skipped.
std::vector<Polyline> level_set(const std::vector<double>& values, std::size_t n,
                                const std::vector<double>& axis, double level);

/// Maximum with the query's bTMSS probe over maximum with a coherent probe at
/// the same losses. Throws std::invalid_argument for a coherent query.
double eqef(const TransferFunction& tf, const SensitivityQuery& q,
            const SearchOptions& options = {});

enum class LossSweep { probe, reference };

struct EqefSweep {
  LossSweep variable = LossSweep::probe;
  std::vector<double> eta;
  std::vector<double> eqef;
  /// EQEF non-decreasing in eta (it relaxes monotonically toward 1 as loss grows).
  bool monotone = false;
};

inline constexpr double kSweepEtaMin = 0.01;

/// Samples eta = eta_min + (1 - eta_min) i/(samples - 1). A probe sweep sets
/// eta_p1 = eta with eta_p2 = eta_r = 1; a reference sweep sets eta_r = eta
/// with lossless probe.
EqefSweep eqef_loss_sweep(const TransferFunction& tf, Estimand estimand, double s,
                          LossSweep variable, std::size_t samples,
                          const SearchOptions& options = {}, double eta_min = kSweepEtaMin);

/// eta_r at which EQEF crosses 1, by bisection on [lo, hi]. Empty when the
/// EQEF stays within 1e-9 of 1 at both ends (no reference dependence).
std::optional<double> reference_crossing(const TransferFunction& tf, Estimand estimand, double s,
                                         double lo = kSweepEtaMin, double hi = 1.0,
                                         double tol = 1e-10, const SearchOptions& options = {});

}  // namespace resbound
