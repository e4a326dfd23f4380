#include "resbound/minimum_phase.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "resbound/numerics.hpp"

namespace resbound {

namespace {

// FFTW's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

// Hilbert transform (1/pi) PV int f(y)/(x - y) dy of a uniformly sampled,
// periodically extended sequence: multiply positive frequencies by -i.
std::vector<double> discrete_hilbert(const std::vector<double>& f) {
  const std::size_t n = f.size();
  const std::size_t nc = n / 2 + 1;
  FftwBuffer<double> real(fftw_alloc_real(n));
  FftwBuffer<fftw_complex> spec(fftw_alloc_complex(nc));
  fftw_plan forward, backward;
  {
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.get(), spec.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec.get(), real.get(), FFTW_ESTIMATE);
  }
  std::copy(f.begin(), f.end(), real.get());
  fftw_execute(forward);
  spec[0][0] = spec[0][1] = 0.0;
  for (std::size_t j = 1; j < nc; ++j) {
    // (re + i im) * (-i) = im - i re
    const double re = spec[j][0];
    const double im = spec[j][1];
    spec[j][0] = im;
    spec[j][1] = -re;
  }
  if (n % 2 == 0) spec[nc - 1][0] = spec[nc - 1][1] = 0.0;
  fftw_execute(backward);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = real[k] * scale;
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  return out;
}

// ln((x + a)/|x - a|) for x, a > 0 without cancellation far from x = a. The
// integrable singularity at x = a is given weight zero if a node lands on it.
double log_kernel(double x, double a) {
  if (x == a) return 0.0;
  if (x > a) return std::log1p(2.0 * a / (x - a));
  return std::log1p(2.0 * x / (a - x));
}

constexpr double kMargin = 0.05;

}  // namespace

PhaseSpectrum::PhaseSpectrum(double first, double step, std::vector<double> phase,
                             double trusted_min, double trusted_max, double floor_value,
                             bool floor_applied)
    : first_(first),
      step_(step),
      phase_(std::move(phase)),
      trusted_min_(trusted_min),
      trusted_max_(trusted_max),
      floor_value_(floor_value),
      floor_applied_(floor_applied),
      spline_(phase_.data(), phase_.size(), first_, step_) {
  if (trusted_min_ < first_ || trusted_max_ > lambda_at(phase_.size() - 1)) {
    throw std::invalid_argument("trusted range must lie inside the sampled range");
  }
}

double PhaseSpectrum::operator()(double L) const {
  if (!in_trusted_range(L)) {
    throw std::out_of_range("L = " + std::to_string(L) + " is outside the trusted phase range");
  }
  return spline_(L);
}

double PhaseSpectrum::derivative(double L) const {
  if (!in_trusted_range(L)) {
    throw std::out_of_range("L = " + std::to_string(L) + " is outside the trusted phase range");
  }
  return numerics::five_point_derivative([this](double x) { return spline_(x); }, L,
                                         kPhaseDerivativeStep);
}

PhaseSpectrum minimum_phase_fft(const std::function<double(double)>& transmission,
                                const FftPhaseOptions& options) {
  const std::size_t n = options.samples;
  if (n < 16 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("FFT sample count must be a power of two >= 16");
  }
  if (!(options.trusted + kMargin < options.half_range)) {
    throw std::invalid_argument("trusted range must be well inside the transform range");
  }
  const double R = options.half_range;
  const double h = 2.0 * R / static_cast<double>(n);
  auto lambda = [&](std::size_t k) { return -R + static_cast<double>(k) * h; };

  const double half_log_floor = options.floor > 0.0 ? 0.5 * std::log(options.floor) : 0.0;
  bool floored = false;
  // (1/2) ln T; non-positive T maps to the floor or is rejected.
  auto half_log = [&](double L) {
    const double t = transmission(L);
    if (t > 0.0) return 0.5 * std::log(t);
    if (options.floor <= 0.0) {
      throw std::domain_error("transmission is not strictly positive at L = " + std::to_string(L) +
                              "; enable the transmission floor for phase reconstruction");
    }
    floored = true;
    return half_log_floor;
  };

  // Far-field log slope p: (1/2) ln T ~ p ln|L| + const as |L| -> inf.
  const double p = 0.5 * ((half_log(R) - half_log(R / 2.0)) +
                          (half_log(-R) - half_log(-R / 2.0))) / std::numbers::ln2;

  // The floor acts on T (1 + L^2)^-p so that power-law tails are not clipped;
  // near resonance the factor is ~1 and this is max(T, floor).
  std::vector<double> residual(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double L = lambda(k);
    double r = half_log(L) - 0.5 * p * std::log1p(L * L);
    if (options.floor > 0.0 && r < half_log_floor) {
      r = half_log_floor;
      floored = true;
    }
    residual[k] = r;
  }
  const std::vector<double> transformed = discrete_hilbert(residual);

  // H[(p/2) ln(1 + L^2)] = -p atan(L).
  auto phase_at = [&](std::size_t k) { return transformed[k] - p * std::atan(lambda(k)); };
  const std::size_t zero = n / 2;
  const double anchor = phase_at(zero);

  const double reach = options.trusted + kMargin;
  const auto first = static_cast<std::size_t>(std::floor((R - reach) / h));
  const auto last = static_cast<std::size_t>(std::ceil((R + reach) / h));
  std::vector<double> phase;
  phase.reserve(last - first + 1);
  for (std::size_t k = first; k <= last; ++k) phase.push_back(phase_at(k) - anchor);

  return PhaseSpectrum(lambda(first), h, std::move(phase), -options.trusted, options.trusted,
                       options.floor, floored);
}

double minimum_phase_kernel(double L, const LineshapeSpec& spec, const KernelOptions& options) {
  if (L == 0.0) return 0.0;
  const double a = std::abs(L);
  auto integrand = [&](double x) {
    return log_kernel(x, a) * spec.log_amplitude_slope(x, options.floor);
  };

  std::vector<double> breaks = {a, 2.0 * a, 1.0};
  const int m = spec.order();
  if (m >= 1 && spec.T_off() > 0.0) {
    const double t_res = std::max(spec.T_res(), options.floor);
    breaks.push_back(std::pow(t_res / spec.T_off(), 1.0 / (2.0 * m)));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double piece_tol = options.abs_tol / static_cast<double>(breaks.size() + 1);
  double value = 0.0;
  double error = 0.0;
  double lo = 0.0;
  for (double b : breaks) {
    const auto r = numerics::integrate(integrand, lo, b, piece_tol);
    value += r.value;
    error += r.error;
    lo = b;
  }
  const auto tail = numerics::integrate_to_infinity(integrand, lo, piece_tol);
  value += tail.value;
  error += tail.error;

  if (!(error <= options.max_error) || !std::isfinite(value)) {
    throw std::runtime_error("kernel quadrature did not converge at L = " + std::to_string(L) +
                             " (error estimate " + std::to_string(error) + ")");
  }
  const double phi = -value / std::numbers::pi;
  return L > 0.0 ? phi : -phi;
}

TransferFunction::TransferFunction(LineshapeSpec spec, const FftPhaseOptions& fft)
    : spec_(std::move(spec)) {
  if (!spec_.is_lorentzian()) {
    const LineshapeSpec& s = spec_;
    reconstructed_ = minimum_phase_fft([&s](double L) { return s.transmission(L); }, fft);
  }
}

double TransferFunction::phase(double L) const {
  if (reconstructed_) return (*reconstructed_)(L);
  return lorentzian_phase(L, spec_.T_res(), spec_.T_off());
}

TransferDerivatives TransferFunction::derivatives(double L) const {
  if (!reconstructed_) return lorentzian_derivatives(L, spec_.T_res(), spec_.T_off());
  return {spec_.transmission_derivative(L), reconstructed_->derivative(L)};
}

}  // namespace resbound
