#include "resbound/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "resbound/numerics.hpp"

namespace resbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double raw_sensitivity(const TransferFunction& tf, const SensitivityQuery& q, double L, double N,
                       bool& removable) {
  const TransferDerivatives d = tf.derivatives(L);
  const double slope = q.estimand == Estimand::transmission ? d.dT : d.dphi;
  BoundQuery b;
  b.estimand = q.estimand;
  b.probe = q.probe;
  b.T = std::clamp(tf.transmission(L), 0.0, 1.0);
  b.T_complement = std::clamp(tf.complement(L), 0.0, 1.0);
  b.N = N;
  b.losses = q.losses;
  const double bound = qcrb(b);
  const double num = slope * slope;
  removable = num < kRemovableThreshold && bound * N < kRemovableThreshold;
  if (std::isinf(bound)) return 0.0;
  return num / (N * bound);
}

LineshapeSpec map_spec(int order, double T_res, double T_off) {
  return order == 1 ? LineshapeSpec::lorentzian(T_res, T_off)
                    : LineshapeSpec::butterworth(order, T_res, T_off);
}

}  // namespace

void SensitivityQuery::validate() const {
  probe.validate();
  losses.validate();
}

SensitivityPoint sensitivity_point(const TransferFunction& tf, const SensitivityQuery& q,
                                   double L, double N) {
  bool removable = false;
  const double v = raw_sensitivity(tf, q, L, N, removable);
  if (!removable) return {v, false};
  const double shifted = L < 0.0 ? L - kRemovableOffset : L + kRemovableOffset;
  return {raw_sensitivity(tf, q, shifted, N, removable), true};
}

double sensitivity_per_photon(const TransferFunction& tf, const SensitivityQuery& q, double L,
                              double N) {
  return sensitivity_point(tf, q, L, N).value;
}

double sensitivity_closed_lorentzian(const LineshapeSpec& spec, const SensitivityQuery& q,
                                     double L) {
  if (!spec.is_lorentzian()) {
    throw std::invalid_argument("closed-form sensitivity is only available for Lorentzian lineshapes");
  }
  q.validate();
  const double tr = spec.T_res();
  const double to = spec.T_off();
  const double x = L * L;
  const double s = q.probe.squeezing();
  const LossBudget& l = q.losses;
  const double corr = l.eta_p1 * d_r(l.eta_r, s) * correlation_weight(s);
  const double level = x * to + tr;
  const double common = (1.0 + x) * (1.0 + x) * ((1.0 + x) / l.eta_p2 - level * corr);
  if (q.estimand == Estimand::transmission) {
    // 4x (T_off - T_res)^2 / [(1+x)^2 (x T_off + T_res)(...)]; x cancels when T_res = 0.
    if (tr == 0.0) return 4.0 * to / common;
    const double dt = to - tr;
    return 4.0 * x * dt * dt / (common * level);
  }
  const double ro = std::sqrt(to) - std::sqrt(tr);
  if (tr == 0.0) return 4.0 * to * x / common;
  const double q2 = x * std::sqrt(to) - std::sqrt(tr);
  return 4.0 * ro * ro * q2 * q2 / (common * level);
}

SensitivityResult max_sensitivity(const TransferFunction& tf, const SensitivityQuery& q,
                                  const SearchOptions& options) {
  q.validate();
  if (!(options.lambda_max > options.lambda_min) || !(options.step > 0.0)) {
    throw std::invalid_argument("search range must be non-empty with a positive step");
  }
  const auto n = static_cast<std::size_t>(
      std::llround((options.lambda_max - options.lambda_min) / options.step)) + 1;
  SensitivityResult out;
  out.query = q;
  bool substituted = false;
  bool last_substituted = false;
  auto eval = [&](double L) {
    const SensitivityPoint p = sensitivity_point(tf, q, L);
    last_substituted = p.substituted;
    substituted = substituted || p.substituted;
    return p.value;
  };

  std::vector<double> lambda(n), curve(n);
  std::vector<bool> grid_substituted(n);
  for (std::size_t i = 0; i < n; ++i) {
    lambda[i] = std::min(options.lambda_min + static_cast<double>(i) * options.step,
                         options.lambda_max);
    curve[i] = eval(lambda[i]);
    grid_substituted[i] = last_substituted;
  }
  const double best = *std::max_element(curve.begin(), curve.end());
  std::size_t pick = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (curve[i] >= best * (1.0 - 1e-9)) pick = i;
  }

  const double lo = std::max(options.lambda_min, lambda[pick] - options.step);
  const double hi = std::min(options.lambda_max, lambda[pick] + options.step);
  double x = numerics::golden_section_maximize(eval, lo, hi, options.tolerance);
  double v = eval(x);
  // Refinement must beat the grid point by more than rounding, otherwise a flat
  // or substituted plateau lets the bracket drift off an exact grid maximum. A
  // substituted value sits O(1e-12) below its limit, hence the wider margin.
  const double margin = grid_substituted[pick] ? 1e-9 : 1e-12;
  if (!(v > curve[pick] * (1.0 + margin))) {
    x = lambda[pick];
    v = curve[pick];
  }
  if (x < 0.0 && -x <= options.lambda_max) {
    const double mirror = eval(-x);
    if (mirror >= v * (1.0 - 1e-12)) {
      x = -x;
      v = std::max(v, mirror);
    }
  }
  out.lambda_star = x;
  out.s_max_per_photon = v;
  out.substituted = substituted;
  if (options.keep_curve) {
    out.lambda = std::move(lambda);
    out.curve = std::move(curve);
  }
  return out;
}

double fom(const TransferFunction& tf, double s, const LossBudget& losses,
           const SearchOptions& options) {
  SearchOptions o = options;
  o.keep_curve = false;
  const SensitivityQuery phase{Estimand::phase, Probe::btmss(s), losses};
  const SensitivityQuery trans{Estimand::transmission, Probe::btmss(s), losses};
  return max_sensitivity(tf, phase, o).s_max_per_photon /
         max_sensitivity(tf, trans, o).s_max_per_photon;
}

FomMap fom_map(int order, double s, const LossBudget& losses, std::size_t grid_n,
               const SearchOptions& options, const FftPhaseOptions& fft) {
  if (grid_n < 2) throw std::invalid_argument("FOM map needs grid_n >= 2");
  if (order < 1) throw std::invalid_argument("lineshape order must be >= 1");
  Probe::btmss(s).validate();
  losses.validate();
  FomMap map;
  map.n = grid_n;
  map.axis.resize(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) {
    map.axis[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_n);
  }
  map.values.assign(grid_n * grid_n, kNaN);
  numerics::parallel_for(grid_n * grid_n, [&](std::size_t k) {
    const std::size_t i = k / grid_n;
    const std::size_t j = k % grid_n;
    if (i == j) return;
    const TransferFunction tf(map_spec(order, map.axis[i], map.axis[j]), fft);
    map.values[k] = fom(tf, s, losses, options);
  });
  map.contours = level_set(map.values, grid_n, map.axis, 1.0);
  return map;
}

std::vector<Polyline> level_set(const std::vector<double>& values, std::size_t n,
                                const std::vector<double>& axis, double level) {
  if (values.size() != n * n || axis.size() != n) {
    throw std::invalid_argument("level_set: field and axis sizes disagree");
  }
  // Edge ids: 2*(i*n + j) is (i,j)-(i,j+1); 2*(i*n + j) + 1 is (i,j)-(i+1,j).
  auto value = [&](std::size_t i, std::size_t j) { return values[i * n + j]; };
  auto point = [&](std::uint64_t id) {
    const std::size_t cell = id / 2;
    const std::size_t i = cell / n;
    const std::size_t j = cell % n;
    const bool horizontal = id % 2 == 0;
    const std::size_t i2 = horizontal ? i : i + 1;
    const std::size_t j2 = horizontal ? j + 1 : j;
    const double a = value(i, j);
    const double b = value(i2, j2);
    const double t = (level - a) / (b - a);
    return std::pair<double, double>{axis[i] + t * (axis[i2] - axis[i]),
                                     axis[j] + t * (axis[j2] - axis[j])};
  };

  std::vector<std::pair<std::uint64_t, std::uint64_t>> segments;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double a = value(i, j), b = value(i, j + 1);
      const double c = value(i + 1, j + 1), d = value(i + 1, j);
      if (std::isnan(a) || std::isnan(b) || std::isnan(c) || std::isnan(d)) continue;
      const bool sa = a > level, sb = b > level, sc = c > level, sd = d > level;
      const std::uint64_t e0 = 2 * (i * n + j);
      const std::uint64_t e1 = 2 * (i * n + j + 1) + 1;
      const std::uint64_t e2 = 2 * ((i + 1) * n + j);
      const std::uint64_t e3 = 2 * (i * n + j) + 1;
      std::vector<std::uint64_t> cut;
      if (sa != sb) cut.push_back(e0);
      if (sb != sc) cut.push_back(e1);
      if (sd != sc) cut.push_back(e2);
      if (sa != sd) cut.push_back(e3);
      if (cut.size() == 2) {
        segments.emplace_back(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const bool centre = 0.25 * (a + b + c + d) > level;
        if (centre == sa) {
          segments.emplace_back(e0, e1);
          segments.emplace_back(e2, e3);
        } else {
          segments.emplace_back(e0, e3);
          segments.emplace_back(e1, e2);
        }
      }
    }
  }

  std::map<std::uint64_t, std::vector<std::size_t>> incident;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    incident[segments[k].first].push_back(k);
    incident[segments[k].second].push_back(k);
  }
  std::vector<bool> used(segments.size(), false);
  auto next_segment = [&](std::uint64_t edge) -> std::ptrdiff_t {
    for (std::size_t k : incident[edge]) {
      if (!used[k]) return static_cast<std::ptrdiff_t>(k);
    }
    return -1;
  };
  auto other = [&](std::size_t k, std::uint64_t edge) {
    return segments[k].first == edge ? segments[k].second : segments[k].first;
  };

  std::vector<Polyline> out;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (used[k]) continue;
    used[k] = true;
    std::deque<std::uint64_t> chain = {segments[k].first, segments[k].second};
    for (std::ptrdiff_t s = next_segment(chain.back()); s >= 0; s = next_segment(chain.back())) {
      used[static_cast<std::size_t>(s)] = true;
      chain.push_back(other(static_cast<std::size_t>(s), chain.back()));
    }
    for (std::ptrdiff_t s = next_segment(chain.front()); s >= 0;
         s = next_segment(chain.front())) {
      used[static_cast<std::size_t>(s)] = true;
      chain.push_front(other(static_cast<std::size_t>(s), chain.front()));
    }
    Polyline line;
    line.reserve(chain.size());
    for (std::uint64_t e : chain) line.push_back(point(e));
    out.push_back(std::move(line));
  }
  return out;
}

double eqef(const TransferFunction& tf, const SensitivityQuery& q, const SearchOptions& options) {
  if (q.probe.kind != ProbeKind::btmss) {
    throw std::invalid_argument("EQEF needs a bTMSS query");
  }
  SearchOptions o = options;
  o.keep_curve = false;
  SensitivityQuery coherent = q;
  coherent.probe = Probe::coherent();
  return max_sensitivity(tf, q, o).s_max_per_photon /
         max_sensitivity(tf, coherent, o).s_max_per_photon;
}

EqefSweep eqef_loss_sweep(const TransferFunction& tf, Estimand estimand, double s,
                          LossSweep variable, std::size_t samples, const SearchOptions& options,
                          double eta_min) {
  if (samples < 2) throw std::invalid_argument("loss sweep needs at least two samples");
  if (!(eta_min > 0.0 && eta_min < 1.0)) {
    throw std::invalid_argument("eta_min must lie in (0, 1)");
  }
  EqefSweep out;
  out.variable = variable;
  out.eta.resize(samples);
  out.eqef.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    out.eta[i] = eta_min + (1.0 - eta_min) * static_cast<double>(i) /
                               static_cast<double>(samples - 1);
  }
  numerics::parallel_for(samples, [&](std::size_t i) {
    SensitivityQuery q{estimand, Probe::btmss(s), LossBudget::lossless()};
    if (variable == LossSweep::probe) {
      q.losses.eta_p1 = out.eta[i];
    } else {
      q.losses.eta_r = out.eta[i];
    }
    out.eqef[i] = eqef(tf, q, options);
  });
  out.monotone = true;
  for (std::size_t i = 1; i < samples; ++i) {
    if (out.eqef[i] < out.eqef[i - 1] - 1e-12 * std::abs(out.eqef[i - 1])) out.monotone = false;
  }
  return out;
}

std::optional<double> reference_crossing(const TransferFunction& tf, Estimand estimand, double s,
                                         double lo, double hi, double tol,
                                         const SearchOptions& options) {
  auto f = [&](double eta_r) {
    SensitivityQuery q{estimand, Probe::btmss(s), LossBudget::lossless()};
    q.losses.eta_r = eta_r;
    return eqef(tf, q, options) - 1.0;
  };
  double flo = f(lo);
  const double fhi = f(hi);
  if (std::abs(flo) <= 1e-9 && std::abs(fhi) <= 1e-9) return std::nullopt;
  if ((flo < 0.0) == (fhi < 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace resbound
