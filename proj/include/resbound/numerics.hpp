#pragma once

#include <cstddef>
#include <functional>

namespace resbound::numerics {

/// Maximizes a unimodal f on [lo, hi] by golden-section search until the
/// bracket is narrower than tol. Returns the abscissa of the best point seen.
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

/// Five-point central difference with step h.
double five_point_derivative(const std::function<double(double)>& f, double x, double h);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error
  bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on the finite interval
/// [a, b]. The integrand is never evaluated at the endpoints, so integrable
/// endpoint singularities are fine.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, std::size_t max_intervals = 4000);

/// As integrate(), on [a, +inf) via x = a + t / (1 - t).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double abs_tol, std::size_t max_intervals = 4000);

/// Runs body(i) for i in [0, n), spread over the available hardware threads.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace resbound::numerics
