#pragma once

#include <functional>

namespace fdcmac::numeric {

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b].
/// Subdivides until the local error estimate is below abs_tol (scaled by
/// interval share).  Throws numerical_error when the depth cap is hit with
/// the tolerance still unmet.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, int max_depth = 48);

/// Root of the monotone decreasing function g on [lo, hi] with g(lo) > 0 >
/// g(hi); bisection to rel_tol on the abscissa.  The bracket is expanded
/// geometrically (up to `expand` doublings of hi) if g(hi) > 0.  Throws
/// calibration_error when no bracket exists.
double bisect_decreasing(const std::function<double(double)>& g, double lo, double hi,
                         double rel_tol = 1e-12, int expand = 60);

/// Maximizer of a unimodal f on [a, b] by golden-section search to x_tol.
/// Returns the abscissa; the caller re-evaluates f if the value is needed.
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tol);

/// (e^x - 1)/x, stable near zero.
double expm1_over_x(double x);

/// (x e^x - e^x + 1)/x^2, stable near zero (value 1/2 at x = 0).
double exp_quad_factor(double x);

/// Number of tolerant sign changes in the first differences of ys.
/// Differences with |d| <= tol count as flat and do not flip the sign.
int sign_changes(const double* ys, int n, double tol);

}  // namespace fdcmac::numeric
