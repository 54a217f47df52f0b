#pragma once

namespace fdcmac {

/// Standard normal tail probability Q(x) = P(Z > x) = erfc(x/sqrt(2))/2.
/// Absolute error below 1e-12 for |x| <= 8.  Throws std::domain_error on
/// non-finite input.
double q_function(double x);

/// Inverse of q_function on (0, 1).  Satisfies
/// |q_function(q_inverse(p)) - p| <= 1e-10.  Throws std::domain_error for
/// p outside (0, 1).
double q_inverse(double prob);

/// 10^(db/10).
double db_to_linear(double db);

/// 10*log10(linear).  Throws std::domain_error for linear <= 0.
double linear_to_db(double linear);

}  // namespace fdcmac
