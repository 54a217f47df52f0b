#include "fdcmac/qmath.hpp"

#include <cmath>
#include <stdexcept>

namespace fdcmac {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double q_function(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("q_function: non-finite input");
    }
    return 0.5 * std::erfc(x / kSqrt2);
}

double q_inverse(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw std::domain_error("q_inverse: probability must lie in (0, 1)");
    }
    // Bisection bracket, then Newton polish on Q(x) - prob.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 120; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > prob) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        if (pdf <= 0.0) break;
        const double step = (q_function(x) - prob) / pdf;
        if (!std::isfinite(step)) break;
        const double next = x + step;
        if (next <= lo || next >= hi) break;
        x = next;
    }
    return x;
}

double db_to_linear(double db) {
    if (!std::isfinite(db)) {
        throw std::domain_error("db_to_linear: non-finite input");
    }
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear) {
    if (!(linear > 0.0) || !std::isfinite(linear)) {
        throw std::domain_error("linear_to_db: input must be positive and finite");
    }
    return 10.0 * std::log10(linear);
}

}  // namespace fdcmac
