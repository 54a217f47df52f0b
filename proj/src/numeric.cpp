#include "fdcmac/numeric.hpp"

#include <cmath>
#include <utility>

#include "fdcmac/types.hpp"

namespace fdcmac::numeric {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1, 1]; the embedded 7-point
// Gauss rule uses the even-indexed Kronrod nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double result_g = fc * kWg[3];
    double result_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        result_k += fsum * kWgk[j];
        if (j % 2 == 1) {
            result_g += fsum * kWg[j / 2];
        }
    }
    result_k *= h;
    result_g *= h;
    return {result_k, std::abs(result_k - result_g)};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b,
                     double tol, int depth, int max_depth) {
    const PanelResult r = gk15(f, a, b);
    if (r.err <= tol || r.err <= 1e-16 * std::abs(r.kronrod)) {
        return r.kronrod;
    }
    if (depth >= max_depth) {
        throw numerical_error("integrate: tolerance not reached at max subdivision depth");
    }
    const double c = 0.5 * (a + b);
    return integrate_rec(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           integrate_rec(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return integrate_rec(f, a, b, abs_tol, 0, max_depth);
}

double bisect_decreasing(const std::function<double(double)>& g, double lo, double hi,
                         double rel_tol, int expand) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo < 0.0) {
        throw calibration_error("bisect_decreasing: target above the function at the lower bound");
    }
    int tries = 0;
    while (ghi > 0.0) {
        if (++tries > expand) {
            throw calibration_error("bisect_decreasing: failed to bracket a root");
        }
        lo = hi;
        hi *= 2.0;
        ghi = g(hi);
    }
    while (hi - lo > rel_tol * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

double expm1_over_x(double x) {
    if (std::abs(x) < 1e-6) {
        return 1.0 + x * (0.5 + x / 6.0);
    }
    return std::expm1(x) / x;
}

double exp_quad_factor(double x) {
    if (std::abs(x) < 1e-4) {
        return 0.5 + x * (1.0 / 3.0 + x / 8.0);
    }
    return (x * std::exp(x) - std::expm1(x)) / (x * x);
}

int sign_changes(const double* ys, int n, double tol) {
    int changes = 0;
    int last = 0;
    for (int i = 1; i < n; ++i) {
        const double d = ys[i] - ys[i - 1];
        if (std::abs(d) <= tol) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace fdcmac::numeric
