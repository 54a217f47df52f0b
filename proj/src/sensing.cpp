#include "fdcmac/sensing.hpp"

#include <cmath>
#include <vector>

#include "fdcmac/numeric.hpp"
#include "fdcmac/qmath.hpp"

namespace fdcmac::sensing {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double detector_floor(double p_sen, const SensingConfig& sc, const SicModel& sic) {
    return sc.n0_noise + self_interference(p_sen, sic);
}

void check_ts(double t_s) {
    if (!(t_s > 0.0)) {
        throw std::domain_error("sensing: t_s > 0 required");
    }
}

}  // namespace

double false_alarm_p00(double eps, double t_s, double p_sen,
                       const SensingConfig& sc, const SicModel& sic) {
    check_ts(t_s);
    const double floor = detector_floor(p_sen, sc, sic);
    return q_function((eps / floor - 1.0) * std::sqrt(sc.f_s * t_s));
}

double detection_p01(double eps, double t_s, double t, double p_sen, double p_pu,
                     const SensingConfig& sc, const SicModel& sic) {
    check_ts(t_s);
    if (!(t >= 0.0 && t <= t_s)) {
        throw std::domain_error("detection_p01: arrival offset outside [0, t_s]");
    }
    const double floor = detector_floor(p_sen, sc, sic);
    const double gamma_ps = p_pu / floor;
    const double rho = (t_s - t) / t_s;  // fraction of the window with the PU present
    const double num = (eps / floor - rho * gamma_ps - 1.0) * std::sqrt(sc.f_s * t_s);
    const double den = std::sqrt(rho * (gamma_ps + 1.0) * (gamma_ps + 1.0) + t / t_s);
    return q_function(num / den);
}

double average_detection(double eps, double t_s, double p_sen, const PuModel& pu,
                         const SensingConfig& sc, const SicModel& sic) {
    check_ts(t_s);
    // Conditional arrival pdf f(t | 0 <= t <= t_s) for the exponential idle
    // process; expm1 keeps the normalizer exact for t_s << tau_id.
    const double inv_tau = 1.0 / pu.tau_id_bar;
    const double norm = -std::expm1(-t_s * inv_tau);
    const auto integrand = [&](double t) {
        const double w = inv_tau * std::exp(-t * inv_tau) / norm;
        return detection_p01(eps, t_s, t, p_sen, pu.p_pu, sc, sic) * w;
    };
    return numeric::integrate(integrand, 0.0, t_s, 1e-11);
}

double calibrate_threshold(double t_s, double p_sen, double pd_target,
                           const PuModel& pu, const SensingConfig& sc,
                           const SicModel& sic) {
    check_ts(t_s);
    if (!(pd_target > 0.0 && pd_target < 1.0)) {
        throw std::domain_error("calibrate_threshold: pd_target in (0, 1) required");
    }
    const double floor = detector_floor(p_sen, sc, sic);
    const auto gap = [&](double eps) {
        return average_detection(eps, t_s, p_sen, pu, sc, sic) - pd_target;
    };
    // Average detection is strictly decreasing in eps, 1 at 0+ and 0 at
    // large eps; the expanding bracket always closes.
    const double hi0 = 4.0 * (floor + pu.p_pu);
    return numeric::bisect_decreasing(gap, 1e-12 * sc.n0_noise, hi0, 1e-12);
}

ApproxPf00 approx_pf00_and_derivatives(double t_s, double p_sen, double pd_target,
                                       const PuModel& pu, const SensingConfig& sc,
                                       const SicModel& sic) {
    check_ts(t_s);
    const double floor = detector_floor(p_sen, sc, sic);
    const double sqft = std::sqrt(sc.f_s * t_s);
    const double eps_star = calibrate_threshold(t_s, p_sen, pd_target, pu, sc, sic);
    const double qinv_pd = q_inverse(pd_target);

    // Slope of Qinv(Pd_exact(eps)) in eps by least squares over a log-spaced
    // grid, with the line constrained through the calibrated point.
    const int kPts = 17;
    const double half_decades = 0.04;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < kPts; ++i) {
        const double expo = -half_decades + 2.0 * half_decades * i / (kPts - 1);
        const double eps = eps_star * std::pow(10.0, expo);
        const double pd = average_detection(eps, t_s, p_sen, pu, sc, sic);
        if (!(pd > 1e-12 && pd < 1.0 - 1e-12)) continue;
        const double dx = eps - eps_star;
        const double dy = q_inverse(pd) - qinv_pd;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(sxy > 0.0)) {
        throw calibration_error("approx_pf00: slope fit degenerated");
    }
    const double slope = sxy / sxx;  // d Qinv(Pd)/d eps > 0

    ApproxPf00 out;
    out.gamma1_bar = sqft / (slope * floor) - 1.0;
    out.alpha_bar = (out.gamma1_bar + 1.0) * qinv_pd;
    // Anchor through (eps*, pd_target): Qinv(pd) = (eps*/floor - gamma - 1) sqft/(g1+1).
    out.gamma_bar = eps_star / floor - 1.0 - out.alpha_bar / sqft;
    if (!(out.gamma_bar > 0.0)) {
        throw calibration_error("approx_pf00: fitted gamma_bar not positive");
    }
    const double y = out.alpha_bar + out.gamma_bar * sqft;
    out.pf00 = q_function(y);
    const double gauss = std::exp(-0.5 * y * y);
    out.d_pf00_dts = -out.gamma_bar * sqft / (2.0 * kSqrt2Pi * t_s) * gauss;
    out.d2_pf00_dts2 =
        out.gamma_bar * sqft / (4.0 * kSqrt2Pi * t_s * t_s) * (1.0 + y * out.gamma_bar * sqft) * gauss;
    return out;
}

SensingOutcomeModel make_outcome_model(double t_s, double p_sen, const PuModel& pu,
                                       const SensingConfig& sc, const SicModel& sic) {
    check_ts(t_s);
    sc.validate();
    pu.validate();
    SensingOutcomeModel m;
    m.t_s = t_s;
    m.gamma_ps = pu.p_pu / detector_floor(p_sen, sc, sic);
    if (sc.epsilon) {
        m.epsilon_star = *sc.epsilon;
        m.pd_avg = average_detection(m.epsilon_star, t_s, p_sen, pu, sc, sic);
    } else {
        m.epsilon_star = calibrate_threshold(t_s, p_sen, sc.pd_target, pu, sc, sic);
        m.pd_avg = sc.pd_target;
    }
    m.pf00 = false_alarm_p00(m.epsilon_star, t_s, p_sen, sc, sic);
    m.pd01 = [eps = m.epsilon_star, t_s, p_sen, p_pu = pu.p_pu, sc, sic](double t) {
        return detection_p01(eps, t_s, t, p_sen, p_pu, sc, sic);
    };
    return m;
}

}  // namespace fdcmac::sensing
