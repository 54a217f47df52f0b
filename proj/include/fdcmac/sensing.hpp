#pragma once

#include <functional>

#include "fdcmac/types.hpp"

namespace fdcmac::sensing {

/// False-alarm probability of the energy detector while the PU stays idle,
/// with the detector noise floor raised by the SU's own sensing-stage
/// transmission.  Requires t_s > 0.
double false_alarm_p00(double eps, double t_s, double p_sen,
                       const SensingConfig& sc, const SicModel& sic);

/// Detection probability when the PU turns active at offset t into the
/// sensing stage (0 <= t <= t_s).  At t == t_s this reduces to
/// false_alarm_p00 (zero PU samples captured).
double detection_p01(double eps, double t_s, double t, double p_sen, double p_pu,
                     const SensingConfig& sc, const SicModel& sic);

/// Average detection probability over the PU arrival time conditioned on an
/// arrival within the sensing stage (exponential idle process).
double average_detection(double eps, double t_s, double p_sen, const PuModel& pu,
                         const SensingConfig& sc, const SicModel& sic);

/// Threshold eps* with average_detection(eps*, ...) == pd_target to 1e-9,
/// found by bisection on the monotone map eps -> average detection.
double calibrate_threshold(double t_s, double p_sen, double pd_target,
                           const PuModel& pu, const SensingConfig& sc,
                           const SicModel& sic);

/// Single-Q approximation of the calibrated false alarm and its analytic
/// derivatives in t_s.  The constants reproduce the exact value at the fit
/// point; the derivatives support the throughput structure diagnostics.
struct ApproxPf00 {
    double pf00 = 0.0;
    double d_pf00_dts = 0.0;
    double d2_pf00_dts2 = 0.0;
    double gamma_bar = 0.0;
    double gamma1_bar = 0.0;
    double alpha_bar = 0.0;
};

/// Fits (gamma_bar, gamma1_bar) so that Q((eps/(N0+I) - gamma_bar - 1)
/// sqrt(f_s t_s)/(gamma1_bar + 1)) tracks the exact average detection over a
/// log-spaced threshold grid around the calibrated point, anchored exactly
/// at eps*.  Throws calibration_error when the fit degenerates
/// (gamma_bar <= 0).
ApproxPf00 approx_pf00_and_derivatives(double t_s, double p_sen, double pd_target,
                                       const PuModel& pu, const SensingConfig& sc,
                                       const SicModel& sic);

/// Calibrated detector bundle consumed by the throughput and Monte-Carlo
/// modules: threshold, false alarm, PU SINR, achieved average detection and
/// the arrival-time detection curve.
struct SensingOutcomeModel {
    double epsilon_star = 0.0;
    double pf00 = 0.0;
    double gamma_ps = 0.0;
    double pd_avg = 0.0;
    double t_s = 0.0;
    std::function<double(double)> pd01;  ///< detection probability at arrival offset t

    double operator()(double t) const { return pd01(t); }
};

/// Builds the bundle.  When sc.epsilon is set that threshold is used as-is
/// (pd_avg reports the achieved average detection); otherwise the threshold
/// is calibrated to sc.pd_target.
SensingOutcomeModel make_outcome_model(double t_s, double p_sen, const PuModel& pu,
                                       const SensingConfig& sc, const SicModel& sic);

}  // namespace fdcmac::sensing
