#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace fdcmac {

/// Raised when a threshold satisfying the detection target cannot be bracketed.
struct calibration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when quadrature or another numerical routine fails its tolerance.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when the contention parameters admit no successful reservation.
struct contention_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transmission-stage operating mode of the SU pair.
enum class TxMode { HdTx, FdTx };

/// Self-interference multiplier: 0 for one-way, 1 for two-way transmission.
inline double mode_theta(TxMode m) { return m == TxMode::FdTx ? 1.0 : 0.0; }
/// Rate multiplier: 1 for one-way, 2 for two-way transmission.
inline double mode_phi(TxMode m) { return m == TxMode::FdTx ? 2.0 : 1.0; }

inline const char* mode_name(TxMode m) { return m == TxMode::FdTx ? "fdtx" : "hdtx"; }

/// Slot/frame timing constants and contention inputs.  All durations in
/// seconds, powers linear.
struct ContentionParams {
    int n0 = 1;          ///< number of contending SU pairs
    double p = 1.0;      ///< per-slot transmission probability
    double sigma = 0.0;  ///< mini-slot duration
    double difs = 0.0;
    double sifs = 0.0;
    double rts = 0.0;
    double cts = 0.0;
    double ack = 0.0;
    double pd = 0.0;     ///< propagation delay (pd <= sigma unless sigma == 0)

    void validate() const {
        if (n0 < 1) throw std::invalid_argument("ContentionParams: n0 >= 1 required");
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("ContentionParams: 0 < p <= 1 required");
        for (double d : {sigma, difs, sifs, rts, cts, ack, pd}) {
            if (d < 0.0) throw std::invalid_argument("ContentionParams: durations must be >= 0");
        }
        if (sigma > 0.0 && pd > sigma) {
            throw std::invalid_argument("ContentionParams: pd must not exceed the slot size sigma");
        }
    }
};

/// Primary-user idle/active process (exponential durations) and received power.
struct PuModel {
    double tau_id_bar = 1.0;  ///< mean idle duration, seconds
    double tau_ac_bar = 1.0;  ///< mean active duration, seconds
    double t_eva = 1.0;       ///< channel evacuation time, seconds
    double p_pu = 0.0;        ///< received PU signal power, linear

    double p_h0() const { return tau_id_bar / (tau_id_bar + tau_ac_bar); }
    double p_h1() const { return 1.0 - p_h0(); }

    void validate() const {
        if (!(tau_id_bar > 0.0)) throw std::invalid_argument("PuModel: tau_id_bar > 0 required");
        if (!(tau_ac_bar > 0.0)) throw std::invalid_argument("PuModel: tau_ac_bar > 0 required");
        if (!(t_eva > 0.0)) throw std::invalid_argument("PuModel: t_eva > 0 required");
        if (p_pu < 0.0) throw std::invalid_argument("PuModel: p_pu >= 0 required");
    }
};

/// Self-interference model I(P) = zeta * P^xi.
struct SicModel {
    double zeta = 0.0;
    double xi = 1.0;

    void validate() const {
        if (zeta < 0.0) throw std::invalid_argument("SicModel: zeta >= 0 required");
        if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("SicModel: 0 <= xi <= 1 required");
    }
};

/// Residual self-interference power at transmit power `power`.
/// power == 0 with xi == 0 follows the pow(0,0) == 1 convention, giving zeta.
double self_interference(double power, const SicModel& sic);

/// SU data-phase configuration.
struct AccessConfig {
    double t_frame = 0.0;  ///< data-phase duration T, seconds
    double t_s = 0.0;      ///< FD sensing duration, seconds
    double p_sen = 0.0;    ///< sensing-stage transmit power, linear
    double p_dat = 0.0;    ///< transmission-stage power, linear (= p_max)
    double p_max = 0.0;    ///< power cap, linear
    TxMode mode = TxMode::FdTx;

    void validate() const {
        if (!(t_frame > 0.0)) throw std::invalid_argument("AccessConfig: t_frame > 0 required");
        if (!(t_s >= 0.0 && t_s <= t_frame)) {
            throw std::invalid_argument("AccessConfig: 0 <= t_s <= t_frame required");
        }
        if (p_sen < 0.0 || p_sen > p_max) {
            throw std::invalid_argument("AccessConfig: 0 <= p_sen <= p_max required");
        }
        if (!(p_dat > 0.0)) throw std::invalid_argument("AccessConfig: p_dat > 0 required");
        // The transmission stage always runs at the power cap.
        if (std::abs(p_dat - p_max) > 1e-12 * p_max) {
            throw std::invalid_argument("AccessConfig: p_dat must equal p_max");
        }
    }

    /// Frame must fit inside the PU evacuation window.
    void validate_against(const PuModel& pu) const {
        validate();
        if (!(t_frame < pu.t_eva)) {
            throw std::invalid_argument("AccessConfig: t_frame < t_eva required");
        }
    }
};

/// Energy-detector parameters.  `epsilon` pins an explicit threshold; when
/// absent the threshold is calibrated so the average detection probability
/// meets pd_target with equality.
struct SensingConfig {
    double f_s = 6e6;            ///< sampling frequency, Hz
    double n0_noise = 1.0;       ///< noise power N0, linear
    std::optional<double> epsilon;  ///< fixed detection threshold, linear
    double pd_target = 0.8;      ///< required average detection probability

    void validate() const {
        if (!(f_s > 0.0)) throw std::invalid_argument("SensingConfig: f_s > 0 required");
        if (!(n0_noise > 0.0)) throw std::invalid_argument("SensingConfig: n0_noise > 0 required");
        if (epsilon && !(*epsilon > 0.0)) {
            throw std::invalid_argument("SensingConfig: epsilon > 0 required");
        }
        if (!(pd_target > 0.0 && pd_target < 1.0)) {
            throw std::invalid_argument("SensingConfig: 0 < pd_target < 1 required");
        }
    }
};

/// Full throughput evaluation with every intermediate needed for auditing.
struct ThroughputReport {
    double t_ove = 0.0;       ///< reservation overhead, seconds
    double t_cont_bar = 0.0;  ///< mean contention time, seconds
    double b1 = 0.0;          ///< expected bits/Hz, PU idle all phase
    double b2 = 0.0;          ///< expected bits/Hz, PU arrives in transmission stage
    double b3 = 0.0;          ///< expected bits/Hz, PU arrives in sensing stage
    double nt = 0.0;          ///< normalized throughput, bits/s/Hz
    double gamma_s1 = 0.0;
    double gamma_s2 = 0.0;
    double gamma_d1 = 0.0;
    double gamma_d2 = 0.0;
    double gamma_ps = 0.0;    ///< PU SINR at the detector
    double pf00 = 0.0;        ///< false-alarm probability at the calibrated threshold
    double k_e = 0.0;
    double delta_tau_inv = 0.0;  ///< 1/tau_ac - 1/tau_id, 1/seconds
    double epsilon_star = 0.0;   ///< threshold used (calibrated unless pinned)
    double pd_avg = 0.0;         ///< achieved average detection probability
};

}  // namespace fdcmac
