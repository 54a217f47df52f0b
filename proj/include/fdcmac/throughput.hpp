#pragma once

#include "fdcmac/sensing.hpp"
#include "fdcmac/types.hpp"

namespace fdcmac::throughput {

/// Stage SNR/SINRs of the two data-phase stages.
struct RateContext {
    double gamma_s1 = 0.0;  ///< sensing stage, PU absent
    double gamma_s2 = 0.0;  ///< sensing stage, PU present
    double gamma_d1 = 0.0;  ///< transmission stage, PU absent
    double gamma_d2 = 0.0;  ///< transmission stage, PU present
    double theta = 0.0;
    double phi = 1.0;
};

RateContext make_rate_context(const AccessConfig& cfg, const PuModel& pu,
                              const SensingConfig& sc, const SicModel& sic);

/// Expected bits/Hz when the PU stays idle through the whole data phase.
double bits_case1(const AccessConfig& cfg, const RateContext& ctx, double pf00,
                  double k_e, double delta_tau_inv);

/// Expected bits/Hz when the PU turns active during the transmission stage
/// and stays active through the frame end.
double bits_case2(const AccessConfig& cfg, const RateContext& ctx, double pf00,
                  double k_e, double delta_tau_inv, const PuModel& pu);

/// Expected bits/Hz when the PU turns active during the sensing stage and
/// stays active through the frame end.  Uses the calibrated detection curve
/// for the miss-weighted transmission-stage term.
double bits_case3(const AccessConfig& cfg, const RateContext& ctx,
                  const sensing::SensingOutcomeModel& sm, double k_e,
                  double delta_tau_inv, const PuModel& pu);

/// Full closed-form evaluation: contention overhead, threshold calibration,
/// B1+B2+B3 and the normalized throughput, with all intermediates reported.
ThroughputReport normalized_throughput(const AccessConfig& cfg, const ContentionParams& cp,
                                       const PuModel& pu, const SensingConfig& sc,
                                       const SicModel& sic);

}  // namespace fdcmac::throughput
