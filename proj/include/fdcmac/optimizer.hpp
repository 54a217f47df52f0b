#pragma once

#include <vector>

#include "fdcmac/types.hpp"

namespace fdcmac::optimizer {

/// Critical sensing power: the boundary derivative of throughput in t_s
/// changes sign here in FDTx mode: N0 [(1 + p_dat/(N0 + zeta p_dat^xi))^2 - 1].
double critical_sensing_power(double p_dat, const SensingConfig& sc, const SicModel& sic);

/// One grid point of the sensing-power sweep.
struct TracePoint {
    double p_sen = 0.0;
    double t_s_opt = 0.0;
    double nt = 0.0;
    bool flagged = false;  ///< non-unimodal profile detected, dense scan used
    bool failed = false;   ///< evaluation raised; point skipped
};

struct OptimizationResult {
    double t_s_star = 0.0;
    double p_sen_star = 0.0;
    double nt_star = 0.0;
    bool boundary_flag = false;  ///< t_s_star sits on the t_s = T boundary
    std::vector<TracePoint> trace;
};

/// Sweep controls for optimize_config.
struct SweepOptions {
    double p_sen_min_db = -10.0;  ///< dB floor of the grid (0 W added separately)
    double step_db = 0.25;
    bool refine = true;           ///< one 10x-finer local pass around the best point
    bool include_zero = true;     ///< evaluate p_sen = 0 as an extra candidate
    int workers = 0;              ///< 0 = hardware concurrency
};

struct TsOptimum {
    double t_s_opt = 0.0;
    double nt_opt = 0.0;
    bool flagged = false;
};

/// Maximizer of NT(t_s) on [t_s_min, T] for a fixed sensing power.  Uses a
/// coarse bracket plus golden-section search (the profile is unimodal by
/// the throughput structure); a tolerant sign-change test falls back to a
/// dense grid scan and flags the configuration.
TsOptimum optimize_ts(double p_sen, const AccessConfig& cfg, const ContentionParams& cp,
                      const PuModel& pu, const SensingConfig& sc, const SicModel& sic);

/// Full configuration search: sweeps p_sen over [0, p_max] on a dB grid with
/// one local refinement pass, optimizing t_s at every point.  Grid-point
/// failures are recorded in the trace, not fatal.
OptimizationResult optimize_config(const AccessConfig& cfg, const ContentionParams& cp,
                                   const PuModel& pu, const SensingConfig& sc,
                                   const SicModel& sic, const SweepOptions& opt = {});

/// Numerical check of the throughput-vs-sensing-time structure.
struct StructureDiagnostics {
    double p_sen_critical = 0.0;
    int left_derivative_sign = 0;   ///< sign of dNT/dt_s as t_s -> 0+
    int right_derivative_sign = 0;  ///< sign of dNT/dt_s as t_s -> T-
    int concavity_violations = 0;   ///< positive second differences on the probe grid
    int probe_points = 0;
};

/// Central finite differences of NT over an interior probe grid plus
/// one-sided boundary probes.
StructureDiagnostics verify_structure(const AccessConfig& cfg, const ContentionParams& cp,
                                    const PuModel& pu, const SensingConfig& sc,
                                    const SicModel& sic, double p_sen,
                                    int grid_points = 200);

/// Smallest admissible sensing duration: at least ten detector samples.
double min_sensing_time(const SensingConfig& sc);

}  // namespace fdcmac::optimizer
