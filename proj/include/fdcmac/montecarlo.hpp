#pragma once

#include <cstdint>
#include <functional>

#include "fdcmac/types.hpp"

namespace fdcmac::montecarlo {

enum class MultiTransitionPolicy {
    Ignore,        ///< mirror the closed-form accounting, no extra statistics
    CountAndFlag,  ///< same accounting, additionally measure the frequency
};

/// PerCycle restarts the PU idle clock at every cycle start, mirroring the
/// closed-form model.  Renewal runs the alternating idle/active process
/// continuously across cycles (sensitivity analysis only; cycle means agree
/// with PerCycle by memorylessness, correlations differ).
enum class PuProcessMode { PerCycle, Renewal };

struct SimConfig {
    std::uint64_t cycles = 100000;
    std::uint64_t seed = 1;
    bool record_cases = true;
    MultiTransitionPolicy multi_transition_policy = MultiTransitionPolicy::Ignore;
    PuProcessMode pu_process = PuProcessMode::PerCycle;
    int workers = 0;  ///< 0 = hardware concurrency
    std::uint64_t chunk = 65536;  ///< cycles per RNG stream

    void validate() const {
        if (cycles < 1) throw std::invalid_argument("SimConfig: cycles >= 1 required");
        if (chunk < 1) throw std::invalid_argument("SimConfig: chunk >= 1 required");
    }
};

/// Everything one cycle of the event-by-event simulation needs, decoupled
/// from the config structs so degenerate inputs can be exercised directly.
struct CycleModel {
    // contention slot process
    double p_succ = 1.0;
    double p_idle = 0.0;
    double p_coll = 0.0;
    double sigma = 0.0;
    double t_succ = 0.0;
    double t_coll = 0.0;
    double post_overhead = 0.0;  ///< 2 SIFS + 2 PD + ACK
    // data phase
    double t_frame = 0.0;
    double t_s = 0.0;
    // PU process
    double p_h0 = 1.0;
    double tau_id = 1.0;
    double tau_ac = 1.0;
    // sensing outcomes
    double pf00 = 0.0;
    std::function<double(double)> pd01;  ///< detection prob. at arrival offset into t_s
    // stage rates, bits/s/Hz
    double rate_s1 = 0.0;  ///< sensing stage, PU absent
    double rate_s2 = 0.0;  ///< sensing stage, PU present
    double rate_d1 = 0.0;  ///< transmission stage, PU absent
    double rate_d2 = 0.0;  ///< transmission stage, PU present
    double phi = 1.0;
};

struct CaseStats {
    std::uint64_t count = 0;
    double bits_sum = 0.0;       ///< over all cycles (zero elsewhere)
    double bits_sq_sum = 0.0;
    double frequency = 0.0;
    double mean_bits = 0.0;      ///< conditional on the case
    double mean_bits_per_cycle = 0.0;  ///< unconditional, comparable to B_i
};

struct SimReport {
    std::uint64_t cycles = 0;
    double nt_estimate = 0.0;
    double nt_std_error = 0.0;
    double total_bits = 0.0;
    double total_time = 0.0;
    CaseStats case1, case2, case3;
    double busy_at_start_fraction = 0.0;
    double arrival_in_contention_fraction = 0.0;
    double mean_collisions = 0.0;
    double mean_idle_slots = 0.0;
    double mean_t_ove = 0.0;
    double multi_transition_fraction = 0.0;
    double evacuation_violation_fraction = 0.0;  ///< undetected case-3 arrivals
    bool ci_warning = false;  ///< too few cycles for a stable standard error
};

/// Builds the cycle model from the validated configuration set, calibrating
/// the detector through the sensing module.
CycleModel compile_model(const AccessConfig& cfg, const ContentionParams& cp,
                         const PuModel& pu, const SensingConfig& sc, const SicModel& sic);

/// Runs the cycle simulation.  Cycles are split into fixed-size chunks with
/// one RNG stream each and reduced in chunk order, so a given seed yields a
/// bit-identical report at any worker count.
SimReport simulate(const CycleModel& model, const SimConfig& sim);

/// Convenience wrapper: compile_model + simulate.
SimReport simulate(const AccessConfig& cfg, const ContentionParams& cp, const PuModel& pu,
                   const SensingConfig& sc, const SicModel& sic, const SimConfig& sim);

}  // namespace fdcmac::montecarlo
