#include "fdcmac/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "fdcmac/contention.hpp"
#include "fdcmac/rng.hpp"
#include "fdcmac/sensing.hpp"
#include "fdcmac/throughput.hpp"

namespace fdcmac::montecarlo {

namespace {

struct Partial {
    double bits = 0.0, time = 0.0;
    double bits_sq = 0.0, time_sq = 0.0, bits_time = 0.0;
    std::uint64_t c_count[3] = {0, 0, 0};
    double c_bits[3] = {0.0, 0.0, 0.0};
    double c_bits_sq[3] = {0.0, 0.0, 0.0};
    std::uint64_t busy = 0, in_contention = 0, multi = 0, evac = 0;
    std::uint64_t collisions = 0, idle_slots = 0;
    double t_ove_sum = 0.0;

    void merge(const Partial& o) {
        bits += o.bits;
        time += o.time;
        bits_sq += o.bits_sq;
        time_sq += o.time_sq;
        bits_time += o.bits_time;
        for (int i = 0; i < 3; ++i) {
            c_count[i] += o.c_count[i];
            c_bits[i] += o.c_bits[i];
            c_bits_sq[i] += o.c_bits_sq[i];
        }
        busy += o.busy;
        in_contention += o.in_contention;
        multi += o.multi;
        evac += o.evac;
        collisions += o.collisions;
        idle_slots += o.idle_slots;
        t_ove_sum += o.t_ove_sum;
    }
};

struct ChunkOptions {
    bool track_multi = false;
    bool record_cases = true;
    bool renewal = false;
};

// Continuous PU process state: current phase and time until the next toggle.
struct PuChain {
    bool idle = true;
    double resid = 0.0;
};

double draw_exp(Pcg32& rng, double mean) { return -mean * std::log1p(-rng.next_double()); }

Partial run_chunk(const CycleModel& m, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t count, const ChunkOptions& opt) {
    Pcg32 rng(seed, stream);
    Partial acc;
    const double rem = m.t_frame - m.t_s;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    PuChain chain;
    if (opt.renewal) {
        chain.idle = rng.next_double() < m.p_h0;
        chain.resid = draw_exp(rng, chain.idle ? m.tau_id : m.tau_ac);
    }

    for (std::uint64_t c = 0; c < count; ++c) {
        // (a) slotted contention until the winning RTS/CTS exchange
        double t_cont = 0.0;
        for (;;) {
            const double u = rng.next_double();
            if (u < m.p_succ) {
                t_cont += m.t_succ;
                break;
            }
            if (u < m.p_succ + m.p_idle) {
                t_cont += m.sigma;
                ++acc.idle_slots;
            } else {
                t_cont += m.t_coll;
                ++acc.collisions;
            }
        }
        const double t_ove = t_cont + m.post_overhead;
        const double elapsed = t_ove + m.t_frame;
        acc.t_ove_sum += t_ove;
        acc.time += elapsed;
        acc.time_sq += elapsed * elapsed;

        // (b) PU state at cycle start and first arrival
        bool idle0;
        double t1 = kInf, t2 = kInf;
        if (opt.renewal) {
            idle0 = chain.idle;
            if (idle0) {
                t1 = chain.resid;
                if (t1 < elapsed) t2 = draw_exp(rng, m.tau_ac);
            }
        } else {
            idle0 = rng.next_double() < m.p_h0;
            if (idle0) {
                t1 = draw_exp(rng, m.tau_id);
                t2 = draw_exp(rng, m.tau_ac);
            }
        }

        double bits = 0.0;
        if (!idle0) {
            ++acc.busy;
        } else if (t1 < t_ove) {
            ++acc.in_contention;
        } else {
            const double sense_end = t_ove + m.t_s;
            const double frame_end = elapsed;
            const bool stays_active = t1 + t2 >= frame_end;
            const double coin = rng.next_double();
            int case_idx;
            double full_bits;
            bool counted = true;
            if (t1 >= frame_end) {
                case_idx = 0;  // PU idle for the whole data phase
                const bool false_alarm = coin < m.pf00;
                full_bits =
                    m.t_s * m.rate_s1 + (false_alarm ? 0.0 : m.phi * rem * m.rate_d1);
            } else if (t1 >= sense_end) {
                case_idx = 1;  // arrival inside the transmission stage
                const bool false_alarm = coin < m.pf00;
                const double tb = t1 - sense_end;
                full_bits =
                    m.t_s * m.rate_s1 +
                    (false_alarm ? 0.0 : m.phi * (tb * m.rate_d1 + (rem - tb) * m.rate_d2));
                if (!stays_active) {
                    if (opt.track_multi) ++acc.multi;
                    counted = false;  // outside the single-transition model
                }
            } else {
                case_idx = 2;  // arrival inside the sensing stage
                const double tb = t1 - t_ove;
                const bool detected = coin < m.pd01(tb);
                full_bits = tb * m.rate_s1 + (m.t_s - tb) * m.rate_s2 +
                            (detected ? 0.0 : m.phi * rem * m.rate_d2);
                if (!detected) ++acc.evac;
                if (!stays_active) {
                    if (opt.track_multi) ++acc.multi;
                    counted = false;
                }
            }
            bits = counted ? full_bits : 0.0;
            if (opt.record_cases) {
                ++acc.c_count[case_idx];
                acc.c_bits[case_idx] += bits;
                acc.c_bits_sq[case_idx] += bits * bits;
            }
        }
        acc.bits += bits;
        acc.bits_sq += bits * bits;
        acc.bits_time += bits * elapsed;

        // (c) carry the PU phase across the cycle boundary
        if (opt.renewal) {
            if (!idle0) {
                double t = chain.resid;
                bool idle = false;
                while (t < elapsed) {
                    idle = !idle;
                    t += draw_exp(rng, idle ? m.tau_id : m.tau_ac);
                }
                chain.idle = idle;
                chain.resid = t - elapsed;
            } else if (t1 >= elapsed) {
                chain.resid = t1 - elapsed;
            } else {
                double t = t1 + t2;
                bool idle = false;
                while (t < elapsed) {
                    idle = !idle;
                    t += draw_exp(rng, idle ? m.tau_id : m.tau_ac);
                }
                chain.idle = idle;
                chain.resid = t - elapsed;
            }
        }
    }
    return acc;
}

}  // namespace

CycleModel compile_model(const AccessConfig& cfg, const ContentionParams& cp,
                         const PuModel& pu, const SensingConfig& sc, const SicModel& sic) {
    cfg.validate_against(pu);
    const ContentionStats cs = contention_overhead(cp);
    const throughput::RateContext ctx = throughput::make_rate_context(cfg, pu, sc, sic);
    const sensing::SensingOutcomeModel sm =
        sensing::make_outcome_model(cfg.t_s, cfg.p_sen, pu, sc, sic);

    CycleModel m;
    m.p_succ = cs.p_succ;
    m.p_idle = cs.p_idle;
    m.p_coll = cs.p_coll;
    m.sigma = cp.sigma;
    m.t_succ = cs.t_succ;
    m.t_coll = cs.t_coll;
    m.post_overhead = 2.0 * cp.sifs + 2.0 * cp.pd + cp.ack;
    m.t_frame = cfg.t_frame;
    m.t_s = cfg.t_s;
    m.p_h0 = pu.p_h0();
    m.tau_id = pu.tau_id_bar;
    m.tau_ac = pu.tau_ac_bar;
    m.pf00 = sm.pf00;
    m.pd01 = sm.pd01;
    const auto lg = [](double g) { return std::log1p(g) / 0.6931471805599453; };
    m.rate_s1 = lg(ctx.gamma_s1);
    m.rate_s2 = lg(ctx.gamma_s2);
    m.rate_d1 = lg(ctx.gamma_d1);
    m.rate_d2 = lg(ctx.gamma_d2);
    m.phi = ctx.phi;
    return m;
}

SimReport simulate(const CycleModel& model, const SimConfig& sim) {
    sim.validate();
    const std::uint64_t n = sim.cycles;
    const std::uint64_t n_chunks = (n + sim.chunk - 1) / sim.chunk;
    std::vector<Partial> parts(n_chunks);

    ChunkOptions opt;
    opt.track_multi = sim.multi_transition_policy == MultiTransitionPolicy::CountAndFlag;
    opt.record_cases = sim.record_cases;
    opt.renewal = sim.pu_process == PuProcessMode::Renewal;

    unsigned workers = sim.workers > 0 ? static_cast<unsigned>(sim.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));
    std::atomic<std::uint64_t> next{0};
    const auto worker = [&]() {
        for (std::uint64_t k = next.fetch_add(1); k < n_chunks; k = next.fetch_add(1)) {
            const std::uint64_t begin = k * sim.chunk;
            const std::uint64_t count = std::min<std::uint64_t>(sim.chunk, n - begin);
            parts[k] = run_chunk(model, sim.seed, k, count, opt);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Partial total;
    for (const Partial& p : parts) total.merge(p);  // fixed order: bit-identical reports

    SimReport rep;
    rep.cycles = n;
    const double dn = static_cast<double>(n);
    rep.total_bits = total.bits;
    rep.total_time = total.time;
    rep.nt_estimate = total.bits / total.time;
    // Delta-method standard error of the ratio of sums.
    const double mb = total.bits / dn;
    const double mt = total.time / dn;
    const double var_b = total.bits_sq / dn - mb * mb;
    const double var_t = total.time_sq / dn - mt * mt;
    const double cov_bt = total.bits_time / dn - mb * mt;
    const double r = rep.nt_estimate;
    const double var_r = (var_b - 2.0 * r * cov_bt + r * r * var_t) / (mt * mt) / dn;
    rep.nt_std_error = var_r > 0.0 ? std::sqrt(var_r) : 0.0;
    rep.ci_warning = n < 1000 || !(var_r > 0.0);

    CaseStats* cases[3] = {&rep.case1, &rep.case2, &rep.case3};
    for (int i = 0; i < 3; ++i) {
        CaseStats& cs = *cases[i];
        cs.count = total.c_count[i];
        cs.bits_sum = total.c_bits[i];
        cs.bits_sq_sum = total.c_bits_sq[i];
        cs.frequency = static_cast<double>(cs.count) / dn;
        cs.mean_bits = cs.count ? cs.bits_sum / static_cast<double>(cs.count) : 0.0;
        cs.mean_bits_per_cycle = cs.bits_sum / dn;
    }
    rep.busy_at_start_fraction = static_cast<double>(total.busy) / dn;
    rep.arrival_in_contention_fraction = static_cast<double>(total.in_contention) / dn;
    rep.mean_collisions = static_cast<double>(total.collisions) / dn;
    rep.mean_idle_slots = static_cast<double>(total.idle_slots) / dn;
    rep.mean_t_ove = total.t_ove_sum / dn;
    rep.multi_transition_fraction = static_cast<double>(total.multi) / dn;
    rep.evacuation_violation_fraction = static_cast<double>(total.evac) / dn;
    return rep;
}

SimReport simulate(const AccessConfig& cfg, const ContentionParams& cp, const PuModel& pu,
                   const SensingConfig& sc, const SicModel& sic, const SimConfig& sim) {
    return simulate(compile_model(cfg, cp, pu, sc, sic), sim);
}

}  // namespace fdcmac::montecarlo
