#include "fdcmac/throughput.hpp"

#include <cmath>

#include "fdcmac/contention.hpp"
#include "fdcmac/numeric.hpp"

namespace fdcmac::throughput {

namespace {

double log2_1p(double x) { return std::log1p(x) / 0.6931471805599453; }

}  // namespace

RateContext make_rate_context(const AccessConfig& cfg, const PuModel& pu,
                              const SensingConfig& sc, const SicModel& sic) {
    RateContext ctx;
    ctx.theta = mode_theta(cfg.mode);
    ctx.phi = mode_phi(cfg.mode);
    const double i_dat = self_interference(cfg.p_dat, sic);
    ctx.gamma_s1 = cfg.p_sen / sc.n0_noise;
    ctx.gamma_s2 = cfg.p_sen / (sc.n0_noise + pu.p_pu);
    ctx.gamma_d1 = cfg.p_dat / (sc.n0_noise + ctx.theta * i_dat);
    ctx.gamma_d2 = cfg.p_dat / (sc.n0_noise + pu.p_pu + ctx.theta * i_dat);
    return ctx;
}

double bits_case1(const AccessConfig& cfg, const RateContext& ctx, double pf00,
                  double k_e, double delta_tau_inv) {
    const double t_s = cfg.t_s;
    const double rem = cfg.t_frame - t_s;
    const double sense_bits = t_s * log2_1p(ctx.gamma_s1);
    const double data_bits = ctx.phi * (1.0 - pf00) * rem * log2_1p(ctx.gamma_d1);
    return k_e * std::exp(cfg.t_frame * delta_tau_inv) * (sense_bits + data_bits);
}

double bits_case2(const AccessConfig& cfg, const RateContext& ctx, double pf00,
                  double k_e, double delta_tau_inv, const PuModel& pu) {
    const double t_s = cfg.t_s;
    const double rem = cfg.t_frame - t_s;
    if (rem == 0.0) return 0.0;
    const double a = log2_1p(ctx.gamma_d1);
    const double b = log2_1p(ctx.gamma_d2);
    const double beta = ctx.phi * (1.0 - pf00);
    const double c_sense = t_s * log2_1p(ctx.gamma_s1);
    // Exact closed form rearranged around (e^u-1)/u factors so the
    // tau_ac == tau_id removable singularity never materializes.
    const double u = rem * delta_tau_inv;
    const double val = (k_e / pu.tau_id_bar) * std::exp(t_s * delta_tau_inv) * rem *
                       ((c_sense + beta * b * rem) * numeric::expm1_over_x(u) +
                        beta * (a - b) * rem * numeric::exp_quad_factor(u));
    if (val < 0.0) {
        // Round-off from the bracketed differences may leave a negligible
        // negative; anything larger is a real defect.
        const double b1 = bits_case1(cfg, ctx, pf00, k_e, delta_tau_inv);
        if (-val < 1e-12 * std::max(b1, 1e-30)) return 0.0;
        throw numerical_error("bits_case2: negative expected bits beyond round-off");
    }
    return val;
}

double bits_case3(const AccessConfig& cfg, const RateContext& ctx,
                  const sensing::SensingOutcomeModel& sm, double k_e,
                  double delta_tau_inv, const PuModel& pu) {
    const double t_s = cfg.t_s;
    if (t_s == 0.0) return 0.0;
    const double rem = cfg.t_frame - t_s;
    const double s1 = log2_1p(ctx.gamma_s1);
    const double s2 = log2_1p(ctx.gamma_s2);
    const double t_d11 = ctx.phi * rem * log2_1p(ctx.gamma_d2);
    const double v = t_s * delta_tau_inv;
    const double b31 = (k_e / pu.tau_id_bar) *
                       (t_s * t_s * numeric::exp_quad_factor(v) * (s1 - s2) +
                        t_s * numeric::expm1_over_x(v) * (t_d11 + t_s * s2));

    double b32 = 0.0;
    if (t_d11 > 0.0) {
        const double inv_id = 1.0 / pu.tau_id_bar;
        const double inv_ac = 1.0 / pu.tau_ac_bar;
        const auto integrand = [&](double t) {
            return sm.pd01(t) * inv_id * std::exp(t * (inv_ac - inv_id));
        };
        const double t32 = numeric::integrate(integrand, 0.0, t_s, 1e-11);
        // Detected-arrival mass bound: Pd_avg (1-e^{-t_s/tau_id}) <= T32 <=
        // the same scaled by e^{t_s/tau_ac}.
        const double base = sm.pd_avg * (-std::expm1(-t_s * inv_id));
        const double slack = 1e-7 * std::max(base, 1e-12);
        if (t32 < base - slack || t32 > base * std::exp(t_s * inv_ac) + slack) {
            throw numerical_error("bits_case3: T32 outside its analytic bounds");
        }
        b32 = -k_e * t_d11 * t32;
    }
    return b31 + b32;
}

ThroughputReport normalized_throughput(const AccessConfig& cfg, const ContentionParams& cp,
                                       const PuModel& pu, const SensingConfig& sc,
                                       const SicModel& sic) {
    cfg.validate_against(pu);
    sc.validate();
    sic.validate();
    if (!(cfg.t_s > 0.0)) {
        throw std::invalid_argument("normalized_throughput: t_s > 0 required");
    }

    ThroughputReport rep;
    const ContentionStats cs = contention_overhead(cp);
    rep.t_ove = cs.t_ove;
    rep.t_cont_bar = cs.t_cont_bar;
    rep.delta_tau_inv = 1.0 / pu.tau_ac_bar - 1.0 / pu.tau_id_bar;
    rep.k_e = pu.p_h0() *
              std::exp(-(rep.t_ove / pu.tau_id_bar + cfg.t_frame / pu.tau_ac_bar));

    const sensing::SensingOutcomeModel sm =
        sensing::make_outcome_model(cfg.t_s, cfg.p_sen, pu, sc, sic);
    rep.epsilon_star = sm.epsilon_star;
    rep.pd_avg = sm.pd_avg;
    rep.pf00 = sm.pf00;
    rep.gamma_ps = sm.gamma_ps;

    const RateContext ctx = make_rate_context(cfg, pu, sc, sic);
    rep.gamma_s1 = ctx.gamma_s1;
    rep.gamma_s2 = ctx.gamma_s2;
    rep.gamma_d1 = ctx.gamma_d1;
    rep.gamma_d2 = ctx.gamma_d2;

    rep.b1 = bits_case1(cfg, ctx, rep.pf00, rep.k_e, rep.delta_tau_inv);
    rep.b2 = bits_case2(cfg, ctx, rep.pf00, rep.k_e, rep.delta_tau_inv, pu);
    rep.b3 = bits_case3(cfg, ctx, sm, rep.k_e, rep.delta_tau_inv, pu);
    rep.nt = (rep.b1 + rep.b2 + rep.b3) / (rep.t_ove + cfg.t_frame);
    return rep;
}

}  // namespace fdcmac::throughput
