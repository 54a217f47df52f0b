#include <doctest.h>

#include <cmath>

#include "fdcmac/contention.hpp"
#include "fdcmac/numeric.hpp"
#include "fdcmac/qmath.hpp"
#include "fdcmac/sensing.hpp"
#include "fdcmac/throughput.hpp"
#include "oracles.hpp"

using namespace fdcmac;
using namespace fdcmac::throughput;

namespace {

struct Scenario {
    AccessConfig access;
    ContentionParams cp;
    PuModel pu;
    SensingConfig sc;
    SicModel sic;
};

// Reference operating point of the high-QSIC two-way surface.
Scenario fig5_scenario() {
    Scenario s;
    s.cp.n0 = 40;
    s.cp.p = 0.0022;
    s.cp.sigma = 20e-6;
    s.cp.difs = 200e-6;
    s.cp.sifs = 40e-6;
    s.cp.rts = 400e-6;
    s.cp.cts = 400e-6;
    s.cp.ack = 400e-6;
    s.cp.pd = 1e-6;
    s.pu.tau_id_bar = 150e-3;
    s.pu.tau_ac_bar = 50e-3;
    s.pu.t_eva = 40e-3;
    s.pu.p_pu = db_to_linear(-20.0);
    s.sc.f_s = 6e6;
    s.sc.n0_noise = 1.0;
    s.sc.pd_target = 0.8;
    s.sic.zeta = 0.08;
    s.sic.xi = 0.95;
    s.access.t_frame = 15e-3;
    s.access.t_s = 2.44e-3;
    s.access.p_sen = db_to_linear(4.6552);
    s.access.p_dat = db_to_linear(15.0);
    s.access.p_max = db_to_linear(15.0);
    s.access.mode = TxMode::FdTx;
    return s;
}

double log2_1p(double x) { return std::log1p(x) / 0.6931471805599453; }

}  // namespace

TEST_CASE("rate context orders the stage SINRs") {
    oracle::SplitMix rng(17);
    for (int i = 0; i < 200; ++i) {
        Scenario s = fig5_scenario();
        s.access.mode = rng.uniform() < 0.5 ? TxMode::FdTx : TxMode::HdTx;
        s.access.p_sen = rng.uniform(1e-3, s.access.p_max);
        s.pu.p_pu = rng.uniform(1e-4, 0.5);
        s.sic.zeta = rng.uniform(0.0, 0.9);
        s.sic.xi = rng.uniform(0.0, 1.0);
        const RateContext ctx = make_rate_context(s.access, s.pu, s.sc, s.sic);
        CHECK(ctx.gamma_s1 >= ctx.gamma_s2);
        CHECK(ctx.gamma_s2 > 0.0);
        CHECK(ctx.gamma_d1 >= ctx.gamma_d2);
        CHECK(ctx.gamma_d2 > 0.0);
        if (s.access.mode == TxMode::HdTx) {
            CHECK(ctx.theta == 0.0);
            CHECK(ctx.phi == 1.0);
        } else {
            CHECK(ctx.theta == 1.0);
            CHECK(ctx.phi == 2.0);
        }
    }
}

TEST_CASE("case-1 bits reductions") {
    Scenario s = fig5_scenario();
    const RateContext ctx = make_rate_context(s.access, s.pu, s.sc, s.sic);
    const double ke = 0.5;
    const double dlt = 1.0 / s.pu.tau_ac_bar - 1.0 / s.pu.tau_id_bar;

    s.access.t_s = s.access.t_frame;  // sensing spans the whole frame
    const double expect = ke * std::exp(s.access.t_frame * dlt) * s.access.t_frame *
                          log2_1p(ctx.gamma_s1);
    CHECK(bits_case1(s.access, ctx, 0.3, ke, dlt) == doctest::Approx(expect).epsilon(1e-14));

    s.access.t_s = 2.44e-3;  // certain false alarm kills the transmission stage
    const double sensing_only =
        ke * std::exp(s.access.t_frame * dlt) * s.access.t_s * log2_1p(ctx.gamma_s1);
    CHECK(bits_case1(s.access, ctx, 1.0, ke, dlt) ==
          doctest::Approx(sensing_only).epsilon(1e-14));
    CHECK(bits_case1(s.access, ctx, 0.0, ke, dlt) > sensing_only);
}

TEST_CASE("case-2 bits reductions") {
    Scenario s = fig5_scenario();
    const double ke = 0.5490690526886192;
    const double dlt = 1.0 / s.pu.tau_ac_bar - 1.0 / s.pu.tau_id_bar;

    SUBCASE("vanishes when the transmission stage is empty") {
        s.access.t_s = s.access.t_frame;
        const RateContext ctx = make_rate_context(s.access, s.pu, s.sc, s.sic);
        CHECK(bits_case2(s.access, ctx, 0.4, ke, dlt, s.pu) == 0.0);
    }

    SUBCASE("zero PU power removes the rate-ratio terms") {
        s.pu.p_pu = 0.0;
        const RateContext ctx = make_rate_context(s.access, s.pu, s.sc, s.sic);
        CHECK(ctx.gamma_d1 == ctx.gamma_d2);
        const double pf = 0.4;
        const double L = s.access.t_frame - s.access.t_s;
        const double beta = ctx.phi * (1.0 - pf);
        const double b = log2_1p(ctx.gamma_d2);
        const double c_sense = s.access.t_s * log2_1p(ctx.gamma_s1);
        const double u = L * dlt;
        const double reduced = (ke / s.pu.tau_id_bar) * std::exp(s.access.t_s * dlt) * L *
                               (c_sense + beta * b * L) * numeric::expm1_over_x(u);
        CHECK(bits_case2(s.access, ctx, pf, ke, dlt, s.pu) ==
              doctest::Approx(reduced).epsilon(1e-13));
    }

    SUBCASE("stable at the tau_ac == tau_id singular point") {
        s.pu.tau_ac_bar = s.pu.tau_id_bar = 100e-3;
        const RateContext ctx = make_rate_context(s.access, s.pu, s.sc, s.sic);
        const double v0 = bits_case2(s.access, ctx, 0.4, ke, 0.0, s.pu);
        CHECK(std::isfinite(v0));
        // Continuity across the singularity: nearby delta-tau values agree.
        const double vm = bits_case2(s.access, ctx, 0.4, ke, -1e-10, s.pu);
        const double vp = bits_case2(s.access, ctx, 0.4, ke, 1e-10, s.pu);
        CHECK(v0 == doctest::Approx(vm).epsilon(1e-7));
        CHECK(v0 == doctest::Approx(vp).epsilon(1e-7));
    }
}

TEST_CASE("case-3 bits") {
    Scenario s = fig5_scenario();
    const double dlt = 1.0 / s.pu.tau_ac_bar - 1.0 / s.pu.tau_id_bar;
    const double ke = 0.5490690526886192;
    const RateContext ctx = make_rate_context(s.access, s.pu, s.sc, s.sic);

    SUBCASE("vanishes with the sensing stage") {
        AccessConfig cfg = s.access;
        cfg.t_s = 2e-6;  // a dozen detector samples, still calibratable
        const auto sm = sensing::make_outcome_model(cfg.t_s, cfg.p_sen, s.pu, s.sc, s.sic);
        CHECK(bits_case3(cfg, ctx, sm, ke, dlt, s.pu) < 1e-5);
    }

    SUBCASE("detection target unreachable below the sample floor") {
        // With ~0.006 samples no threshold reaches an average detection of 0.8.
        CHECK_THROWS_AS(
            sensing::calibrate_threshold(1e-9, s.access.p_sen, 0.8, s.pu, s.sc, s.sic),
            calibration_error);
    }

    SUBCASE("perfect detection cancels the transmission term as tau_ac grows") {
        PuModel pu = s.pu;
        pu.tau_ac_bar = 1e8;
        const double dlt2 = 1.0 / pu.tau_ac_bar - 1.0 / pu.tau_id_bar;
        SensingConfig sc = s.sc;
        sc.epsilon = 1e-12;  // detector fires on anything: pd01 == 1
        const auto sm = sensing::make_outcome_model(s.access.t_s, s.access.p_sen, pu, sc, s.sic);
        CHECK(sm.pd_avg == doctest::Approx(1.0).epsilon(1e-12));
        const double got = bits_case3(s.access, ctx, sm, ke, dlt2, pu);
        // All transmission-stage mass is detected away; only sensing bits stay.
        const double t_s = s.access.t_s;
        const double v = t_s * dlt2;
        const double expect = (ke / pu.tau_id_bar) *
                              (t_s * t_s * numeric::exp_quad_factor(v) *
                                   (log2_1p(ctx.gamma_s1) - log2_1p(ctx.gamma_s2)) +
                               t_s * numeric::expm1_over_x(v) * t_s * log2_1p(ctx.gamma_s2));
        CHECK(got == doctest::Approx(expect).epsilon(1e-6));
    }

    SUBCASE("detected-mass bound holds on the calibrated model") {
        const auto sm =
            sensing::make_outcome_model(s.access.t_s, s.access.p_sen, s.pu, s.sc, s.sic);
        CHECK_NOTHROW(bits_case3(s.access, ctx, sm, ke, dlt, s.pu));
    }
}

TEST_CASE("normalized throughput reproduces the frozen reference point") {
    // Reference values computed with an independent prototype of the same
    // closed forms (Gauss-Legendre quadrature, bisection calibration).
    const Scenario s = fig5_scenario();
    const ThroughputReport r =
        normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic);
    CHECK(r.t_ove == doctest::Approx(1.7773490847e-3).epsilon(1e-9));
    CHECK(r.k_e == doctest::Approx(0.5490690527).epsilon(1e-9));
    CHECK(r.epsilon_star == doctest::Approx(1.2176151003).epsilon(1e-8));
    CHECK(r.pf00 == doctest::Approx(0.6490726115).epsilon(1e-7));
    CHECK(r.b1 == doctest::Approx(0.0237602756).epsilon(1e-6));
    CHECK(r.b2 == doctest::Approx(0.0018309321).epsilon(1e-6));
    CHECK(r.b3 == doctest::Approx(0.0002026348).epsilon(1e-5));
    CHECK(r.nt == doctest::Approx(1.5374206298).epsilon(1e-6));
    CHECK(r.nt == doctest::Approx((r.b1 + r.b2 + r.b3) / (r.t_ove + s.access.t_frame))
                      .epsilon(1e-14));
    CHECK(r.pd_avg == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("degenerate protocol configurations stay finite") {
    SUBCASE("half-duplex MAC: silent sensing stage") {
        Scenario s = fig5_scenario();
        s.access.mode = TxMode::HdTx;
        s.access.p_sen = 0.0;
        const ThroughputReport r = normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic);
        CHECK(std::isfinite(r.nt));
        CHECK(r.nt > 0.0);
        CHECK(r.gamma_s1 == 0.0);
        CHECK(r.b1 > 0.0);
    }
    SUBCASE("single-stage protocol: sensing spans the frame") {
        Scenario s = fig5_scenario();
        s.access.t_s = s.access.t_frame;
        const ThroughputReport r = normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic);
        CHECK(r.b2 == 0.0);
        CHECK(std::isfinite(r.nt));
        CHECK(r.nt > 0.0);
    }
}

TEST_CASE("throughput properties across configurations") {
    SUBCASE("continuous in the sensing time") {
        const Scenario s = fig5_scenario();
        const int n = 60;
        std::vector<double> nts(n);
        for (int i = 0; i < n; ++i) {
            Scenario p = s;
            p.access.t_s = 0.3e-3 + (15e-3 - 0.3e-3) * i / (n - 1);
            nts[i] = normalized_throughput(p.access, p.cp, p.pu, p.sc, p.sic).nt;
        }
        double mean_step = 0.0;
        for (int i = 1; i < n; ++i) mean_step += std::abs(nts[i] - nts[i - 1]);
        mean_step /= n - 1;
        for (int i = 1; i < n; ++i) {
            CHECK(std::abs(nts[i] - nts[i - 1]) <= 10.0 * mean_step + 1e-9);
        }
    }

    SUBCASE("two-way mode dominates one-way with perfect cancellation") {
        oracle::SplitMix rng(23);
        for (int i = 0; i < 12; ++i) {
            Scenario s = fig5_scenario();
            s.sic.zeta = 0.0;
            s.access.t_s = rng.uniform(0.5e-3, 14e-3);
            s.access.p_sen = rng.uniform(0.0, s.access.p_max);
            Scenario hd = s;
            hd.access.mode = TxMode::HdTx;
            const double fd = normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic).nt;
            const double hdv = normalized_throughput(hd.access, hd.cp, hd.pu, hd.sc, hd.sic).nt;
            CHECK(fd >= hdv - 1e-12);
        }
    }

    SUBCASE("more white space, more throughput") {
        double prev = 0.0;
        for (double tau_id : {60e-3, 100e-3, 150e-3, 300e-3, 600e-3, 1200e-3}) {
            Scenario s = fig5_scenario();
            s.pu.tau_id_bar = tau_id;
            const double nt = normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic).nt;
            CHECK(nt > prev);
            prev = nt;
        }
    }

    SUBCASE("report probabilities stay in range on random configs") {
        oracle::SplitMix rng(91);
        for (int i = 0; i < 25; ++i) {
            Scenario s = fig5_scenario();
            s.pu.tau_id_bar = rng.uniform(50e-3, 1000e-3);
            s.pu.tau_ac_bar = rng.uniform(20e-3, 200e-3);
            s.pu.p_pu = rng.uniform(0.002, 0.1);
            s.sic.zeta = rng.uniform(0.0, 0.8);
            s.sic.xi = rng.uniform(0.5, 1.0);
            s.access.t_frame = rng.uniform(5e-3, 20e-3);
            s.pu.t_eva = s.access.t_frame + 10e-3;
            s.access.t_s = rng.uniform(0.3e-3, s.access.t_frame);
            s.access.p_sen = rng.uniform(0.0, s.access.p_max);
            s.sc.pd_target = rng.uniform(0.6, 0.9);
            s.access.mode = rng.uniform() < 0.5 ? TxMode::FdTx : TxMode::HdTx;
            const ThroughputReport r =
                normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic);
            CHECK(r.pf00 >= 0.0);
            CHECK(r.pf00 <= 1.0);
            CHECK(r.pd_avg >= 0.0);
            CHECK(r.pd_avg <= 1.0);
            CHECK(r.b1 >= 0.0);
            CHECK(r.b2 >= 0.0);
            CHECK(r.b3 >= 0.0);
            CHECK(std::isfinite(r.nt));
        }
    }
}

TEST_CASE("configuration validation") {
    Scenario s = fig5_scenario();
    s.access.t_s = 0.0;
    CHECK_THROWS_AS(normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic),
                    std::invalid_argument);
    s = fig5_scenario();
    s.pu.t_eva = 10e-3;  // frame no longer fits the evacuation window
    CHECK_THROWS_AS(normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic),
                    std::invalid_argument);
    s = fig5_scenario();
    s.access.p_sen = 2.0 * s.access.p_max;
    CHECK_THROWS_AS(normalized_throughput(s.access, s.cp, s.pu, s.sc, s.sic),
                    std::invalid_argument);
}
