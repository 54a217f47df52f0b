#include "fdcmac/contention.hpp"

#include <cmath>

namespace fdcmac {

std::tuple<double, double, double> slot_probabilities(const ContentionParams& cp) {
    cp.validate();
    // Log-domain evaluation keeps (1-p)^n0 sane for large n0*p.
    const double log_1mp = std::log1p(-cp.p);
    const double p_idle = std::exp(cp.n0 * log_1mp);
    double p_succ;
    if (cp.p == 1.0) {
        p_succ = cp.n0 == 1 ? 1.0 : 0.0;
    } else {
        p_succ = std::exp(std::log(static_cast<double>(cp.n0)) + std::log(cp.p) +
                          (cp.n0 - 1) * log_1mp);
    }
    double p_coll = 1.0 - p_succ - p_idle;
    if (p_coll < 0.0 && p_coll > -1e-15) p_coll = 0.0;
    return {p_succ, p_idle, p_coll};
}

std::tuple<double, double> successful_and_collision_durations(const ContentionParams& cp) {
    cp.validate();
    const double t_succ = cp.difs + cp.rts + cp.sifs + cp.cts + 2.0 * cp.pd;
    const double t_coll = cp.difs + cp.rts + cp.pd;
    return {t_succ, t_coll};
}

ContentionStats contention_overhead(const ContentionParams& cp) {
    ContentionStats st;
    std::tie(st.p_succ, st.p_idle, st.p_coll) = slot_probabilities(cp);
    std::tie(st.t_succ, st.t_coll) = successful_and_collision_durations(cp);
    if (!(st.p_succ > 0.0)) {
        throw contention_error("contention_overhead: p_succ == 0, reservation never succeeds");
    }
    st.t_idle_bar = st.p_idle / (1.0 - st.p_idle);
    st.n_coll_bar = (1.0 - st.p_idle) / st.p_succ - 1.0;
    if (st.n_coll_bar < 0.0 && st.n_coll_bar > -1e-15) st.n_coll_bar = 0.0;
    st.t_cont_bar = st.n_coll_bar * st.t_coll +
                    st.t_idle_bar * cp.sigma * (st.n_coll_bar + 1.0) + st.t_succ;
    st.t_ove = st.t_cont_bar + 2.0 * cp.sifs + 2.0 * cp.pd + cp.ack;
    return st;
}

}  // namespace fdcmac
