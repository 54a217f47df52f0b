#pragma once

#include <tuple>

#include "fdcmac/types.hpp"

namespace fdcmac {

/// Contention-resolution statistics of one contention-and-access cycle.
struct ContentionStats {
    double p_succ = 0.0;      ///< generic slot is a successful RTS/CTS exchange
    double p_idle = 0.0;      ///< generic slot is idle
    double p_coll = 0.0;      ///< generic slot is a collision
    double t_succ = 0.0;      ///< seconds per successful exchange
    double t_coll = 0.0;      ///< seconds per collision
    double t_idle_bar = 0.0;  ///< expected consecutive idle slots (slots)
    double n_coll_bar = 0.0;  ///< expected collisions before success
    double t_cont_bar = 0.0;  ///< expected contention time, seconds
    double t_ove = 0.0;       ///< full reservation overhead, seconds
};

/// Per-slot outcome probabilities (success, idle, collision).
std::tuple<double, double, double> slot_probabilities(const ContentionParams& cp);

/// Durations of a successful RTS/CTS exchange and of a collision.
std::tuple<double, double> successful_and_collision_durations(const ContentionParams& cp);

/// Expected contention overhead of one cycle.  Idle runs are counted in
/// slots and converted to seconds through sigma.  Throws contention_error
/// when no slot can ever succeed (p_succ == 0).
ContentionStats contention_overhead(const ContentionParams& cp);

}  // namespace fdcmac
