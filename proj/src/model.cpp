#include <cmath>
#include <stdexcept>

#include "fdcmac/types.hpp"

namespace fdcmac {

double self_interference(double power, const SicModel& sic) {
    sic.validate();
    if (power < 0.0) {
        throw std::domain_error("self_interference: power >= 0 required");
    }
    if (power == 0.0) {
        return sic.xi == 0.0 ? sic.zeta : 0.0;
    }
    return sic.zeta * std::pow(power, sic.xi);
}

}  // namespace fdcmac
