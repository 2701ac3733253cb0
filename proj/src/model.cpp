#include "gmr/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gmr {

void ModelParams::validate(bool require_nonzero_kick) const {
    if (!std::isfinite(kick_strength)) throw std::invalid_argument("kick strength K must be finite");
    if (require_nonzero_kick && kick_strength == 0.0)
        throw std::invalid_argument("kick strength K must be nonzero");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("hbar must be positive");
}

}  // namespace gmr
