#pragma once

#include "gmr/turn.hpp"

namespace gmr {

/// Parameters shared by the classical map and its quantization.
///
/// The kick duration cancels out of the time-epsilon kick map, so it is not a
/// parameter here.
struct ModelParams {
    double kick_strength = 1.0;  // K
    double hbar = 1.0;
    RotationNumber rotation = RotationNumber::golden();  // lambda = 2 pi rotation

    long double lambda() const { return rotation.radians(); }

    /// Throws std::invalid_argument when hbar <= 0, or when K == 0 and a
    /// nonzero kick is required (the classical map).
    void validate(bool require_nonzero_kick) const;
};

}  // namespace gmr
