#pragma once

#include <string_view>

namespace gmr {

enum class RegionLabel { Quantum, SemiClassical, Classical };

constexpr std::string_view to_string(RegionLabel label) {
    switch (label) {
        case RegionLabel::Quantum: return "quantum";
        case RegionLabel::SemiClassical: return "semiclassical";
        case RegionLabel::Classical: return "classical";
    }
    return "unknown";
}

}  // namespace gmr
