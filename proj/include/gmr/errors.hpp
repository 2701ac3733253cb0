#pragma once

#include <stdexcept>

namespace gmr {

/// Incompatible settings (bandwidths, grid sizes, methods). The CLI maps it to exit code 2.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gmr
