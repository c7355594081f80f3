#pragma once

#include <stdexcept>

namespace seg {

// Thrown by maxwell_construction above the critical temperature.
struct NoCoexistence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by balance_wells when the input has fewer than two local minima.
struct NoDoubleWell : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by compute_c0 when the well function is single-welled (kT too large).
struct NoInterface : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace seg
