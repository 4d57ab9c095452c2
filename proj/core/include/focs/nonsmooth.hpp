#pragma once

// Actuator nonsmooth nonlinearities: the composed dead-zone-plus-saturation
// input map, its split into a pure saturation stage followed by a dead-zone
// stage, and the rewrite of the dead zone as linear gain plus a bounded term.

#include <stdexcept>

namespace focs {

/// Dead-zone slope/breaks and output limits. The saturation stage clamps the
/// intermediate input to [w_min, w_max]; composing both stages clamps the
/// output to [u_low, u_up].
struct NonsmoothActuator {
    double m = 1.0;      // dead-zone slope, > 0
    double u_up = 1.0;   // upper output limit, > 0
    double u_low = -1.0; // lower output limit, < 0
    double b_r = 0.0;    // right dead-zone break, > 0
    double b_l = 0.0;    // left dead-zone break, < 0
    double w_max = 0.0;  // derived: u_up/m + b_r
    double w_min = 0.0;  // derived: u_low/m + b_l

    static NonsmoothActuator checked(double m, double u_up, double u_low, double b_r, double b_l) {
        if (!(m > 0.0)) throw std::invalid_argument("NonsmoothActuator: slope m must be positive");
        if (!(u_low < 0.0 && 0.0 < u_up))
            throw std::invalid_argument("NonsmoothActuator: need u_low < 0 < u_up");
        if (!(b_l < 0.0 && 0.0 < b_r))
            throw std::invalid_argument("NonsmoothActuator: need b_l < 0 < b_r");
        NonsmoothActuator a{m, u_up, u_low, b_r, b_l, u_up / m + b_r, u_low / m + b_l};
        return a;
    }

    /// Bound of |dead_zone_disturbance| over all inputs: m * max(|b_r|, |b_l|).
    double disturbance_bound() const { return m * (b_r > -b_l ? b_r : -b_l); }
};

/// Saturation stage: w = clamp(v, w_min, w_max).
double saturate(double v, const NonsmoothActuator& act);

/// Dead-zone stage: m(w - b_r) above the band, 0 inside, m(w - b_l) below.
double dead_zone(double w, const NonsmoothActuator& act);

/// Bounded residual d'' with dead_zone(w) = m*w + d''(w) exactly.
double dead_zone_disturbance(double w, const NonsmoothActuator& act);

/// Full composed map from desired to actual input, branch for branch.
double actuate(double v, const NonsmoothActuator& act);

}  // namespace focs
