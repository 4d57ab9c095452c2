#include "focs/nonsmooth.hpp"

#include <cmath>

namespace focs {

double saturate(double v, const NonsmoothActuator& act) {
    if (v >= act.w_max) return act.w_max;
    if (v < act.w_min) return act.w_min;
    return v;
}

// The linear branches distribute the slope over the difference so that
// dead_zone(w) == m*w + dead_zone_disturbance(w) holds bit for bit.
double dead_zone(double w, const NonsmoothActuator& act) {
    if (w >= act.b_r) return act.m * w - act.m * act.b_r;
    if (w < act.b_l) return act.m * w - act.m * act.b_l;
    return 0.0;
}

double dead_zone_disturbance(double w, const NonsmoothActuator& act) {
    if (w >= act.b_r) return -(act.m * act.b_r);
    if (w < act.b_l) return -(act.m * act.b_l);
    return -(act.m * w);
}

double actuate(double v, const NonsmoothActuator& act) {
    if (v >= act.w_max) return act.u_up;
    if (v >= act.b_r) return act.m * v - act.m * act.b_r;
    if (v > act.b_l) return 0.0;
    if (v > act.w_min) return act.m * v - act.m * act.b_l;
    return act.u_low;
}

}  // namespace focs
