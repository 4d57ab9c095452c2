#pragma once

// The uncertain incommensurate strict-feedback plant, its normalization into
// chain form, and the desk-scale example system shipped as a preset.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "focs/fraccalc.hpp"
#include "focs/nonsmooth.hpp"

namespace focs {

using StateFn = std::function<double(std::span<const double>)>;
using StateVecFn = std::function<std::vector<double>(std::span<const double>)>;
using TimeFn = std::function<double(double)>;

/// D^{a_i} x_i = d_i x_{i+1} + psi_i(x_1..x_i) + phi_i(x_1..x_i)^T theta
/// for i < n, and D^{a_n} x_n = b u(v) + psi_n(x) + phi_n(x)^T theta + d(t).
/// psi_i/phi_i may only read the first i states (lower-triangular structure).
struct StrictFeedbackPlant {
    std::size_t n = 0;  // state dimension
    std::size_t q = 0;  // unknown-parameter dimension
    std::vector<FractionalOrder> orders;  // n entries, each in (0,1]
    std::vector<double> gains;            // d_1..d_{n-1}, all nonzero
    std::vector<StateFn> psi;             // n entries
    std::vector<StateVecFn> phi;          // n entries, each returns length q
    std::vector<double> theta_true;       // q entries; simulator-side only
    double b = 1.0;                       // input coefficient, nonzero
    TimeFn disturbance;                   // d(t); simulator-side only
    double disturbance_bound = 0.0;       // D with |d| < D; test-side only

    void validate() const;
};

/// Chain form after scaling by deltas: delta_1 = 1, delta_j = prod d_i.
/// psi_bar/phi_bar absorb the scaling; b_bar = delta_n * b * m.
struct NormalizedPlant {
    std::size_t n = 0;
    std::size_t q = 0;
    std::vector<FractionalOrder> orders;
    std::vector<double> deltas;
    std::vector<StateFn> psi_bar;
    std::vector<StateVecFn> phi_bar;
    double b_prime = 0.0;               // delta_n * b
    double b_bar = 0.0;                 // b_prime * m
    double disturbance_bound_bar = 0.0; // bound on d' + b' d''; test-side only
};

NormalizedPlant normalize(const StrictFeedbackPlant& plant, const NonsmoothActuator& act);

/// Right-hand side of the plant under the composed actuator map; the last
/// component applies b * actuate(v) plus the disturbance.
std::vector<double> plant_rhs(const StrictFeedbackPlant& plant, const NonsmoothActuator& act,
                              double t, std::span<const double> x, double v);

/// The example system used by the desk-scale experiments.
struct ExampleSystem {
    StrictFeedbackPlant plant;
    NonsmoothActuator actuator;
    TimeFn reference;
    std::vector<double> x0;
};

/// Preset "example-4-1": a three-state plant with orders (0.5, 0.6, 0.7),
/// theta = 0.1, b = 3, disturbance cos(pi t) + sin(3 t), unit-slope actuator
/// with limits [-1.5, 1.8] and dead band [-0.5, 0.8], reference sin(2t).
ExampleSystem example_plant();

}  // namespace focs
