#include "focs/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace focs {

void StrictFeedbackPlant::validate() const {
    if (n == 0) throw std::invalid_argument("StrictFeedbackPlant: empty system");
    if (orders.size() != n) throw std::invalid_argument("StrictFeedbackPlant: orders size != n");
    if (gains.size() != n - 1)
        throw std::invalid_argument("StrictFeedbackPlant: need n-1 chain gains");
    for (double d : gains)
        if (d == 0.0) throw std::invalid_argument("StrictFeedbackPlant: chain gain d_i must be nonzero");
    if (psi.size() != n || phi.size() != n)
        throw std::invalid_argument("StrictFeedbackPlant: psi/phi size != n");
    if (theta_true.size() != q)
        throw std::invalid_argument("StrictFeedbackPlant: theta size != q");
    if (b == 0.0) throw std::invalid_argument("StrictFeedbackPlant: input coefficient b must be nonzero");
}

NormalizedPlant normalize(const StrictFeedbackPlant& plant, const NonsmoothActuator& act) {
    plant.validate();
    NormalizedPlant out;
    out.n = plant.n;
    out.q = plant.q;
    out.orders = plant.orders;
    out.deltas.resize(plant.n);
    out.deltas[0] = 1.0;
    for (std::size_t j = 1; j < plant.n; ++j)
        out.deltas[j] = out.deltas[j - 1] * plant.gains[j - 1];
    out.psi_bar.reserve(plant.n);
    out.phi_bar.reserve(plant.n);
    for (std::size_t i = 0; i < plant.n; ++i) {
        const double delta = out.deltas[i];
        StateFn psi_i = plant.psi[i];
        out.psi_bar.push_back([delta, psi_i](std::span<const double> x) { return delta * psi_i(x); });
        StateVecFn phi_i = plant.phi[i];
        out.phi_bar.push_back([delta, phi_i](std::span<const double> x) {
            std::vector<double> vals = phi_i(x);
            for (double& v : vals) v *= delta;
            return vals;
        });
    }
    out.b_prime = out.deltas[plant.n - 1] * plant.b;
    out.b_bar = out.b_prime * act.m;
    out.disturbance_bound_bar = std::abs(out.deltas[plant.n - 1]) * plant.disturbance_bound +
                                std::abs(out.b_prime) * act.disturbance_bound();
    return out;
}

std::vector<double> plant_rhs(const StrictFeedbackPlant& plant, const NonsmoothActuator& act,
                              double t, std::span<const double> x, double v) {
    const std::size_t n = plant.n;
    std::vector<double> dx(n);
    for (std::size_t i = 0; i < n; ++i) {
        double val = plant.psi[i](x);
        const std::vector<double> ph = plant.phi[i](x);
        if (ph.size() != plant.q)
            throw std::runtime_error("plant_rhs: phi_" + std::to_string(i + 1) +
                                     " returned the wrong dimension");
        for (std::size_t j = 0; j < plant.q; ++j) val += ph[j] * plant.theta_true[j];
        if (i + 1 < n)
            val += plant.gains[i] * x[i + 1];
        else
            val += plant.b * actuate(v, act) + plant.disturbance(t);
        if (!std::isfinite(val))
            throw std::runtime_error("plant_rhs: non-finite value in component " + std::to_string(i + 1));
        dx[i] = val;
    }
    return dx;
}

ExampleSystem example_plant() {
    StrictFeedbackPlant p;
    p.n = 3;
    p.q = 1;
    p.orders = {FractionalOrder(0.5), FractionalOrder(0.6), FractionalOrder(0.7)};
    p.gains = {2.0, -1.0};
    p.psi = {
        [](std::span<const double> x) { return -0.5 * x[0] * x[0]; },
        [](std::span<const double> x) {
            return (x[1] - x[1] * x[1] * x[1]) / (1.0 + x[0] * x[0] * x[0] * x[0]);
        },
        [](std::span<const double> x) { return -std::exp(-x[0] * x[0]) * std::sin(5.0 * x[2]); },
    };
    p.phi = {
        [](std::span<const double> x) { return std::vector<double>{x[0]}; },
        [](std::span<const double> x) { return std::vector<double>{-std::sin(x[0])}; },
        [](std::span<const double> x) { return std::vector<double>{std::cos(x[0])}; },
    };
    p.theta_true = {0.1};
    p.b = 3.0;
    p.disturbance = [](double t) { return std::cos(M_PI * t) + std::sin(3.0 * t); };
    p.disturbance_bound = 2.0;

    ExampleSystem sys;
    sys.plant = std::move(p);
    sys.actuator = NonsmoothActuator::checked(1.0, 1.8, -1.5, 0.8, -0.5);
    sys.reference = [](double t) { return std::sin(2.0 * t); };
    sys.x0 = {0.3, -0.4, 0.2};
    return sys;
}

}  // namespace focs
