#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

#include "focs/harness.hpp"

namespace focs {

namespace {

struct CheckLog {
    std::ostream& out;
    bool all_ok = true;

    void report(const std::string& name, double value, double tol, bool below = true) {
        const bool ok = below ? (value < tol) : (value >= tol);
        all_ok = all_ok && ok;
        out << (ok ? "[ ok ]" : "[FAIL]") << ' ' << name << "  value=" << std::setprecision(6)
            << std::scientific << value << "  tol=" << tol << std::defaultfloat << "\n";
    }
};

// |w_k| from log-Gamma: w_k = -alpha * exp(lgamma(k-alpha) - lgamma(k+1) - lgamma(1-alpha))
double gl_weight_reference(double alpha, std::size_t k) {
    if (k == 0) return 1.0;
    return -alpha * std::exp(std::lgamma(static_cast<double>(k) - alpha) -
                             std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(1.0 - alpha));
}

double check_gl_weights() {
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.7}) {
        const GLKernel kern = gl_weights(FractionalOrder(alpha), 10000);
        for (std::size_t k = 1; k <= 10000; ++k) {
            const double ref = gl_weight_reference(alpha, k);
            worst = std::max(worst, std::abs(kern.weights[k] - ref) / std::abs(ref));
        }
    }
    return worst;
}

double check_caputo_constant() {
    const GLKernel kern = gl_weights(FractionalOrder(0.5), 2000);
    const std::vector<double> hist(2001, 3.7);
    return std::abs(caputo_apply(kern, hist, 1e-3));
}

double check_caputo_closed_forms() {
    const double h = 1e-3;
    const std::size_t n = 1000;  // t = 1
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.7}) {
        const GLKernel kern = gl_weights(FractionalOrder(alpha), n);
        std::vector<double> f1(n + 1), f2(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) * h;
            f1[k] = t;
            f2[k] = t * t;
        }
        const double got1 = caputo_apply(kern, f1, h);
        const double exact1 = 1.0 / std::tgamma(2.0 - alpha);
        const double got2 = caputo_apply(kern, f2, h);
        const double exact2 = 2.0 / std::tgamma(3.0 - alpha);
        worst = std::max(worst, std::abs(got1 - exact1) / exact1);
        worst = std::max(worst, std::abs(got2 - exact2) / exact2);
    }
    return worst;
}

double check_mittag_leffler_exp() {
    double worst = 0.0;
    for (double z = -5.0; z <= 5.0 + 1e-9; z += 0.5)
        worst = std::max(worst, std::abs(mittag_leffler(1.0, z) - std::exp(z)) / std::exp(z));
    worst = std::max(worst, std::abs(mittag_leffler(0.37, 0.0) - 1.0));
    return worst;
}

double check_solver_oracle() {
    const TimeGrid grid(0.0, 1e-3, 5000);
    const FractionalOrder half(0.5);
    const double x0 = 1.0;
    const FosSolution sol = solve_fos(
        [](double, std::span<const double> x, std::span<double> out) { out[0] = -x[0]; },
        std::span<const FractionalOrder>(&half, 1), std::span<const double>(&x0, 1), grid);
    double worst = 0.0;
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        const double truth = mittag_leffler(0.5, -std::sqrt(grid.t(k)));
        if (std::abs(truth) <= 1e-2) continue;
        worst = std::max(worst, std::abs(sol.states[k][0] - truth) / std::abs(truth));
    }
    return worst;
}

double check_additivity_suite() {
    const TimeGrid grid(0.0, 1e-3, 2000);  // [0, 2]
    double worst = 0.0;
    const std::pair<double, double> pq[] = {{0.25, 0.25}, {0.3, 0.4}};
    for (const auto& [p, q] : pq) {
        worst = std::max(worst, check_additivity(FractionalOrder(p), FractionalOrder(q),
                                                 [](double t) { return t; }, grid));
        worst = std::max(worst, check_additivity(FractionalOrder(p), FractionalOrder(q),
                                                 [](double t) { return t * t; }, grid));
    }
    return worst;
}

double check_diffusive_vs_gl() {
    const double h = 1e-3;
    const std::size_t n = 10000;  // [0, 10]
    const double alpha = 0.7;
    DiffusiveApprox approx = DiffusiveApprox::default_nodes(FractionalOrder(alpha));
    const std::vector<double> w = gl_integral_weights(alpha, n);
    std::vector<double> u(n + 1);
    for (std::size_t k = 0; k <= n; ++k) u[k] = std::sin(static_cast<double>(k) * h);
    const double ha = std::pow(h, alpha);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double out = diffusive_step(approx, u[k], h);
        // GL quadrature of the integral at t_{k+1}
        double acc = 0.0;
        for (std::size_t j = 0; j <= k + 1; ++j) acc += w[j] * u[k + 1 - j];
        worst = std::max(worst, std::abs(out - acc * ha));
    }
    return worst;
}

double check_decomposition() {
    const NonsmoothActuator act = NonsmoothActuator::checked(1.0, 1.8, -1.5, 0.8, -0.5);
    double worst = 0.0;
    auto probe = [&](double v) {
        const double direct = actuate(v, act);
        const double composed = dead_zone(saturate(v, act), act);
        worst = std::max(worst, std::abs(direct - composed));
        const double w = saturate(v, act);
        worst = std::max(worst, std::abs(dead_zone(w, act) - (act.m * w + dead_zone_disturbance(w, act))));
        if (std::abs(dead_zone_disturbance(v, act)) > act.disturbance_bound())
            worst = std::max(worst, 1.0);
        if (direct > act.u_up || direct < act.u_low) worst = std::max(worst, 1.0);
    };
    const std::size_t count = 100000;
    for (std::size_t i = 0; i <= count; ++i)
        probe(-10.0 + 20.0 * static_cast<double>(i) / static_cast<double>(count));
    for (double v : {act.w_min, act.b_l, 0.0, act.b_r, act.w_max, -10.0, 10.0}) probe(v);
    return worst;
}

}  // namespace

bool verify(std::ostream& out) {
    CheckLog log{out};
    log.report("gl-weights vs log-gamma binomials (rel, k<=1e4)", check_gl_weights(), 1e-10);
    log.report("caputo of constant", check_caputo_constant(), 1e-12);
    log.report("caputo of t, t^2 vs closed forms (rel at t=1)", check_caputo_closed_forms(), 1e-2);
    log.report("mittag-leffler vs exp (rel, |z|<=5)", check_mittag_leffler_exp(), 1e-12);
    log.report("solver vs mittag-leffler oracle (rel, [0,5])", check_solver_oracle(), 1e-3);
    log.report("exponent additivity (abs, [0,2])", check_additivity_suite(), 5e-2);
    log.report("diffusive vs gl integral, sin, alpha=0.7 (abs, [0,10])", check_diffusive_vs_gl(), 5e-2);
    log.report("actuator decomposition identities (abs)", check_decomposition(), 1e-15);
    out << (log.all_ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return log.all_ok;
}

}  // namespace focs
