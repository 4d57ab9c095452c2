#pragma once

// Numerical fractional calculus on uniform grids: Grünwald-Letnikov weights,
// a discrete Caputo operator (initial-value-subtracted GL), an incommensurate
// fractional ODE stepper, the Mittag-Leffler series used as a solver oracle,
// and a finite-mode diffusive (frequency-distributed) integrator kept around
// for cross-validation of the GL machinery.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace focs {

/// Thrown by the fractional ODE stepper when a state stops being finite.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Differentiation order. Valid range is (0,1); alpha = 1 is admitted only
/// through integer_order()/admit() so integer-order degenerate runs are
/// always an explicit choice at the call site.
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw std::invalid_argument("FractionalOrder: alpha must lie in (0,1), got " +
                                        std::to_string(alpha));
    }

    static FractionalOrder integer_order() { return FractionalOrder(1.0, Tag{}); }

    /// Accepts (0,1]; use where integer-order fallbacks are part of the contract.
    static FractionalOrder admit(double alpha) {
        if (!(alpha > 0.0) || !(alpha <= 1.0))
            throw std::invalid_argument("FractionalOrder: alpha must lie in (0,1], got " +
                                        std::to_string(alpha));
        return FractionalOrder(alpha, Tag{});
    }

    double value() const noexcept { return alpha_; }
    bool is_integer() const noexcept { return alpha_ == 1.0; }

private:
    struct Tag {};
    FractionalOrder(double alpha, Tag) : alpha_(alpha) {}
    double alpha_;
};

/// Uniform grid t_k = t0 + k*h, k = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double h = 1e-3;
    std::size_t n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double h_, std::size_t n_steps_) : t0(t0_), h(h_), n_steps(n_steps_) {
        if (!(h > 0.0)) throw std::invalid_argument("TimeGrid: h must be positive");
        if (n_steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
    }

    double t(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * h; }
    std::size_t points() const noexcept { return n_steps + 1; }
    double horizon() const noexcept { return t(n_steps); }
};

/// GL weights w_0..w_count of order alpha: w_0 = 1,
/// w_k = w_{k-1} * (1 - (1+alpha)/k). These are (-1)^k C(alpha,k).
struct GLKernel {
    FractionalOrder order;
    std::vector<double> weights;
};

GLKernel gl_weights(FractionalOrder order, std::size_t count);

/// Weights of the fractional-integral quadrature (1-z)^{-alpha}; used by the
/// GL integrator that cross-checks the diffusive approximation.
std::vector<double> gl_integral_weights(double alpha, std::size_t count);

/// Discrete Caputo derivative at the newest grid point:
/// h^{-alpha} * sum_j w_j (f_{k-j} - f_0). Exact zero on constants.
double caputo_apply(const GLKernel& kernel, std::span<const double> history, double h);

/// E_alpha(z) = sum_k z^k / Gamma(alpha k + 1), compensated summation.
/// Series evaluation only; |z| is capped (oracle use, small arguments).
double mittag_leffler(double alpha, double z);

/// Max over the grid of |D^p(D^q f) - D^{p+q} f| with every operator realized
/// through caputo_apply. Requires f(t0) = 0.
double check_additivity(FractionalOrder p, FractionalOrder q,
                        const std::function<double(double)>& f, const TimeGrid& grid);

/// Finite-mode realization of the frequency-distributed fractional integrator:
/// per node dz/dt = -omega z + u, output = sum weight_i z_i.
struct DiffusiveApprox {
    FractionalOrder order;
    std::vector<double> omega;   // strictly increasing, positive
    std::vector<double> weight;  // quadrature of mu_alpha over the node bins
    std::vector<double> state;

    /// Log-spaced nodes over [omega_min, omega_max], midpoint quadrature of
    /// mu_alpha(w) = w^{-alpha} sin(alpha pi)/pi.
    static DiffusiveApprox log_spaced(FractionalOrder order, std::size_t n_nodes,
                                      double omega_min, double omega_max);
    static DiffusiveApprox default_nodes(FractionalOrder order);
};

/// Advances every node one step (exact exponential hold on the input) and
/// returns the weighted sum, approximating the alpha-order integral.
double diffusive_step(DiffusiveApprox& approx, double input, double h);

/// One scalar fractional state with full GL memory:
///   x_{k+1} = x0 - sum_{j=1}^{k+1} w_j (x_{k+1-j} - x0) + h^alpha * drive.
class FracIntegrator {
public:
    FracIntegrator(FractionalOrder order, double x0, const TimeGrid& grid);

    double value() const noexcept { return value_; }
    double initial() const noexcept { return x0_; }
    std::size_t step() const noexcept { return k_; }
    double h_alpha() const noexcept { return h_alpha_; }
    FractionalOrder order() const noexcept { return kernel_.order; }

    /// Memory term of the pending step; cached, so predict/advance pairs cost
    /// one convolution.
    double memory() const;

    /// Value the pending step would produce for the given drive.
    double predict(double drive) const { return x0_ - memory() + h_alpha_ * drive; }

    double advance(double drive);

private:
    GLKernel kernel_;
    double x0_;
    double h_alpha_;
    double value_;
    std::size_t k_ = 0;
    std::vector<double> dev_;  // dev_[i] = x_i - x0
    mutable double memo_ = 0.0;
    mutable std::size_t memo_step_ = static_cast<std::size_t>(-1);
};

enum class SolverScheme {
    /// Plain explicit GL update with the right-hand side held at t_k.
    Explicit,
    /// Explicit predictor plus one corrector evaluation at the predicted
    /// state, with startup weights that make the quadrature exact on
    /// constant drives. Needed to hit oracle tolerances near t = 0, where
    /// solutions carry a t^alpha mode.
    PredictorCorrector,
};

/// Startup correction weights nu_1..nu_count for the corrected scheme:
/// nu_m = [sum_{j=0}^m w_j (m-j)^alpha] / Gamma(1+alpha) - 1.
std::vector<double> startup_weights(FractionalOrder order, std::size_t count);

/// Vector stepper for D^{alpha_i} x_i = f_i(t, x) on a shared grid.
class FosStepper {
public:
    using Rhs = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

    FosStepper(std::span<const FractionalOrder> orders, std::span<const double> x0,
               const TimeGrid& grid, SolverScheme scheme = SolverScheme::PredictorCorrector);

    std::size_t dimension() const noexcept { return states_.size(); }
    std::size_t step() const noexcept { return k_; }
    const std::vector<double>& state() const noexcept { return x_; }

    /// One step t_k -> t_{k+1}; throws DivergenceError on non-finite states.
    void advance(const Rhs& rhs);

private:
    TimeGrid grid_;
    SolverScheme scheme_;
    std::vector<FracIntegrator> states_;
    std::vector<std::vector<double>> nu_;  // per state, corrected scheme only
    std::vector<double> f0_;
    bool have_f0_ = false;
    std::vector<double> x_, fk_, xpred_, fnext_;
    std::size_t k_ = 0;
};

struct FosSolution {
    TimeGrid grid;
    std::vector<std::vector<double>> states;  // states[k] is the vector at t_k
};

/// Integrates the incommensurate system over the whole grid.
FosSolution solve_fos(const FosStepper::Rhs& rhs, std::span<const FractionalOrder> orders,
                      std::span<const double> x0, const TimeGrid& grid,
                      SolverScheme scheme = SolverScheme::PredictorCorrector);

}  // namespace focs
