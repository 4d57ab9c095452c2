#pragma once

// The four fractional-order adaptive backstepping controllers: linear and
// power-feedback variants for known and unknown scaled input gain, their
// saturation-compensating auxiliary systems, the fractional-order parameter
// estimators, and the tracking differentiator that supplies every fractional
// derivative the control laws need.

#include <optional>
#include <span>
#include <vector>

#include "focs/fraccalc.hpp"
#include "focs/plant.hpp"

namespace focs {

/// Two-argument tanh: (e^{gz} - e^{-gz}) / (e^{gz} + e^{-gz}), in (-1,1).
double bounded_tanh(double z, double gamma);

/// Damping constant of the tracking differentiator,
/// f(alpha) = 1 - Gamma^2(alpha+1)/Gamma(2*alpha+1); f(1) = 1/2.
double fotd_gain_constant(double alpha);

/// Fractional-order tracking differentiator:
///   D^alpha x1 = x2,  D^alpha x2 = -r1 tanh(x1 - v + x2|x2| f(alpha)/r1, r2).
/// x1 tracks the input signal, x2 estimates its alpha-order derivative.
class Fotd {
public:
    Fotd(FractionalOrder order, double r1, double r2, const TimeGrid& grid, double x1_0 = 0.0,
         double x2_0 = 0.0);

    double signal() const noexcept { return x1_.value(); }
    double derivative() const noexcept { return x2_.value(); }
    double r1() const noexcept { return r1_; }
    double gain_constant() const noexcept { return f_alpha_; }

    /// One GL step driven by the current input sample; returns the updated
    /// derivative estimate.
    double advance(double input);

private:
    double r1_, r2_, f_alpha_;
    FracIntegrator x1_, x2_;
};

/// Operation-style wrapper over Fotd::advance.
inline double fotd_step(Fotd& fotd, double v_signal) { return fotd.advance(v_signal); }

/// Saturation-compensator chain generating the virtual signals lambda_i.
/// Linear kind:  D^{a_i} l_i = l_{i+1} - c_i l_i,    last row: g*dw - c_n l_n.
/// Power kind:   D^{a_i} l_i = l_{i+1} - a_i sgn(l_i)|l_i|^{mu_i}, last row
///               g*dw - a_n sgn(l_n)|l_n|^{mu_n}.
/// g is b_bar for the known-gain laws and 1/p_hat for the unknown-gain ones.
class AuxiliarySystem {
public:
    enum class Kind { linear, power };

    static AuxiliarySystem linear(std::span<const FractionalOrder> orders,
                                  std::span<const double> c, const TimeGrid& grid);
    static AuxiliarySystem power(std::span<const FractionalOrder> orders,
                                 std::span<const double> a, std::span<const double> mu,
                                 const TimeGrid& grid);

    Kind kind() const noexcept { return kind_; }
    std::span<const double> values() const noexcept { return values_; }

    /// One GL step of the whole chain; all rows read the same snapshot.
    void advance(double delta_w, double input_gain);

private:
    AuxiliarySystem(Kind kind, std::span<const FractionalOrder> orders, const TimeGrid& grid);
    Kind kind_;
    std::vector<double> c_, a_, mu_;
    std::vector<FracIntegrator> lambda_;
    std::vector<double> values_;
};

/// Operation-style wrapper over AuxiliarySystem::advance.
inline void aux_step(AuxiliarySystem& aux, double delta_w, double b_bar_or_inv_p) {
    aux.advance(delta_w, b_bar_or_inv_p);
}

/// Gains and fractional orders of the parameter update laws.
struct EstimatorGains {
    std::vector<double> lambda_gain;  // q x q, row-major, symmetric positive definite
    double xi = 1.0;                  // disturbance-bound law gain
    double eta = 1.0;                 // inverse-gain law gain (unknown-gain laws)
    double beta = 0.9;                // order of the theta law, (0,1]
    double rho = 0.9;                 // order of the D law, (0,1]
    double gamma = 0.9;               // order of the p law, (0,1]
};

/// theta_hat / D_hat / p_hat advanced by GL fractional integration of their
/// stated drive signals. D_hat is driven by xi*|eps_n| >= 0 and therefore
/// never becomes negative from a nonnegative start.
class Estimators {
public:
    Estimators(std::size_t q, const EstimatorGains& gains, std::span<const double> theta0,
               std::optional<double> d0, std::optional<double> p0, const TimeGrid& grid);

    std::span<const double> theta_hat() const noexcept { return theta_values_; }
    std::optional<double> d_hat() const;
    std::optional<double> p_hat() const;

    /// One step of every active law. phi_bar_values holds phi_bar_i(x) for
    /// i = 1..n; w_bar feeds the p law and sign_b_bar is the hard sign of the
    /// scaled input gain.
    void advance(std::span<const double> eps, const std::vector<std::vector<double>>& phi_bar_values,
                 std::optional<double> w_bar, int sign_b_bar);

private:
    std::size_t q_;
    EstimatorGains gains_;
    std::vector<FracIntegrator> theta_;
    std::optional<FracIntegrator> d_;
    std::optional<FracIntegrator> p_;
    std::vector<double> theta_values_;
};

/// Checks symmetry and positive definiteness (Cholesky) of a q x q matrix.
bool is_symmetric_positive_definite(std::span<const double> m, std::size_t q);

enum class ControllerVariant { thm1, cor1, thm2, cor2, baseline };

const char* variant_name(ControllerVariant v);
ControllerVariant variant_from_name(const std::string& name);

struct FotdGains {
    double r1 = 50.0;
    double r2 = 5.0;
};

struct ControllerConfig {
    ControllerVariant variant = ControllerVariant::thm1;
    std::vector<double> c;      // n gains; thm-style laws enforce the floors
    std::vector<double> a;      // n gains, power variants
    std::vector<double> sigma;  // n exponents in (0,1), power variants
    std::vector<double> mu;     // n exponents in (0,1), power variants
    EstimatorGains estimator;
    std::vector<double> theta0;  // q entries, default zeros
    double d0 = 0.0;
    double p0 = 0.01;           // must be nonzero (divides the auxiliary input)
    double sign_gain = 10.0;    // gamma_s of the tanh surrogate for sgn
    bool hard_dhat_sign = false; // hard sgn(eps_n) in the D_hat product term
    double p_floor = 1e-6;      // |p_hat| clamp when used as a divisor
    FotdGains fotd;

    void validate(std::size_t n, std::size_t q) const;
};

bool uses_known_gain(ControllerVariant v);   // thm1 / cor1 / baseline
bool uses_power_feedback(ControllerVariant v);  // cor1 / cor2

/// What the controller is allowed to see of the plant. Deliberately omits
/// theta_true, the disturbance signal and its bound, and (for the
/// unknown-gain laws) the magnitude of b_bar.
struct ControllerPlantView {
    std::size_t n = 0;
    std::size_t q = 0;
    std::vector<FractionalOrder> orders;
    std::vector<double> deltas;
    std::vector<StateFn> psi_bar;
    std::vector<StateVecFn> phi_bar;
    int sign_b_bar = 1;
    std::optional<double> b_bar;  // populated only for known-gain variants
};

ControllerPlantView make_view(const NormalizedPlant& plant, ControllerVariant variant);

/// Values of every signal the backstepping recursion reads at one instant.
struct StepSignals {
    std::span<const double> xbar;           // n measured chain states
    double r = 0.0;                         // reference sample
    std::span<const double> ref_derivs;     // n: D^{alpha_1+..+alpha_i} r estimates
    std::span<const double> dtau;           // n-1: D^{alpha_{i+1}} tau_i estimates
    std::span<const double> lambda;         // n compensator signals (zeros if none)
    std::span<const double> psi_vals;       // n: psi_bar_i(x)
    std::span<const double> phi_dot_theta;  // n: phi_bar_i(x) . theta_hat
};

/// Error variables eps_1..eps_n and stabilizing functions tau_1..tau_{n-1}.
void errors_and_tau(const ControllerConfig& cfg, const StepSignals& s,
                    std::vector<double>& eps, std::vector<double>& tau);

struct ControlLawResult {
    double v = 0.0;
    std::optional<double> v_bar;  // unknown-gain variants
};

/// The variant's adaptive control law. p_hat_safe must already be clamped
/// away from zero; b_bar is required by the known-gain variants.
ControlLawResult control_law(const ControllerConfig& cfg, const StepSignals& s,
                             std::span<const double> eps, std::span<const double> tau,
                             double d_hat, std::optional<double> p_hat_safe,
                             std::optional<double> b_bar);

/// One controller instance owns its estimates, compensator, and FOTD bank and
/// must be driven sequentially: decide(k, x) then advance(decision, w).
class Controller {
public:
    Controller(ControllerConfig cfg, ControllerPlantView view, TimeFn reference,
               const TimeGrid& grid);

    struct Decision {
        double t = 0.0;
        double r = 0.0;
        std::vector<double> xbar;
        std::vector<double> eps;
        std::vector<double> tau;
        double v = 0.0;
        std::optional<double> v_bar;
        std::vector<std::vector<double>> phi_vals;  // carried into the update step
    };

    Decision decide(std::size_t k, std::span<const double> x_measured);

    /// Steps estimators, compensator, and FOTD bank; w is the output of the
    /// saturation stage for the decision's v.
    void advance(const Decision& decision, double w);

    std::span<const double> lambda() const;  // empty for the baseline variant
    std::span<const double> theta_hat() const noexcept { return estimators_.theta_hat(); }
    std::optional<double> d_hat() const { return estimators_.d_hat(); }
    std::optional<double> p_hat() const { return estimators_.p_hat(); }
    std::size_t p_floor_hits() const noexcept { return p_floor_hits_; }
    const ControllerConfig& config() const noexcept { return cfg_; }

private:
    double safe_p();

    ControllerConfig cfg_;
    ControllerPlantView view_;
    TimeFn reference_;
    TimeGrid grid_;
    Estimators estimators_;
    std::optional<AuxiliarySystem> aux_;
    std::vector<Fotd> ref_chain_;   // stage i differentiates stage i-1's output
    std::vector<Fotd> tau_fotds_;   // order alpha_{i+1} differentiator for tau_i
    std::vector<double> zero_lambda_;
    std::size_t p_floor_hits_ = 0;
};

}  // namespace focs
