#include "focs/foabc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace focs {

double bounded_tanh(double z, double gamma) {
    // std::tanh of the product is the same function and never overflows
    return std::tanh(gamma * z);
}

double fotd_gain_constant(double alpha) {
    const double g1 = std::tgamma(alpha + 1.0);
    return 1.0 - g1 * g1 / std::tgamma(2.0 * alpha + 1.0);
}

Fotd::Fotd(FractionalOrder order, double r1, double r2, const TimeGrid& grid, double x1_0,
           double x2_0)
    : r1_(r1), r2_(r2), f_alpha_(fotd_gain_constant(order.value())),
      x1_(order, x1_0, grid), x2_(order, x2_0, grid) {
    if (!(r1 > 0.0) || !(r2 > 0.0))
        throw std::invalid_argument("Fotd: gains r1, r2 must be positive");
}

double Fotd::advance(double input) {
    if (!std::isfinite(input)) throw std::invalid_argument("Fotd: non-finite input");
    const double x1 = x1_.value();
    const double x2 = x2_.value();
    const double u = -r1_ * bounded_tanh(x1 - input + x2 * std::abs(x2) * f_alpha_ / r1_, r2_);
    x1_.advance(x2);
    return x2_.advance(u);
}

AuxiliarySystem::AuxiliarySystem(Kind kind, std::span<const FractionalOrder> orders,
                                 const TimeGrid& grid)
    : kind_(kind) {
    if (orders.empty()) throw std::invalid_argument("AuxiliarySystem: empty order list");
    lambda_.reserve(orders.size());
    for (const FractionalOrder& o : orders) lambda_.emplace_back(o, 0.0, grid);
    values_.assign(orders.size(), 0.0);
}

AuxiliarySystem AuxiliarySystem::linear(std::span<const FractionalOrder> orders,
                                        std::span<const double> c, const TimeGrid& grid) {
    if (c.size() != orders.size())
        throw std::invalid_argument("AuxiliarySystem: gain count mismatch");
    AuxiliarySystem aux(Kind::linear, orders, grid);
    aux.c_.assign(c.begin(), c.end());
    return aux;
}

AuxiliarySystem AuxiliarySystem::power(std::span<const FractionalOrder> orders,
                                       std::span<const double> a, std::span<const double> mu,
                                       const TimeGrid& grid) {
    if (a.size() != orders.size() || mu.size() != orders.size())
        throw std::invalid_argument("AuxiliarySystem: gain count mismatch");
    for (double ai : a)
        if (!(ai > 0.0)) throw std::invalid_argument("AuxiliarySystem: a_i must be positive");
    for (double mi : mu)
        if (!(mi > 0.0 && mi < 1.0))
            throw std::invalid_argument("AuxiliarySystem: mu_i must lie in (0,1)");
    AuxiliarySystem aux(Kind::power, orders, grid);
    aux.a_.assign(a.begin(), a.end());
    aux.mu_.assign(mu.begin(), mu.end());
    return aux;
}

namespace {
inline double signed_power(double z, double p) {
    return (z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0)) * std::pow(std::abs(z), p);
}
}  // namespace

void AuxiliarySystem::advance(double delta_w, double input_gain) {
    const std::size_t n = lambda_.size();
    for (std::size_t i = 0; i < n; ++i) values_[i] = lambda_[i].value();
    for (std::size_t i = 0; i < n; ++i) {
        const double feed = (i + 1 < n) ? values_[i + 1] : input_gain * delta_w;
        const double damp = (kind_ == Kind::linear) ? c_[i] * values_[i]
                                                    : a_[i] * signed_power(values_[i], mu_[i]);
        lambda_[i].advance(feed - damp);
    }
    for (std::size_t i = 0; i < n; ++i) values_[i] = lambda_[i].value();
}

bool is_symmetric_positive_definite(std::span<const double> m, std::size_t q) {
    if (m.size() != q * q) return false;
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = i + 1; j < q; ++j)
            if (std::abs(m[i * q + j] - m[j * q + i]) >
                1e-12 * std::max(1.0, std::abs(m[i * q + j])))
                return false;
    // in-place Cholesky on a copy
    std::vector<double> a(m.begin(), m.end());
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * q + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * q + k] * a[j * q + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                a[i * q + i] = std::sqrt(s);
            } else {
                a[i * q + j] = s / a[j * q + j];
            }
        }
    }
    return true;
}

Estimators::Estimators(std::size_t q, const EstimatorGains& gains, std::span<const double> theta0,
                       std::optional<double> d0, std::optional<double> p0, const TimeGrid& grid)
    : q_(q), gains_(gains) {
    if (theta0.size() != q) throw std::invalid_argument("Estimators: theta0 size != q");
    if (!is_symmetric_positive_definite(gains.lambda_gain, q))
        throw std::invalid_argument("Estimators: lambda_gain must be symmetric positive definite");
    if (!(gains.xi > 0.0)) throw std::invalid_argument("Estimators: xi must be positive");
    const FractionalOrder beta = FractionalOrder::admit(gains.beta);
    theta_.reserve(q);
    for (std::size_t j = 0; j < q; ++j) theta_.emplace_back(beta, theta0[j], grid);
    theta_values_.assign(theta0.begin(), theta0.end());
    if (d0) d_.emplace(FractionalOrder::admit(gains.rho), *d0, grid);
    if (p0) {
        if (!(gains.eta > 0.0)) throw std::invalid_argument("Estimators: eta must be positive");
        if (*p0 == 0.0) throw std::invalid_argument("Estimators: p0 must be nonzero");
        p_.emplace(FractionalOrder::admit(gains.gamma), *p0, grid);
    }
}

std::optional<double> Estimators::d_hat() const {
    if (!d_) return std::nullopt;
    return d_->value();
}

std::optional<double> Estimators::p_hat() const {
    if (!p_) return std::nullopt;
    return p_->value();
}

void Estimators::advance(std::span<const double> eps,
                         const std::vector<std::vector<double>>& phi_bar_values,
                         std::optional<double> w_bar, int sign_b_bar) {
    const std::size_t n = eps.size();
    if (phi_bar_values.size() != n)
        throw std::invalid_argument("Estimators: phi value count != error count");
    std::vector<double> s(q_, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < q_; ++i) s[i] += eps[j] * phi_bar_values[j][i];
    for (std::size_t i = 0; i < q_; ++i) {
        double drive = 0.0;
        for (std::size_t k = 0; k < q_; ++k) drive += gains_.lambda_gain[i * q_ + k] * s[k];
        theta_values_[i] = theta_[i].advance(drive);
    }
    const double eps_n = eps[n - 1];
    if (d_) d_->advance(gains_.xi * std::abs(eps_n));
    if (p_) {
        if (!w_bar) throw std::invalid_argument("Estimators: p law needs w_bar");
        p_->advance(-gains_.eta * static_cast<double>(sign_b_bar) * eps_n * *w_bar);
    }
}

const char* variant_name(ControllerVariant v) {
    switch (v) {
        case ControllerVariant::thm1: return "thm1";
        case ControllerVariant::cor1: return "cor1";
        case ControllerVariant::thm2: return "thm2";
        case ControllerVariant::cor2: return "cor2";
        case ControllerVariant::baseline: return "baseline";
    }
    return "?";
}

ControllerVariant variant_from_name(const std::string& name) {
    if (name == "thm1") return ControllerVariant::thm1;
    if (name == "cor1") return ControllerVariant::cor1;
    if (name == "thm2") return ControllerVariant::thm2;
    if (name == "cor2") return ControllerVariant::cor2;
    if (name == "baseline") return ControllerVariant::baseline;
    throw std::invalid_argument("unknown controller variant: " + name);
}

bool uses_known_gain(ControllerVariant v) {
    return v == ControllerVariant::thm1 || v == ControllerVariant::cor1 ||
           v == ControllerVariant::baseline;
}

bool uses_power_feedback(ControllerVariant v) {
    return v == ControllerVariant::cor1 || v == ControllerVariant::cor2;
}

void ControllerConfig::validate(std::size_t n, std::size_t q) const {
    if (c.size() != n) throw std::invalid_argument("ControllerConfig: need n gains c_i");
    for (double ci : c)
        if (!std::isfinite(ci) || !(ci > 0.0))
            throw std::invalid_argument("ControllerConfig: gains c_i must be positive");
    if (!uses_power_feedback(variant)) {
        // c_1, c_n > 1/2 and middle gains > 1
        if (!(c.front() > 0.5) || !(c.back() > 0.5))
            throw std::invalid_argument("ControllerConfig: c_1 and c_n must exceed 0.5");
        for (std::size_t i = 1; i + 1 < n; ++i)
            if (!(c[i] > 1.0))
                throw std::invalid_argument("ControllerConfig: middle gains c_i must exceed 1");
    } else {
        if (a.size() != n || sigma.size() != n || mu.size() != n)
            throw std::invalid_argument("ControllerConfig: power variants need a, sigma, mu of size n");
        for (double ai : a)
            if (!(ai > 0.0)) throw std::invalid_argument("ControllerConfig: a_i must be positive");
        for (double si : sigma)
            if (!(si > 0.0 && si < 1.0))
                throw std::invalid_argument("ControllerConfig: sigma_i must lie in (0,1)");
        for (double mi : mu)
            if (!(mi > 0.0 && mi < 1.0))
                throw std::invalid_argument("ControllerConfig: mu_i must lie in (0,1)");
    }
    if (theta0.size() != q) throw std::invalid_argument("ControllerConfig: theta0 size != q");
    if (!(sign_gain > 0.0)) throw std::invalid_argument("ControllerConfig: sign_gain must be positive");
    if (!(p_floor > 0.0)) throw std::invalid_argument("ControllerConfig: p_floor must be positive");
    if (!uses_known_gain(variant) && p0 == 0.0)
        throw std::invalid_argument("ControllerConfig: p0 must be nonzero");
    if (!(fotd.r1 > 0.0 && fotd.r2 > 0.0))
        throw std::invalid_argument("ControllerConfig: FOTD gains must be positive");
    FractionalOrder::admit(estimator.beta);
    FractionalOrder::admit(estimator.rho);
    FractionalOrder::admit(estimator.gamma);
}

ControllerPlantView make_view(const NormalizedPlant& plant, ControllerVariant variant) {
    ControllerPlantView view;
    view.n = plant.n;
    view.q = plant.q;
    view.orders = plant.orders;
    view.deltas = plant.deltas;
    view.psi_bar = plant.psi_bar;
    view.phi_bar = plant.phi_bar;
    view.sign_b_bar = plant.b_bar > 0.0 ? 1 : -1;
    if (uses_known_gain(variant)) view.b_bar = plant.b_bar;
    return view;
}

namespace {
inline double smooth_signed_power(double z, double p, double gain) {
    return bounded_tanh(z, gain) * std::pow(std::abs(z), p);
}
}  // namespace

void errors_and_tau(const ControllerConfig& cfg, const StepSignals& s,
                    std::vector<double>& eps, std::vector<double>& tau) {
    const std::size_t n = s.xbar.size();
    eps.assign(n, 0.0);
    tau.assign(n > 0 ? n - 1 : 0, 0.0);
    const bool power = uses_power_feedback(cfg.variant);
    eps[0] = s.xbar[0] - s.r - s.lambda[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) eps[i] = s.xbar[i] - s.ref_derivs[i - 1] - tau[i - 1] - s.lambda[i];
        if (i + 1 >= n) break;
        if (!power) {
            if (i == 0) {
                tau[0] = -cfg.c[0] * (s.xbar[0] - s.r) - s.psi_vals[0] - s.phi_dot_theta[0];
            } else {
                tau[i] = -cfg.c[i] * (s.xbar[i] - s.ref_derivs[i - 1] - tau[i - 1]) + s.dtau[i - 1] -
                         s.psi_vals[i] - s.phi_dot_theta[i];
            }
        } else {
            double value = -cfg.c[i] * smooth_signed_power(eps[i], cfg.sigma[i], cfg.sign_gain) -
                           s.psi_vals[i] - s.phi_dot_theta[i] -
                           cfg.a[i] * smooth_signed_power(s.lambda[i], cfg.mu[i], cfg.sign_gain);
            if (i > 0) value += -eps[i - 1] + s.dtau[i - 1];
            tau[i] = value;
        }
    }
}

ControlLawResult control_law(const ControllerConfig& cfg, const StepSignals& s,
                             std::span<const double> eps, std::span<const double> tau,
                             double d_hat, std::optional<double> p_hat_safe,
                             std::optional<double> b_bar) {
    const std::size_t n = s.xbar.size();
    const double eps_n = eps[n - 1];
    const double sgn_eps = cfg.hard_dhat_sign ? (eps_n > 0.0 ? 1.0 : (eps_n < 0.0 ? -1.0 : 0.0))
                                              : bounded_tanh(eps_n, cfg.sign_gain);
    const double d_term = sgn_eps * d_hat;
    const double ref_n = s.ref_derivs[n - 1];
    const double dtau_n = (n > 1) ? s.dtau[n - 2] : 0.0;
    const double head = ref_n + dtau_n - s.psi_vals[n - 1] - s.phi_dot_theta[n - 1];
    const double eps_prev = (n > 1) ? eps[n - 2] : 0.0;
    (void)tau;

    ControlLawResult out;
    switch (cfg.variant) {
        case ControllerVariant::thm1: {
            if (!b_bar) throw std::invalid_argument("control_law: thm1 requires b_bar");
            out.v = (-cfg.c[n - 1] * eps_n + head - d_term - cfg.c[n - 1] * s.lambda[n - 1]) / *b_bar;
            break;
        }
        case ControllerVariant::baseline: {
            if (!b_bar) throw std::invalid_argument("control_law: baseline requires b_bar");
            out.v = (-cfg.c[n - 1] * eps_n + head) / *b_bar;
            break;
        }
        case ControllerVariant::cor1: {
            if (!b_bar) throw std::invalid_argument("control_law: cor1 requires b_bar");
            out.v = (-eps_prev - cfg.c[n - 1] * smooth_signed_power(eps_n, cfg.sigma[n - 1], cfg.sign_gain) +
                     head - d_term -
                     cfg.a[n - 1] * smooth_signed_power(s.lambda[n - 1], cfg.mu[n - 1], cfg.sign_gain)) /
                    *b_bar;
            break;
        }
        case ControllerVariant::thm2: {
            if (!p_hat_safe) throw std::invalid_argument("control_law: thm2 requires p_hat");
            const double v_bar =
                -cfg.c[n - 1] * s.lambda[n - 1] - cfg.c[n - 1] * eps_n - d_term + head;
            out.v_bar = v_bar;
            out.v = *p_hat_safe * v_bar;
            break;
        }
        case ControllerVariant::cor2: {
            if (!p_hat_safe) throw std::invalid_argument("control_law: cor2 requires p_hat");
            const double v_bar =
                -eps_prev - cfg.c[n - 1] * smooth_signed_power(eps_n, cfg.sigma[n - 1], cfg.sign_gain) -
                d_term + head -
                cfg.a[n - 1] * smooth_signed_power(s.lambda[n - 1], cfg.mu[n - 1], cfg.sign_gain);
            out.v_bar = v_bar;
            out.v = *p_hat_safe * v_bar;
            break;
        }
    }
    return out;
}

namespace {

// fills the size-dependent defaults (zero theta0, identity gain matrix) and
// validates before any member construction can observe the config
ControllerConfig finalize_config(ControllerConfig cfg, const ControllerPlantView& view) {
    if (cfg.theta0.empty()) cfg.theta0.assign(view.q, 0.0);
    if (cfg.estimator.lambda_gain.empty()) {
        cfg.estimator.lambda_gain.assign(view.q * view.q, 0.0);
        for (std::size_t i = 0; i < view.q; ++i) cfg.estimator.lambda_gain[i * view.q + i] = 1.0;
    }
    cfg.validate(view.n, view.q);
    if (uses_known_gain(cfg.variant) && !view.b_bar)
        throw std::invalid_argument("Controller: known-gain variant needs b_bar in the view");
    return cfg;
}

}  // namespace

Controller::Controller(ControllerConfig cfg, ControllerPlantView view, TimeFn reference,
                       const TimeGrid& grid)
    : cfg_(finalize_config(std::move(cfg), view)),
      view_(std::move(view)),
      reference_(std::move(reference)),
      grid_(grid),
      estimators_(view_.q, cfg_.estimator, cfg_.theta0,
                  cfg_.variant == ControllerVariant::baseline ? std::nullopt
                                                              : std::optional<double>(cfg_.d0),
                  uses_known_gain(cfg_.variant) ? std::nullopt : std::optional<double>(cfg_.p0),
                  grid) {
    if (cfg_.variant != ControllerVariant::baseline) {
        if (uses_power_feedback(cfg_.variant))
            aux_.emplace(AuxiliarySystem::power(view_.orders, cfg_.a, cfg_.mu, grid));
        else
            aux_.emplace(AuxiliarySystem::linear(view_.orders, cfg_.c, grid));
    }
    ref_chain_.reserve(view_.n);
    for (std::size_t i = 0; i < view_.n; ++i)
        ref_chain_.emplace_back(view_.orders[i], cfg_.fotd.r1, cfg_.fotd.r2, grid);
    for (std::size_t i = 1; i < view_.n; ++i)
        tau_fotds_.emplace_back(view_.orders[i], cfg_.fotd.r1, cfg_.fotd.r2, grid);
    zero_lambda_.assign(view_.n, 0.0);
}

double Controller::safe_p() {
    const double p = estimators_.p_hat().value();
    if (std::abs(p) < cfg_.p_floor) {
        ++p_floor_hits_;
        return p >= 0.0 ? cfg_.p_floor : -cfg_.p_floor;
    }
    return p;
}

std::span<const double> Controller::lambda() const {
    if (!aux_) return {};
    return aux_->values();
}

Controller::Decision Controller::decide(std::size_t k, std::span<const double> x_measured) {
    const std::size_t n = view_.n;
    Decision d;
    d.t = grid_.t(k);
    d.r = reference_(d.t);
    d.xbar.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.xbar[i] = view_.deltas[i] * x_measured[i];

    std::vector<double> psi_vals(n), phi_dot(n), ref_derivs(n), dtau(n > 1 ? n - 1 : 0);
    d.phi_vals.resize(n);
    const std::span<const double> theta = estimators_.theta_hat();
    for (std::size_t i = 0; i < n; ++i) {
        psi_vals[i] = view_.psi_bar[i](x_measured);
        d.phi_vals[i] = view_.phi_bar[i](x_measured);
        if (d.phi_vals[i].size() != view_.q)
            throw std::runtime_error("Controller: phi_bar returned the wrong dimension");
        double dot = 0.0;
        for (std::size_t j = 0; j < view_.q; ++j) dot += d.phi_vals[i][j] * theta[j];
        phi_dot[i] = dot;
        ref_derivs[i] = ref_chain_[i].derivative();
        if (i + 1 < n) dtau[i] = tau_fotds_[i].derivative();
    }
    StepSignals s;
    s.xbar = d.xbar;
    s.r = d.r;
    s.ref_derivs = ref_derivs;
    s.dtau = dtau;
    s.lambda = aux_ ? aux_->values() : std::span<const double>(zero_lambda_);
    s.psi_vals = psi_vals;
    s.phi_dot_theta = phi_dot;

    errors_and_tau(cfg_, s, d.eps, d.tau);
    const std::optional<double> p_safe =
        uses_known_gain(cfg_.variant) ? std::nullopt : std::optional<double>(safe_p());
    const double d_hat = estimators_.d_hat().value_or(0.0);
    const ControlLawResult law = control_law(cfg_, s, d.eps, d.tau, d_hat, p_safe, view_.b_bar);
    d.v = law.v;
    d.v_bar = law.v_bar;
    return d;
}

void Controller::advance(const Decision& decision, double w) {
    const std::size_t n = view_.n;
    std::optional<double> w_bar;
    if (!uses_known_gain(cfg_.variant)) w_bar = w / safe_p();
    estimators_.advance(decision.eps, decision.phi_vals, w_bar, view_.sign_b_bar);
    if (aux_) {
        const double gain = uses_known_gain(cfg_.variant) ? *view_.b_bar : 1.0 / safe_p();
        aux_->advance(w - decision.v, gain);
    }
    // reference chain: stage i is fed the previous stage's derivative estimate,
    // all read from the same pre-step snapshot
    std::vector<double> chain_in(n);
    chain_in[0] = decision.r;
    for (std::size_t i = 1; i < n; ++i) chain_in[i] = ref_chain_[i - 1].derivative();
    for (std::size_t i = 0; i < n; ++i) ref_chain_[i].advance(chain_in[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) tau_fotds_[i].advance(decision.tau[i]);
}

}  // namespace focs
