#include "focs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace focs {

TimeFn ReferenceSpec::make(const TimeFn& preset_reference) const {
    switch (kind) {
        case Kind::preset: return preset_reference;
        case Kind::zero: return [](double) { return 0.0; };
        case Kind::sinusoid: {
            const double a = amplitude, om = angular_frequency;
            return [a, om](double t) { return a * std::sin(om * t); };
        }
    }
    throw std::logic_error("ReferenceSpec: bad kind");
}

namespace {

ExampleSystem make_system(const ScenarioConfig& config) {
    if (config.preset != "example-4-1")
        throw std::invalid_argument("unknown plant preset: " + config.preset);
    ExampleSystem sys = example_plant();
    if (config.overrides.b) {
        if (*config.overrides.b == 0.0)
            throw std::invalid_argument("overrides: b must be nonzero");
        sys.plant.b = *config.overrides.b;
    }
    if (config.overrides.theta) {
        if (config.overrides.theta->size() != sys.plant.q)
            throw std::invalid_argument("overrides: theta size mismatch");
        sys.plant.theta_true = *config.overrides.theta;
    }
    if (config.overrides.x0) {
        if (config.overrides.x0->size() != sys.plant.n)
            throw std::invalid_argument("overrides: x0 size mismatch");
        sys.x0 = *config.overrides.x0;
    }
    if (config.overrides.disturbance_scale) {
        const double s = *config.overrides.disturbance_scale;
        if (s < 0.0) throw std::invalid_argument("overrides: disturbance_scale must be >= 0");
        TimeFn base = sys.plant.disturbance;
        sys.plant.disturbance = [base, s](double t) { return s * base(t); };
        sys.plant.disturbance_bound *= s;
    }
    return sys;
}

ControllerConfig section4_controller(ControllerVariant variant) {
    ControllerConfig cfg;
    cfg.variant = variant;
    cfg.c = {4.0, 4.0, 4.0};
    cfg.a = {4.0, 4.0, 4.0};
    cfg.sigma = {0.8, 0.8, 0.8};
    cfg.mu = {0.8, 0.8, 0.8};
    cfg.estimator.lambda_gain = {1.0};
    cfg.estimator.xi = 1.0;
    cfg.estimator.beta = 0.9;
    cfg.estimator.rho = 0.9;
    cfg.theta0 = {0.0};
    cfg.d0 = 0.0;
    cfg.fotd.r1 = 50.0;
    cfg.fotd.r2 = 5.0;
    cfg.sign_gain = 10.0;
    return cfg;
}

}  // namespace

ScenarioConfig example1_case(ControllerVariant variant) {
    if (!uses_known_gain(variant))
        throw std::invalid_argument("example 1 runs the known-gain variants only");
    ScenarioConfig config;
    config.controller = section4_controller(variant);
    return config;
}

ScenarioConfig example2_case(ControllerVariant variant) {
    ScenarioConfig config;
    config.controller = section4_controller(variant);
    if (!uses_known_gain(variant)) {
        config.controller.estimator.gamma = 0.9;
        config.controller.estimator.eta = 1.0;
        config.controller.p0 = 0.01;
        // The unknown-gain experiments need the full switching authority of
        // the D_hat term to reproduce the reported control-effort scale; the
        // smoothed surrogate under-drives the loop by ~3x there.
        config.controller.hard_dhat_sign = true;
    }
    return config;
}

SimulationRecord run_scenario(const ScenarioConfig& config) {
    ExampleSystem sys = make_system(config);
    const NonsmoothActuator act = config.actuator.value_or(sys.actuator);
    const NormalizedPlant norm = normalize(sys.plant, act);
    const ControllerPlantView view = make_view(norm, config.controller.variant);
    const TimeFn reference = config.reference.make(sys.reference);

    Controller ctrl(config.controller, view, reference, config.grid);
    FosStepper stepper(sys.plant.orders, sys.x0, config.grid, SolverScheme::PredictorCorrector);

    SimulationRecord rec;
    rec.variant = config.controller.variant;
    rec.grid = config.grid;
    rec.n = norm.n;
    rec.q = norm.q;
    rec.has_d_hat = config.controller.variant != ControllerVariant::baseline;
    rec.has_p_hat = !uses_known_gain(config.controller.variant);
    rec.x.resize(rec.n);
    const bool has_aux = config.controller.variant != ControllerVariant::baseline;
    rec.lambda.resize(has_aux ? rec.n : 0);
    rec.theta_hat.resize(rec.q);
    rec.eps_bs.resize(rec.n);
    rec.tau.resize(rec.n > 0 ? rec.n - 1 : 0);
    rec.theta_true = sys.plant.theta_true;
    rec.p_true = 1.0 / norm.b_bar;
    rec.d_bound_bar = norm.disturbance_bound_bar;

    std::vector<double> x = sys.x0;
    for (std::size_t k = 0; k <= config.grid.n_steps; ++k) {
        const Controller::Decision d = ctrl.decide(k, x);
        if (!std::isfinite(d.v)) {
            rec.diverged_at = k;
            break;
        }
        const double w = saturate(d.v, act);
        const double u = dead_zone(w, act);

        rec.t.push_back(d.t);
        rec.y.push_back(x[0]);
        rec.r.push_back(d.r);
        rec.eps.push_back(d.r - x[0]);
        rec.v.push_back(d.v);
        rec.w.push_back(w);
        rec.u.push_back(u);
        rec.delta_w.push_back(w - d.v);
        for (std::size_t i = 0; i < rec.n; ++i) rec.x[i].push_back(x[i]);
        const std::span<const double> lam = ctrl.lambda();
        for (std::size_t i = 0; i < rec.lambda.size(); ++i) rec.lambda[i].push_back(lam[i]);
        const std::span<const double> th = ctrl.theta_hat();
        for (std::size_t j = 0; j < rec.q; ++j) rec.theta_hat[j].push_back(th[j]);
        rec.d_hat.push_back(ctrl.d_hat().value_or(0.0));
        rec.p_hat.push_back(ctrl.p_hat().value_or(0.0));
        for (std::size_t i = 0; i < rec.n; ++i) rec.eps_bs[i].push_back(d.eps[i]);
        for (std::size_t i = 0; i + 1 < rec.n; ++i) rec.tau[i].push_back(d.tau[i]);

        if (k == config.grid.n_steps) break;
        ctrl.advance(d, w);
        const double v_held = d.v;
        try {
            stepper.advance([&](double t, std::span<const double> xs, std::span<double> out) {
                const std::vector<double> dx = plant_rhs(sys.plant, act, t, xs, v_held);
                std::copy(dx.begin(), dx.end(), out.begin());
            });
        } catch (const DivergenceError& e) {
            rec.diverged_at = e.step();
            break;
        } catch (const std::runtime_error&) {
            rec.diverged_at = k + 1;  // non-finite plant nonlinearity output
            break;
        }
        x = stepper.state();
    }
    rec.p_floor_hits = ctrl.p_floor_hits();
    return rec;
}

MetricsReport compute_metrics(const SimulationRecord& rec) {
    const std::size_t m = rec.samples();
    if (m == 0) throw std::invalid_argument("compute_metrics: empty record");
    MetricsReport rep;
    rep.h = rec.grid.h;
    rep.horizon = rec.t.back();
    double eps_sq = 0.0, u_sq = 0.0, th_sq = 0.0, d_sq = 0.0, p_sq = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double e = rec.eps[k];
        rep.eps_max = std::max(rep.eps_max, std::abs(e));
        eps_sq += e * e;
        u_sq += rec.u[k] * rec.u[k];
        double s = 0.0;
        for (std::size_t j = 0; j < rec.q; ++j) {
            const double d = rec.theta_true[j] - rec.theta_hat[j][k];
            s += d * d;
        }
        th_sq += s;
        if (rec.has_d_hat) {
            const double d = rec.d_bound_bar - rec.d_hat[k];
            d_sq += d * d;
        }
        if (rec.has_p_hat) {
            const double d = rec.p_true - rec.p_hat[k];
            p_sq += d * d;
        }
    }
    rep.eps_l2 = std::sqrt(eps_sq);
    rep.u_l2 = std::sqrt(u_sq);
    rep.theta_err_l2 = std::sqrt(th_sq);
    if (rec.has_d_hat) rep.d_err_l2 = std::sqrt(d_sq);
    if (rec.has_p_hat) rep.p_err_l2 = std::sqrt(p_sq);
    if (!(rep.eps_max <= rep.eps_l2 / std::sqrt(rep.h) + 1e-12) || !std::isfinite(rep.eps_l2))
        throw std::runtime_error("compute_metrics: norm sanity bound violated");
    return rep;
}

namespace {

std::string fmt_metric(double v) {
    std::ostringstream os;
    os << std::setprecision(5) << v;
    return os.str();
}

std::string fmt_cell(const std::optional<double>& v) {
    return v ? fmt_metric(*v) : std::string("\\");
}

}  // namespace

TableResult run_table(int example) {
    if (example != 1 && example != 2)
        throw std::invalid_argument("run_table: example must be 1 or 2");
    TableResult result;
    result.example = example;
    result.cases = example == 1
                       ? std::vector<ControllerVariant>{ControllerVariant::thm1,
                                                        ControllerVariant::cor1,
                                                        ControllerVariant::baseline}
                       : std::vector<ControllerVariant>{ControllerVariant::thm2,
                                                        ControllerVariant::cor2,
                                                        ControllerVariant::baseline};
    const bool with_p = example == 2;

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"case", "||eps||_max", "||eps||_2", "||theta~||_2"};
    if (with_p) header.push_back("||p~||_2");
    header.push_back("||D~||_2");
    header.push_back("||u||_2");

    std::ostringstream note;
    for (std::size_t idx = 0; idx < result.cases.size(); ++idx) {
        const ControllerVariant v = result.cases[idx];
        const ScenarioConfig config =
            example == 1 ? example1_case(v) : example2_case(v);
        SimulationRecord rec = run_scenario(config);
        std::vector<std::string> row{std::string("case ") + std::to_string(idx + 1) + " (" +
                                     variant_name(v) + ")"};
        if (rec.diverged_at) {
            result.all_converged = false;
            row.push_back("diverged@" + std::to_string(*rec.diverged_at));
            while (row.size() < header.size()) row.push_back("\\");
            result.records.push_back(std::move(rec));
            result.reports.push_back(MetricsReport{});
            rows.push_back(std::move(row));
            continue;
        }
        MetricsReport rep = compute_metrics(rec);
        row.push_back(fmt_metric(rep.eps_max));
        row.push_back(fmt_metric(rep.eps_l2));
        row.push_back(fmt_metric(rep.theta_err_l2));
        if (with_p) row.push_back(fmt_cell(rep.p_err_l2));
        row.push_back(fmt_cell(rep.d_err_l2));
        row.push_back(fmt_metric(rep.u_l2));
        if (note.str().empty())
            note << "norms: sample-wise sqrt(sum s_k^2), h = " << rec.grid.h << ", t in [0, "
                 << rec.t.back() << "]";
        result.records.push_back(std::move(rec));
        result.reports.push_back(rep);
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
        width[j] = header[j].size();
        for (const auto& row : rows) width[j] = std::max(width[j], row[j].size());
    }
    std::ostringstream text, csv;
    text << "Control performance of Example " << example << "\n";
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j)
            text << std::left << std::setw(static_cast<int>(width[j]) + 2) << row[j];
        text << "\n";
    };
    emit_row(header);
    for (const auto& row : rows) emit_row(row);
    text << note.str() << "\n";

    auto emit_csv = [&](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            const bool absent = row[j] == "\\";
            csv << (absent ? "" : row[j]);
            if (j + 1 < row.size()) csv << ",";
        }
        csv << "\n";
    };
    emit_csv(header);
    for (const auto& row : rows) emit_csv(row);

    result.text = text.str();
    result.csv = csv.str();
    return result;
}

}  // namespace focs
