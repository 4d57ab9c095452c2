#pragma once

// Closed-loop orchestration: scenario configuration, the simulation loop,
// metric computation, table rendering for the two desk experiments, CSV
// export, and the self-check bundle behind the `verify` CLI command.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "focs/foabc.hpp"
#include "focs/nonsmooth.hpp"
#include "focs/plant.hpp"

namespace focs {

struct ReferenceSpec {
    enum class Kind { preset, zero, sinusoid };
    Kind kind = Kind::preset;
    double amplitude = 1.0;
    double angular_frequency = 2.0;

    TimeFn make(const TimeFn& preset_reference) const;
};

/// Numeric tweaks applied on top of a plant preset.
struct PlantOverrides {
    std::optional<double> b;
    std::optional<std::vector<double>> theta;
    std::optional<std::vector<double>> x0;
    std::optional<double> disturbance_scale;  // 0 disables the disturbance
};

struct ScenarioConfig {
    std::string preset = "example-4-1";
    ControllerConfig controller;
    std::optional<NonsmoothActuator> actuator;  // defaults to the preset's
    TimeGrid grid{0.0, 1e-3, 20000};
    ReferenceSpec reference;
    PlantOverrides overrides;
    std::uint64_t seed = 0;  // reserved for sweep tooling; core runs are deterministic
    std::optional<std::string> csv_name;  // trajectory file name for the CLI
};

/// Scenario presets mirroring the two desk experiments. Example 1 runs the
/// known-gain laws (thm1 / cor1 / baseline); Example 2 runs the unknown-gain
/// laws (thm2 / cor2) plus the same baseline. Example 2 uses the hard-sign
/// form of the D_hat control term (see README).
ScenarioConfig example1_case(ControllerVariant variant);
ScenarioConfig example2_case(ControllerVariant variant);

struct SimulationRecord {
    ControllerVariant variant = ControllerVariant::thm1;
    TimeGrid grid;
    std::size_t n = 0;
    std::size_t q = 0;
    // per-sample columns, one entry per grid point
    std::vector<double> t, y, r, eps, v, w, u, delta_w, d_hat, p_hat;
    std::vector<std::vector<double>> x;          // n columns
    std::vector<std::vector<double>> lambda;     // n columns; empty for baseline
    std::vector<std::vector<double>> theta_hat;  // q columns
    std::vector<std::vector<double>> eps_bs;     // n backstepping errors
    std::vector<std::vector<double>> tau;        // n-1 stabilizing functions
    bool has_d_hat = true;
    bool has_p_hat = false;
    std::optional<std::size_t> diverged_at;
    std::size_t p_floor_hits = 0;
    // simulator-side truths carried for metric computation
    std::vector<double> theta_true;
    double p_true = 0.0;
    double d_bound_bar = 0.0;

    std::size_t samples() const { return t.size(); }
};

struct MetricsReport {
    double eps_max = 0.0;
    double eps_l2 = 0.0;
    double theta_err_l2 = 0.0;
    std::optional<double> d_err_l2;
    std::optional<double> p_err_l2;
    double u_l2 = 0.0;
    double h = 0.0;
    double horizon = 0.0;
};

/// Runs the loop: controller decides v, the saturation model produces w and
/// delta_w, the actuator produces u, the plant steps, then estimators /
/// compensator / differentiators step. Divergence is recorded, not thrown.
SimulationRecord run_scenario(const ScenarioConfig& config);

/// Sample-wise norms over every recorded grid point; estimator errors are
/// measured against the simulator-side truths carried in the record.
MetricsReport compute_metrics(const SimulationRecord& record);

struct TableResult {
    int example = 1;
    std::vector<ControllerVariant> cases;
    std::vector<SimulationRecord> records;
    std::vector<MetricsReport> reports;
    std::string text;  // aligned table
    std::string csv;   // machine-readable form
    bool all_converged = true;
};

/// Runs the three cases of the chosen experiment and renders the metric
/// table; a diverged case is reported in its row.
TableResult run_table(int example);

/// One row per grid point with the fixed column order
///   t, x_1..x_n, y, r, eps, v, w, u, delta_w, lambda_1..lambda_n,
///   theta_hat_1..theta_hat_q, D_hat, p_hat
/// Cells a variant lacks stay blank. Full round-trip precision.
void export_csv(const SimulationRecord& record, const std::filesystem::path& path);

/// Recomputes the metric report from an exported CSV (same summation order,
/// so the result is bit-identical to compute_metrics on the source record).
MetricsReport metrics_from_csv(const std::filesystem::path& path,
                               std::span<const double> theta_true, std::optional<double> p_true,
                               std::optional<double> d_bound_bar);

/// Oracle bundle: GL weights vs log-Gamma, Caputo closed forms, the
/// Mittag-Leffler solver check, exponent additivity, diffusive-vs-GL
/// cross-check, and the actuator decomposition identities. Prints one line
/// per check; returns true when everything passed.
bool verify(std::ostream& out);

/// Strict JSON scenario file: unknown keys are errors.
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace focs
