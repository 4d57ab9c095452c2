// Command-line front end: closed-loop runs from a JSON scenario file, the two
// experiment metric tables, and the numerical self-check bundle.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "focs/harness.hpp"

namespace fs = std::filesystem;

namespace {

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    return dir;
}

void print_metrics(std::ostream& os, const focs::MetricsReport& rep) {
    os << "||eps||_max   = " << rep.eps_max << "\n"
       << "||eps||_2     = " << rep.eps_l2 << "\n"
       << "||theta~||_2  = " << rep.theta_err_l2 << "\n";
    if (rep.p_err_l2) os << "||p~||_2      = " << *rep.p_err_l2 << "\n";
    if (rep.d_err_l2) os << "||D~||_2      = " << *rep.d_err_l2 << "\n";
    os << "||u||_2       = " << rep.u_l2 << "\n"
       << "norm convention: sample-wise sqrt(sum s_k^2), h = " << rep.h << ", t in [0, "
       << rep.horizon << "]\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
    const focs::ScenarioConfig config = focs::load_config(config_path);
    const fs::path dir = ensure_out_dir(out);
    const focs::SimulationRecord rec = focs::run_scenario(config);
    const fs::path csv = dir / config.csv_name.value_or("run.csv");
    focs::export_csv(rec, csv);
    std::cout << "variant: " << focs::variant_name(rec.variant) << "\n"
              << "samples: " << rec.samples() << "\n"
              << "trajectory: " << csv.string() << "\n";
    if (rec.diverged_at) {
        std::cout << "DIVERGED at step " << *rec.diverged_at
                  << " (t = " << rec.grid.t(*rec.diverged_at)
                  << "); record holds the last finite samples\n";
        return 1;
    }
    const focs::MetricsReport rep = focs::compute_metrics(rec);
    print_metrics(std::cout, rep);
    std::ofstream mf(dir / "metrics.txt");
    print_metrics(mf, rep);
    return 0;
}

int cmd_table(int example, const std::string& out) {
    const focs::TableResult table = focs::run_table(example);
    std::cout << table.text;
    const fs::path dir = ensure_out_dir(out);
    const std::string stem = "table_example" + std::to_string(example);
    std::ofstream(dir / (stem + ".txt")) << table.text;
    std::ofstream(dir / (stem + ".csv")) << table.csv;
    for (std::size_t i = 0; i < table.records.size(); ++i) {
        const std::string name =
            stem + "_" + focs::variant_name(table.cases[i]) + ".csv";
        focs::export_csv(table.records[i], dir / name);
    }
    return table.all_converged ? 0 : 1;
}

int cmd_verify(const std::string& out) {
    const bool ok = focs::verify(std::cout);
    if (!out.empty()) {
        std::ofstream f(ensure_out_dir(out) / "verify.txt");
        focs::verify(f);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"focs: fractional-order adaptive backstepping control simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int example = 1;

    CLI::App* sim = app.add_subcommand("simulate", "run one closed-loop scenario from a JSON file");
    sim->add_option("config", config_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "output directory");

    CLI::App* tab = app.add_subcommand("table", "run one experiment's three cases and print the metric table");
    tab->add_option("--example", example, "experiment number")->required()->check(CLI::Range(1, 2));
    tab->add_option("--out", out_dir, "output directory");

    CLI::App* ver = app.add_subcommand("verify", "run the numerical oracle self-checks");
    ver->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (tab->parsed()) return cmd_table(example, out_dir);
        if (ver->parsed()) return cmd_verify(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
