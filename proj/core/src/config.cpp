#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "focs/harness.hpp"

namespace focs {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw std::invalid_argument("config: unknown key \"" + item.key() + "\" in " + where);
}

std::vector<double> as_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw std::invalid_argument("config: " + where + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

TimeGrid parse_grid(const json& j) {
    require_keys(j, "grid", {"t0", "h", "steps", "horizon"});
    const double t0 = j.value("t0", 0.0);
    const double h = j.value("h", 1e-3);
    if (j.contains("steps") && j.contains("horizon"))
        throw std::invalid_argument("config: grid takes steps or horizon, not both");
    std::size_t steps = 20000;
    if (j.contains("steps")) {
        steps = j.at("steps").get<std::size_t>();
    } else if (j.contains("horizon")) {
        const double horizon = j.at("horizon").get<double>();
        if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
        steps = static_cast<std::size_t>(std::llround(horizon / h));
    }
    return TimeGrid(t0, h, steps);
}

ReferenceSpec parse_reference(const json& j) {
    require_keys(j, "reference", {"kind", "amplitude", "omega"});
    ReferenceSpec spec;
    const std::string kind = j.value("kind", std::string("preset"));
    if (kind == "preset")
        spec.kind = ReferenceSpec::Kind::preset;
    else if (kind == "zero")
        spec.kind = ReferenceSpec::Kind::zero;
    else if (kind == "sinusoid")
        spec.kind = ReferenceSpec::Kind::sinusoid;
    else
        throw std::invalid_argument("config: unknown reference kind \"" + kind + "\"");
    spec.amplitude = j.value("amplitude", 1.0);
    spec.angular_frequency = j.value("omega", 2.0);
    return spec;
}

NonsmoothActuator parse_actuator(const json& j) {
    require_keys(j, "actuator", {"m", "u_up", "u_low", "b_r", "b_l"});
    for (const char* key : {"m", "u_up", "u_low", "b_r", "b_l"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("config: actuator needs key \"") + key + "\"");
    return NonsmoothActuator::checked(j.at("m").get<double>(), j.at("u_up").get<double>(),
                                      j.at("u_low").get<double>(), j.at("b_r").get<double>(),
                                      j.at("b_l").get<double>());
}

void parse_controller(const json& j, ControllerConfig& cfg) {
    require_keys(j, "controller",
                 {"c", "a", "sigma", "mu", "beta", "rho", "gamma", "lambda", "xi", "eta",
                  "theta0", "d0", "p0", "sign_gain", "hard_dhat_sign", "p_floor", "fotd"});
    if (j.contains("c")) cfg.c = as_vector(j.at("c"), "controller.c");
    if (j.contains("a")) cfg.a = as_vector(j.at("a"), "controller.a");
    if (j.contains("sigma")) cfg.sigma = as_vector(j.at("sigma"), "controller.sigma");
    if (j.contains("mu")) cfg.mu = as_vector(j.at("mu"), "controller.mu");
    if (j.contains("beta")) cfg.estimator.beta = j.at("beta").get<double>();
    if (j.contains("rho")) cfg.estimator.rho = j.at("rho").get<double>();
    if (j.contains("gamma")) cfg.estimator.gamma = j.at("gamma").get<double>();
    if (j.contains("lambda")) {
        const json& lam = j.at("lambda");
        if (lam.is_number()) {
            cfg.estimator.lambda_gain = {lam.get<double>()};
        } else if (lam.is_array()) {
            cfg.estimator.lambda_gain.clear();
            for (const auto& row : lam) {
                if (!row.is_array())
                    throw std::invalid_argument("config: controller.lambda must be a matrix or scalar");
                for (const auto& v : row) cfg.estimator.lambda_gain.push_back(v.get<double>());
            }
        } else {
            throw std::invalid_argument("config: controller.lambda must be a matrix or scalar");
        }
    }
    if (j.contains("xi")) cfg.estimator.xi = j.at("xi").get<double>();
    if (j.contains("eta")) cfg.estimator.eta = j.at("eta").get<double>();
    if (j.contains("theta0")) cfg.theta0 = as_vector(j.at("theta0"), "controller.theta0");
    if (j.contains("d0")) cfg.d0 = j.at("d0").get<double>();
    if (j.contains("p0")) cfg.p0 = j.at("p0").get<double>();
    if (j.contains("sign_gain")) cfg.sign_gain = j.at("sign_gain").get<double>();
    if (j.contains("hard_dhat_sign")) cfg.hard_dhat_sign = j.at("hard_dhat_sign").get<bool>();
    if (j.contains("p_floor")) cfg.p_floor = j.at("p_floor").get<double>();
    if (j.contains("fotd")) {
        const json& f = j.at("fotd");
        require_keys(f, "controller.fotd", {"r1", "r2"});
        if (f.contains("r1")) cfg.fotd.r1 = f.at("r1").get<double>();
        if (f.contains("r2")) cfg.fotd.r2 = f.at("r2").get<double>();
    }
}

void parse_overrides(const json& j, PlantOverrides& ov) {
    require_keys(j, "overrides", {"b", "theta", "x0", "disturbance_scale"});
    if (j.contains("b")) ov.b = j.at("b").get<double>();
    if (j.contains("theta")) ov.theta = as_vector(j.at("theta"), "overrides.theta");
    if (j.contains("x0")) ov.x0 = as_vector(j.at("x0"), "overrides.x0");
    if (j.contains("disturbance_scale"))
        ov.disturbance_scale = j.at("disturbance_scale").get<double>();
}

}  // namespace

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("load_config: " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("load_config: top level must be an object");
    require_keys(j, "top level",
                 {"preset", "variant", "grid", "reference", "actuator", "controller", "overrides",
                  "seed", "output"});
    if (!j.contains("variant"))
        throw std::invalid_argument("config: \"variant\" is required");
    const ControllerVariant variant = variant_from_name(j.at("variant").get<std::string>());

    // Start from the matching experiment preset so gains default to the
    // published values, then overlay the file's fields.
    ScenarioConfig config =
        uses_known_gain(variant) ? example1_case(variant) : example2_case(variant);
    if (j.contains("preset")) config.preset = j.at("preset").get<std::string>();
    if (j.contains("grid")) config.grid = parse_grid(j.at("grid"));
    if (j.contains("reference")) config.reference = parse_reference(j.at("reference"));
    if (j.contains("actuator")) config.actuator = parse_actuator(j.at("actuator"));
    if (j.contains("controller")) parse_controller(j.at("controller"), config.controller);
    if (j.contains("overrides")) parse_overrides(j.at("overrides"), config.overrides);
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) {
        const json& out = j.at("output");
        require_keys(out, "output", {"csv"});
        if (out.contains("csv")) config.csv_name = out.at("csv").get<std::string>();
    }
    return config;
}

}  // namespace focs
