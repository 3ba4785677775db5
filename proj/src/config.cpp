#include "unhap/config.hpp"

#include <initializer_list>

#include "unhap/io.hpp"

namespace unhap {

using nlohmann::json;

std::string_view to_string(NllPolicy policy) { return policy == NllPolicy::Mixture ? "mixture" : "hawkes-only"; }

NllPolicy parse_nll_policy(std::string_view name) {
    if (name == "mixture") return NllPolicy::Mixture;
    if (name == "hawkes-only") return NllPolicy::HawkesOnly;
    throw ConfigError("unknown nll policy '" + std::string(name) + "'");
}

namespace {

void allow_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ConfigError("config section '" + std::string(section) + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = false;
        for (auto k : keys) known = known || key == k;
        if (!known) throw ConfigError("unknown config key '" + std::string(section) + "." + key + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    try {
        allow_keys(j, "<root>", {"seed", "simulation", "model", "solver", "init", "metrics", "paths"});
        read(j, "seed", c.seed);
        c.solver.seed = c.seed;
        c.solver.init.seed = c.seed;

        if (j.contains("simulation")) {
            const json& s = j.at("simulation");
            allow_keys(s, "simulation", {"T", "mu", "mu_tilde", "kernel", "marks"});
            read(s, "T", c.simulation.T);
            read(s, "mu", c.simulation.mu);
            read(s, "mu_tilde", c.simulation.mu_tilde);
            read(s, "marks", c.simulation.marks);
            if (s.contains("kernel")) c.simulation.kernel = io::kernel_from_json(s.at("kernel"));
        }
        if (j.contains("model")) {
            const json& m = j.at("model");
            allow_keys(m, "model", {"marks", "kernel_family", "W"});
            read(m, "marks", c.model.marks);
            if (m.contains("kernel_family")) c.solver.family = parse_kernel_family(m.at("kernel_family").get<std::string>());
            read(m, "W", c.solver.W);
        }
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            allow_keys(s, "solver",
                       {"mode", "n_iter", "b", "step", "step_theta", "step_shape", "shape_trust", "step_rho",
                        "e_inner_steps", "max_halvings"});
            if (s.contains("mode")) c.solver.mode = parse_fit_mode(s.at("mode").get<std::string>());
            read(s, "n_iter", c.solver.n_iter);
            read(s, "b", c.solver.b);
            read(s, "step", c.solver.step);
            read(s, "step_theta", c.solver.step_theta);
            read(s, "step_shape", c.solver.step_shape);
            read(s, "shape_trust", c.solver.shape_trust);
            read(s, "step_rho", c.solver.step_rho);
            read(s, "e_inner_steps", c.solver.e_inner_steps);
            read(s, "max_halvings", c.solver.max_halvings);
        }
        if (j.contains("init")) {
            const json& s = j.at("init");
            allow_keys(s, "init", {"scheme", "seed", "rho_init", "deltat_window"});
            if (s.contains("scheme")) c.solver.init.scheme = parse_init_scheme(s.at("scheme").get<std::string>());
            if (s.contains("rho_init")) c.solver.init.rho_init = parse_rho_init(s.at("rho_init").get<std::string>());
            if (s.contains("deltat_window"))
                c.solver.init.window = parse_delay_window(s.at("deltat_window").get<std::string>());
            if (s.contains("seed")) {
                c.solver.init.seed = s.at("seed").get<std::uint64_t>();
                c.init_seed_explicit = true;
            }
        }
        if (j.contains("metrics")) {
            const json& s = j.at("metrics");
            allow_keys(s, "metrics", {"nll_policy", "param_coords"});
            if (s.contains("nll_policy")) c.metrics.nll_policy = parse_nll_policy(s.at("nll_policy").get<std::string>());
            read(s, "param_coords", c.metrics.param_coords);
        }
        if (j.contains("paths")) {
            const json& s = j.at("paths");
            allow_keys(s, "paths", {"events", "truth", "fit", "test_events"});
            c.paths.events = optional_string(s, "events");
            c.paths.truth = optional_string(s, "truth");
            c.paths.fit = optional_string(s, "fit");
            c.paths.test_events = optional_string(s, "test_events");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
    if (!(c.simulation.T > 0)) throw ConfigError("simulation.T must be > 0");
    if (!(c.simulation.mu >= 0) || !(c.simulation.mu_tilde >= 0)) throw ConfigError("baselines must be >= 0");
    c.solver.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return from_json(io::read_json(path)); }

json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["simulation"] = {{"T", simulation.T},
                       {"mu", simulation.mu},
                       {"mu_tilde", simulation.mu_tilde},
                       {"kernel", io::kernel_to_json(simulation.kernel)},
                       {"marks", simulation.marks}};
    j["model"] = {{"marks", model.marks},
                  {"kernel_family", std::string(unhap::to_string(solver.family))},
                  {"W", solver.W}};
    j["solver"] = {{"mode", std::string(unhap::to_string(solver.mode))},
                   {"n_iter", solver.n_iter},
                   {"b", solver.b},
                   {"step", solver.step},
                   {"step_theta", solver.step_theta},
                   {"step_shape", solver.step_shape},
                   {"shape_trust", solver.shape_trust},
                   {"step_rho", solver.step_rho},
                   {"e_inner_steps", solver.e_inner_steps},
                   {"max_halvings", solver.max_halvings}};
    j["init"] = {{"scheme", std::string(unhap::to_string(solver.init.scheme))},
                 {"seed", solver.init.seed},
                 {"rho_init", std::string(unhap::to_string(solver.init.rho_init))},
                 {"deltat_window", std::string(unhap::to_string(solver.init.window))}};
    json m = {{"param_coords", metrics.param_coords}};
    if (metrics.nll_policy) m["nll_policy"] = std::string(unhap::to_string(*metrics.nll_policy));
    j["metrics"] = m;
    json p = json::object();
    auto put = [&p](const char* key, const std::optional<std::string>& v) { if (v) p[key] = *v; };
    put("events", paths.events);
    put("truth", paths.truth);
    put("fit", paths.fit);
    put("test_events", paths.test_events);
    j["paths"] = p;
    return j;
}

std::string RunConfig::hash() const { return io::sha256_hex(to_json().dump()); }

void RunConfig::override_seed(std::uint64_t s) {
    seed = s;
    solver.seed = s;
    if (!init_seed_explicit) solver.init.seed = s;
}

}  // namespace unhap
