// corrnoise: command-line front end for the reproduction scenarios.
//
//   corrnoise <scenario> [--config file.json] [--family F] [--n N] [--xi X] ...
//
// Exit codes: 0 success, 1 tolerance breach, 2 invalid configuration, 3 I/O.

#include "corrnoise/scenarios.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using corrnoise::RunConfig;

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> family;
    std::optional<int> n;
    std::optional<double> xi;
    std::optional<double> gamma;
    std::optional<std::string> regime;
    std::optional<double> t_lo;
    std::optional<double> t_hi;
    std::optional<int> t_points;
    std::optional<bool> t_log;
    std::optional<long long> shots;
    std::optional<int> seeds;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

void add_options(CLI::App &cmd, Overrides &o) {
    cmd.add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd.add_option("--family", o.family, "single | two | nqb | file:<path>");
    cmd.add_option("--n", o.n, "number of qubits");
    cmd.add_option("--xi", o.xi, "noise-correlation parameter");
    cmd.add_option("--gamma", o.gamma, "rate scale (sets the time unit)");
    cmd.add_option("--regime", o.regime, "shot | time");
    cmd.add_option("--t-grid-lo", o.t_lo, "first time of the grid");
    cmd.add_option("--t-grid-hi", o.t_hi, "last time of the grid");
    cmd.add_option("--t-grid-points", o.t_points, "number of grid points");
    cmd.add_option("--t-grid-log-spaced", o.t_log, "log-spaced grid (true/false)");
    cmd.add_option("--shots", o.shots, "measurement repetitions M");
    cmd.add_option("--seeds", o.seeds, "number of Monte Carlo replicates");
    cmd.add_option("--seed", o.seed, "base seed");
    cmd.add_option("--out", o.out, "output CSV path (stdout when absent)");
    cmd.add_option("--threads", o.threads, "worker threads (default: CORRNOISE_THREADS or all cores)");
}

void apply_json(RunConfig &c, const nlohmann::json &j) {
    if (!j.is_object()) {
        throw corrnoise::InvalidArgument("config: top level must be a JSON object");
    }
    for (const auto &[key, value] : j.items()) {
        if (key == "scenario") {
            if (value.get<std::string>() != c.scenario) {
                throw corrnoise::InvalidArgument("config: scenario '" + value.get<std::string>() +
                                                 "' does not match subcommand '" + c.scenario + "'");
            }
        } else if (key == "family") {
            c.family = value.get<std::string>();
        } else if (key == "n") {
            c.n = value.get<int>();
        } else if (key == "xi") {
            c.xi = value.get<double>();
        } else if (key == "gamma") {
            c.gamma = value.get<double>();
        } else if (key == "regime") {
            c.regime = corrnoise::parse_regime(value.get<std::string>());
        } else if (key == "t_grid") {
            c.t_grid.lo = value.value("lo", c.t_grid.lo);
            c.t_grid.hi = value.value("hi", c.t_grid.hi);
            c.t_grid.points = value.value("points", c.t_grid.points);
            c.t_grid.log_spaced = value.value("log_spaced", c.t_grid.log_spaced);
        } else if (key == "shots") {
            c.shots = value.get<std::int64_t>();
        } else if (key == "seeds") {
            c.seeds = value.get<int>();
        } else if (key == "seed") {
            c.seed = value.get<std::uint64_t>();
        } else if (key == "out") {
            c.out = value.get<std::string>();
        } else if (key == "threads") {
            c.threads = corrnoise::resolve_threads(value.get<int>());
        } else {
            throw corrnoise::InvalidArgument("config: unknown field '" + key + "'");
        }
    }
}

RunConfig build_config(const std::string &scenario, const Overrides &o) {
    RunConfig c;
    c.scenario = scenario;
    c.threads = corrnoise::resolve_threads();
    if (o.config_path) {
        std::ifstream in(*o.config_path);
        if (!in) {
            throw corrnoise::IoError("cannot open config file '" + *o.config_path + "'");
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception &e) {
            throw corrnoise::InvalidArgument("config '" + *o.config_path + "': " + e.what());
        }
        apply_json(c, j);
    }
    if (o.family) c.family = *o.family;
    if (o.n) c.n = *o.n;
    if (o.xi) c.xi = *o.xi;
    if (o.gamma) c.gamma = *o.gamma;
    if (o.regime) c.regime = corrnoise::parse_regime(*o.regime);
    if (o.t_lo) c.t_grid.lo = *o.t_lo;
    if (o.t_hi) c.t_grid.hi = *o.t_hi;
    if (o.t_points) c.t_grid.points = *o.t_points;
    if (o.t_log) c.t_grid.log_spaced = *o.t_log;
    if (o.shots) c.shots = *o.shots;
    if (o.seeds) c.seeds = *o.seeds;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.threads) c.threads = corrnoise::resolve_threads(*o.threads);
    if (!(c.gamma > 0.0)) {
        throw corrnoise::InvalidArgument("gamma must be positive");
    }
    if (c.family == "single") {
        c.n = 1;
    } else if (c.family == "two") {
        c.n = 2;
    }
    return c;
}

void emit(const RunConfig &c, const std::string &csv) {
    if (c.out.empty()) {
        std::cout << csv << std::flush;
        return;
    }
    std::ofstream out(c.out, std::ios::binary);
    if (!out) {
        throw corrnoise::IoError("cannot open output file '" + c.out + "'");
    }
    out << csv;
    out.flush();
    if (!out) {
        throw corrnoise::IoError("write failed for '" + c.out + "'");
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum Fisher information under spatially correlated dephasing"};
    app.require_subcommand(1);
    Overrides overrides;
    for (const char *name : corrnoise::kScenarioNames) {
        add_options(*app.add_subcommand(name, std::string("run the ") + name + " scenario"),
                    overrides);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return corrnoise::kExitInvalidConfig;
    }
    const std::string scenario = app.get_subcommands().front()->get_name();
    try {
        const RunConfig config = build_config(scenario, overrides);
        const corrnoise::ScenarioOutput result = corrnoise::run_scenario(config);
        emit(config, result.csv);
        if (result.exit_code == corrnoise::kExitTolerance) {
            std::cerr << "corrnoise " << scenario << ": tolerance check failed\n";
        }
        return result.exit_code;
    } catch (const corrnoise::IoError &e) {
        std::cerr << "corrnoise " << scenario << ": " << e.what() << '\n';
        return corrnoise::kExitIo;
    } catch (const corrnoise::ConvergenceError &e) {
        std::cerr << "corrnoise " << scenario << ": " << e.what() << '\n';
        return corrnoise::kExitTolerance;
    } catch (const corrnoise::Error &e) {
        std::cerr << "corrnoise " << scenario << ": " << e.what() << '\n';
        return corrnoise::kExitInvalidConfig;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "corrnoise " << scenario << ": config: " << e.what() << '\n';
        return corrnoise::kExitInvalidConfig;
    }
}
