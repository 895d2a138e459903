#include "cli_internal.hpp"

#include "refugia/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace refugia::cli {

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Command-line text for a key becomes JSON text; strings get quoted.
std::string flag_to_json(const ConfigKey& key, const std::string& text)
{
    if (key.type != ValueType::Text)
        return text;
    std::string quoted = "\"";
    for (char ch : text) {
        if (ch == '"' || ch == '\\')
            quoted += '\\';
        quoted += ch;
    }
    return quoted + "\"";
}

int dispatch(const std::string& name, const RunConfig& cfg, int figure, std::ostream& out)
{
    if (name == "equilibrium")
        emit(cfg, out, cmd_equilibrium(cfg));
    else if (name == "critical")
        emit(cfg, out, cmd_critical(cfg));
    else if (name == "hopf")
        emit(cfg, out, cmd_hopf(cfg));
    else if (name == "simulate")
        emit(cfg, out, cmd_simulate(cfg));
    else if (name == "lyapunov")
        emit(cfg, out, cmd_lyapunov(cfg));
    else if (name == "bifurcation")
        emit(cfg, out, cmd_bifurcation(cfg));
    else if (name == "region") {
        auto [cells, overlay] = cmd_region(cfg);
        if (cfg.output.empty()) {
            out << cells << "\n" << overlay;
        } else {
            write_atomic(cfg.output, cells);
            write_atomic(cfg.output + ".overlay.csv", overlay);
        }
    } else if (name == "refuge")
        emit(cfg, out, cmd_refuge(cfg));
    else if (name == "figure")
        out << cmd_figure(cfg, figure);
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Delayed predator-prey model with prey refuge: stability, Hopf analysis and simulation"};
    app.require_subcommand(0, 1);
    // "-h" would clash with the handling-time key "--h".
    app.set_help_flag("--help", "print this help and exit");

    std::string config_path;
    bool dump = false;
    app.add_option("--config", config_path, "JSON file with flat configuration keys");
    app.add_flag("--dump-config", dump, "print the merged configuration as JSON and exit");

    std::map<std::string, std::string> flags;
    for (const auto& key : config_keys())
        app.add_option("--" + key.name, flags[key.name], key.help);

    int figure = 0;
    const std::vector<std::pair<const char*, const char*>> commands = {
        {"equilibrium", "interior equilibrium, feasibility, persistence and undelayed stability"},
        {"critical", "critical delays for --case 2, 3, 4 or 5"},
        {"hopf", "direction and stability of the Hopf bifurcation in tau1 at fixed --tau2"},
        {"simulate", "trajectory CSV"},
        {"lyapunov", "Lyapunov spectrum CSV"},
        {"bifurcation", "one-dimensional scan CSV"},
        {"region", "two-dimensional delay-plane scan CSV"},
        {"refuge", "critical delays against the refuge fraction"},
        {"figure", "reproduce figure N (1..10): CSV files and plot scripts"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        if (std::string(name) == "figure")
            sub->add_option("N", figure, "figure number")->required()->check(CLI::Range(1, 10));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = parse_config(read_file(config_path), cfg);
        for (const auto& key : config_keys()) {
            if (app.count("--" + key.name) == 0)
                continue;
            key.set(cfg, flag_to_json(key, flags[key.name]));
        }
        cfg.validate();
        if (dump) {
            out << dump_config(cfg) << "\n";
            return 0;
        }
        const auto subs = app.get_subcommands();
        if (subs.empty()) {
            out << app.help();
            return 0;
        }
        return dispatch(subs.front()->get_name(), cfg, figure, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace refugia::cli
