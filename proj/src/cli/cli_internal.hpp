#pragma once

#include "refugia/cli.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace refugia::cli {

enum class ValueType { Real, Integer, Boolean, Text };

struct ConfigKey {
    std::string name;
    std::string help;
    ValueType type = ValueType::Real;
    std::function<std::string(const RunConfig&)> get;            ///< JSON text
    std::function<void(RunConfig&, const std::string&)> set;     ///< from JSON text
};

const std::vector<ConfigKey>& config_keys();
const ConfigKey& find_key(std::string_view name);

/// Where a command's main text goes: a file (atomically) or the console.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text);

std::string cmd_equilibrium(const RunConfig& cfg);
std::string cmd_critical(const RunConfig& cfg);
std::string cmd_hopf(const RunConfig& cfg);
std::string cmd_simulate(const RunConfig& cfg);
std::string cmd_lyapunov(const RunConfig& cfg);
std::string cmd_bifurcation(const RunConfig& cfg);
/// Second element: overlay CSV.
std::pair<std::string, std::string> cmd_region(const RunConfig& cfg);
std::string cmd_refuge(const RunConfig& cfg);

/// Writes the figure files under cfg.outdir and returns a summary.
std::string cmd_figure(const RunConfig& cfg, int number);

} // namespace refugia::cli
