#pragma once

#include "refugia/diagnostics.hpp"
#include "refugia/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace refugia::cli {

/// Every option of every subcommand. JSON keys and flag names coincide.
struct RunConfig {
    ModelParams params;
    State phi{30.0, 5.83};
    double horizon = 500.0;
    double step = 0.005;
    int every = 1; ///< simulate: keep every n-th node
    bool clamp_negative = false;
    DiagnosticSettings diag;
    double lyapunov_transient = 500.0;
    double window = 2000.0;
    int n_exp = 1;
    int case_id = 2;
    int n_max = 3;
    std::string axis = "tau2";
    double lo = 0.25;
    double hi = 0.70;
    int n = 400;
    double tau1_lo = 0.0;
    double tau1_hi = 1.0;
    int tau1_n = 100;
    double tau2_lo = 0.0;
    double tau2_hi = 1.0;
    int tau2_n = 100;
    bool continuation = false;
    int threads = 0;
    std::string output;
    std::string outdir = "figures";

    /// Throws ConfigError naming the offending key.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

std::string dump_config(const RunConfig& cfg);

/// Overlays the keys of a JSON object onto base. Unknown keys and type
/// mismatches raise ConfigError.
RunConfig parse_config(std::string_view json_text, RunConfig base = {});

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// 17 significant digits; "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace refugia::cli
