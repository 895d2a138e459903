#include "cli_internal.hpp"

#include "refugia/errors.hpp"
#include "refugia/sweep.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>
#include <type_traits>
#include <unistd.h>

namespace refugia::cli {

namespace {

using nlohmann::json;

template <class Ref>
ConfigKey make_key(const char* name, const char* help, Ref ref)
{
    using T = std::remove_reference_t<std::invoke_result_t<Ref, RunConfig&>>;
    ConfigKey k;
    k.name = name;
    k.help = help;
    if constexpr (std::is_same_v<T, double>)
        k.type = ValueType::Real;
    else if constexpr (std::is_same_v<T, int>)
        k.type = ValueType::Integer;
    else if constexpr (std::is_same_v<T, bool>)
        k.type = ValueType::Boolean;
    else
        k.type = ValueType::Text;
    k.get = [ref](const RunConfig& c) { return json(ref(const_cast<RunConfig&>(c))).dump(); };
    k.set = [ref, name](RunConfig& c, const std::string& text) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception&) {
            throw ConfigError(std::string("config key '") + name + "': malformed value");
        }
        if constexpr (std::is_same_v<T, double>) {
            if (!j.is_number())
                throw ConfigError(std::string("config key '") + name + "': expected a number");
            ref(c) = j.get<double>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!j.is_number_integer())
                throw ConfigError(std::string("config key '") + name + "': expected an integer");
            ref(c) = j.get<int>();
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!j.is_boolean())
                throw ConfigError(std::string("config key '") + name + "': expected true or false");
            ref(c) = j.get<bool>();
        } else {
            if (!j.is_string())
                throw ConfigError(std::string("config key '") + name + "': expected a string");
            ref(c) = j.get<std::string>();
        }
    };
    return k;
}

std::vector<ConfigKey> build_keys()
{
    return {
        make_key("r", "intrinsic prey growth rate", [](RunConfig& c) -> auto& { return c.params.r; }),
        make_key("k", "carrying capacity", [](RunConfig& c) -> auto& { return c.params.k; }),
        make_key("alpha", "attack coefficient", [](RunConfig& c) -> auto& { return c.params.alpha; }),
        make_key("m", "refuge fraction in [0, 1)", [](RunConfig& c) -> auto& { return c.params.m; }),
        make_key("h", "handling time", [](RunConfig& c) -> auto& { return c.params.h; }),
        make_key("theta", "conversion efficiency", [](RunConfig& c) -> auto& { return c.params.theta; }),
        make_key("d", "predator death rate", [](RunConfig& c) -> auto& { return c.params.d; }),
        make_key("tau1", "prey feedback delay", [](RunConfig& c) -> auto& { return c.params.tau1; }),
        make_key("tau2", "gestation delay", [](RunConfig& c) -> auto& { return c.params.tau2; }),
        make_key("phi_x", "initial prey history", [](RunConfig& c) -> auto& { return c.phi.x; }),
        make_key("phi_y", "initial predator history", [](RunConfig& c) -> auto& { return c.phi.y; }),
        make_key("horizon", "simulated time", [](RunConfig& c) -> auto& { return c.horizon; }),
        make_key("step", "integration step", [](RunConfig& c) -> auto& { return c.step; }),
        make_key("every", "simulate: write every n-th sample", [](RunConfig& c) -> auto& { return c.every; }),
        make_key("clamp_negative", "clamp negative states to zero", [](RunConfig& c) -> auto& { return c.clamp_negative; }),
        make_key("transient", "discarded time before diagnostics", [](RunConfig& c) -> auto& { return c.diag.transient; }),
        make_key("record", "diagnostic window after the transient", [](RunConfig& c) -> auto& { return c.diag.record; }),
        make_key("rel_tol", "peak clustering tolerance (relative)", [](RunConfig& c) -> auto& { return c.diag.rel_tol; }),
        make_key("eps_fp", "fixed-point amplitude threshold (relative)", [](RunConfig& c) -> auto& { return c.diag.eps_fp; }),
        make_key("lle_threshold", "chaos threshold on the largest exponent", [](RunConfig& c) -> auto& { return c.diag.lle_threshold; }),
        make_key("cluster_cap", "largest period reported as PeriodicN", [](RunConfig& c) -> auto& { return c.diag.cluster_cap; }),
        make_key("ortho_interval", "time between re-orthonormalizations", [](RunConfig& c) -> auto& { return c.diag.ortho_interval; }),
        make_key("lyapunov_transient", "lyapunov: discarded time", [](RunConfig& c) -> auto& { return c.lyapunov_transient; }),
        make_key("window", "lyapunov: averaging window", [](RunConfig& c) -> auto& { return c.window; }),
        make_key("n_exp", "lyapunov: number of exponents", [](RunConfig& c) -> auto& { return c.n_exp; }),
        make_key("case", "critical: delay case 2, 3, 4 or 5", [](RunConfig& c) -> auto& { return c.case_id; }),
        make_key("n_max", "critical: branches per frequency", [](RunConfig& c) -> auto& { return c.n_max; }),
        make_key("axis", "bifurcation/refuge: tau1, tau2 or m", [](RunConfig& c) -> auto& { return c.axis; }),
        make_key("lo", "bifurcation/refuge: axis start", [](RunConfig& c) -> auto& { return c.lo; }),
        make_key("hi", "bifurcation/refuge: axis end", [](RunConfig& c) -> auto& { return c.hi; }),
        make_key("n", "bifurcation/refuge: number of points", [](RunConfig& c) -> auto& { return c.n; }),
        make_key("tau1_lo", "region: tau1 start", [](RunConfig& c) -> auto& { return c.tau1_lo; }),
        make_key("tau1_hi", "region: tau1 end", [](RunConfig& c) -> auto& { return c.tau1_hi; }),
        make_key("tau1_n", "region: tau1 points", [](RunConfig& c) -> auto& { return c.tau1_n; }),
        make_key("tau2_lo", "region: tau2 start", [](RunConfig& c) -> auto& { return c.tau2_lo; }),
        make_key("tau2_hi", "region: tau2 end", [](RunConfig& c) -> auto& { return c.tau2_hi; }),
        make_key("tau2_n", "region: tau2 points", [](RunConfig& c) -> auto& { return c.tau2_n; }),
        make_key("continuation", "warm-start scan points from their neighbour", [](RunConfig& c) -> auto& { return c.continuation; }),
        make_key("threads", "sweep workers (0 = all cores)", [](RunConfig& c) -> auto& { return c.threads; }),
        make_key("output", "output file (default stdout)", [](RunConfig& c) -> auto& { return c.output; }),
        make_key("outdir", "figure: output directory", [](RunConfig& c) -> auto& { return c.outdir; }),
    };
}

void check(bool ok, const char* key, const std::string& rule)
{
    if (!ok)
        throw ConfigError(std::string("config key '") + key + "': " + rule);
}

} // namespace

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = build_keys();
    return keys;
}

const ConfigKey& find_key(std::string_view name)
{
    for (const auto& k : config_keys())
        if (k.name == name)
            return k;
    throw ConfigError("unknown config key '" + std::string(name) + "'");
}

void RunConfig::validate() const
{
    params.validate();
    check(phi.x > 0.0 && std::isfinite(phi.x), "phi_x", "must be positive");
    check(phi.y > 0.0 && std::isfinite(phi.y), "phi_y", "must be positive");
    check(horizon > 0.0 && std::isfinite(horizon), "horizon", "must be positive");
    check(step > 0.0 && std::isfinite(step), "step", "must be positive");
    check(every >= 1, "every", "must be >= 1");
    diag.validate();
    check(lyapunov_transient >= 0.0, "lyapunov_transient", "must be non-negative");
    check(window > 0.0, "window", "must be positive");
    check(n_exp >= 1, "n_exp", "must be >= 1");
    check(case_id >= 2 && case_id <= 5, "case", "must be 2, 3, 4 or 5");
    check(n_max >= 0, "n_max", "must be >= 0");
    parse_axis_name(axis);
    check(lo < hi, "lo", "must be below hi");
    check(n >= 2, "n", "must be >= 2");
    check(tau1_lo >= 0.0 && tau1_lo < tau1_hi, "tau1_lo", "need 0 <= tau1_lo < tau1_hi");
    check(tau2_lo >= 0.0 && tau2_lo < tau2_hi, "tau2_lo", "need 0 <= tau2_lo < tau2_hi");
    check(tau1_n >= 2, "tau1_n", "must be >= 2");
    check(tau2_n >= 2, "tau2_n", "must be >= 2");
    check(threads >= 0, "threads", "must be >= 0");
}

std::string dump_config(const RunConfig& cfg)
{
    json j = json::object();
    for (const auto& k : config_keys())
        j[k.name] = json::parse(k.get(cfg));
    return j.dump(2) + "\n";
}

RunConfig parse_config(std::string_view json_text, RunConfig base)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        find_key(key).set(base, value.dump());
    return base;
}

void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::filesystem::create_directories(dir);
    const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw ConfigError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot move output into '" + path.string() + "'");
    }
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace refugia::cli
