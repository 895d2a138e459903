#include "cli_internal.hpp"

#include "refugia/diagnostics.hpp"
#include "refugia/errors.hpp"

#include <filesystem>
#include <sstream>
#include <vector>

namespace refugia::cli {

namespace fs = std::filesystem;

namespace {

/// Collects the files one figure produces and reports them at the end.
class FigureWriter {
public:
    FigureWriter(const RunConfig& cfg, int number) : dir_(cfg.outdir), prefix_("fig" + std::to_string(number))
    {
        fs::create_directories(dir_);
    }

    std::string name(const std::string& stem) const { return prefix_ + "_" + stem; }

    void write(const std::string& file, const std::string& text)
    {
        write_atomic(dir_ / file, text);
        written_.push_back((dir_ / file).string());
    }

    std::string summary() const
    {
        std::string s;
        for (const auto& w : written_)
            s += "wrote " + w + "\n";
        return s;
    }

private:
    fs::path dir_;
    std::string prefix_;
    std::vector<std::string> written_;
};

RunConfig at_delays(const RunConfig& cfg, double t1, double t2)
{
    RunConfig c = cfg;
    c.params.tau1 = t1;
    c.params.tau2 = t2;
    c.output.clear();
    return c;
}

/// Time series thinned to every 10th node unless the user asked for more.
std::string series(FigureWriter& w, const RunConfig& cfg, double t1, double t2, const std::string& stem)
{
    RunConfig c = at_delays(cfg, t1, t2);
    c.every = std::max(cfg.every, 10);
    const std::string file = w.name(stem + ".csv");
    w.write(file, cmd_simulate(c));
    return file;
}

std::string scan(FigureWriter& w, const RunConfig& cfg, const std::string& axis, double fixed, double lo,
                 double hi, int n, const std::string& stem)
{
    RunConfig c = cfg;
    c.output.clear();
    c.axis = axis;
    c.lo = lo;
    c.hi = hi;
    c.n = n;
    if (axis == "tau2")
        c.params.tau1 = fixed;
    else
        c.params.tau2 = fixed;
    const std::string file = w.name(stem + ".csv");
    w.write(file, cmd_bifurcation(c));
    return file;
}

std::string header(const std::string& png)
{
    return "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n"
           "set output '" + png + "'\n";
}

/// Prey, predator and phase panels for one series file.
std::string series_plot(const std::string& csv, const std::string& png, const std::string& title)
{
    return header(png) + "set multiplot layout 1,3 title '" + title + "'\n"
           "set xlabel 't'\nplot '" + csv + "' using 1:2 with lines title 'x'\n"
           "plot '" + csv + "' using 1:3 with lines title 'y'\n"
           "set xlabel 'x'\nset ylabel 'y'\nplot '" + csv + "' using 2:3 with lines notitle\n"
           "unset multiplot\n";
}

std::string scan_plot(const std::string& csv, const std::string& png, const std::string& axis)
{
    return header(png) + "set xlabel '" + axis + "'\nset ylabel 'peak y'\n"
           "plot '" + csv + "' using 1:2 with dots notitle\n";
}

std::string plot_name(const std::string& script)
{
    return script.substr(0, script.size() - 3) + ".png";
}

void fig_series(FigureWriter& w, const RunConfig& cfg, const std::vector<std::pair<double, double>>& delays)
{
    int i = 0;
    for (auto [t1, t2] : delays) {
        const std::string stem = "series" + std::to_string(++i);
        const std::string csv = series(w, cfg, t1, t2, stem);
        const std::string gp = w.name(stem + ".gp");
        w.write(gp, series_plot(csv, plot_name(gp),
                                "tau1 = " + format_number(t1) + ", tau2 = " + format_number(t2)));
    }
}

void fig_scan(FigureWriter& w, const RunConfig& cfg, const std::string& axis, double fixed, double lo, double hi,
              int n, const std::string& stem)
{
    const std::string csv = scan(w, cfg, axis, fixed, lo, hi, n, stem);
    const std::string gp = w.name(stem + ".gp");
    w.write(gp, scan_plot(csv, plot_name(gp), axis));
}

void fig_lyapunov(FigureWriter& w, const RunConfig& cfg)
{
    constexpr double tau1 = 0.7;
    constexpr double lo = 0.3;
    constexpr double hi = 1.0;
    constexpr int n = 36;
    LyapunovSettings s;
    s.transient = cfg.lyapunov_transient;
    s.window = cfg.window;
    s.step = cfg.step;
    s.ortho_interval = cfg.diag.ortho_interval;
    std::ostringstream os;
    os << "tau2,lambda1,lambda2,lambda3\n";
    for (int i = 0; i < n; ++i) {
        const double t2 = lo + (hi - lo) * i / (n - 1);
        const auto spec = lyapunov_spectrum(cfg.params.with_delays(tau1, t2), cfg.phi, 3, s);
        os << format_number(t2);
        for (double e : spec.exponents)
            os << "," << format_number(e);
        os << "\n";
    }
    const std::string csv = w.name("lyapunov.csv");
    w.write(csv, os.str());
    const std::string gp = w.name("lyapunov.gp");
    w.write(gp, header(plot_name(gp)) + "set xlabel 'tau2'\nset ylabel 'exponent'\nset yzeroaxis\n"
                "plot for [c=2:4] '" + csv + "' using 1:c with linespoints\n");
}

void fig_region(FigureWriter& w, const RunConfig& cfg)
{
    RunConfig c = cfg;
    c.output.clear();
    auto [cells, overlay] = cmd_region(c);
    const std::string csv = w.name("region.csv");
    const std::string ov = w.name("region_overlay.csv");
    w.write(csv, cells);
    w.write(ov, overlay);
    const std::string gp = w.name("region.gp");
    w.write(gp, header(plot_name(gp)) +
                    "set xlabel 'tau1'\nset ylabel 'tau2'\n"
                    "plot '" + csv + "' using 1:2:4 with points pt 5 ps 0.5 palette notitle, \\\n"
                    "     '" + ov + "' using 2:3 with lines lw 2 lc 'black' notitle\n");
}

} // namespace

std::string cmd_figure(const RunConfig& cfg, int number)
{
    FigureWriter w(cfg, number);
    switch (number) {
    case 1:
        fig_series(w, cfg, {{0.0, 0.0}});
        break;
    case 2:
        fig_scan(w, cfg, "tau2", 0.0, 0.0, 0.3, 121, "bifurcation");
        fig_series(w, cfg, {{0.0, 0.18}, {0.0, 0.23}});
        break;
    case 3:
        fig_scan(w, cfg, "tau1", 0.18, 0.0, 0.4, 161, "bifurcation");
        fig_series(w, cfg, {{0.24, 0.18}, {0.3, 0.18}});
        break;
    case 4:
        fig_series(w, cfg, {{0.7, 0.8}});
        break;
    case 5:
        fig_lyapunov(w, cfg);
        break;
    case 6:
        fig_scan(w, cfg, "tau2", 0.5, cfg.lo, cfg.hi, cfg.n, "bifurcation");
        break;
    case 7:
        fig_region(w, cfg);
        break;
    case 8:
        fig_series(w, cfg, {{0.5, 0.56}, {0.5, 0.6}, {0.5, 0.626}});
        break;
    case 9:
        fig_series(w, cfg, {{0.5, 0.626}, {0.5, 0.66}});
        break;
    case 10:
        fig_series(w, cfg, {{0.5, 0.62}, {0.5, 0.65}});
        fig_scan(w, cfg, "tau2", 0.5, 0.618, 0.623, 101, "zoom6");
        fig_scan(w, cfg, "tau2", 0.5, 0.645, 0.655, 101, "zoom5");
        break;
    default:
        throw ConfigError("figure: number must be in 1..10, got " + std::to_string(number));
    }
    return w.summary();
}

} // namespace refugia::cli
