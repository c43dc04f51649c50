#include "qnd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnd/error.hpp"
#include "qnd/metrics.hpp"
#include "qnd/one_photon.hpp"
#include "qnd/oracle.hpp"
#include "qnd/two_photon.hpp"

namespace qnd {

namespace {

using json = nlohmann::json;

const std::set<std::string> kCommands = {"transmittance", "metrics", "sweep", "shape",
                                         "oracle-check"};

struct Common {
    std::string config;
    std::string format = "csv";
    std::string output;
    std::string shape;
    double tol_1d = 1e-8;
    double tol_2d = 1e-6;
    double tol_root = 1e-4;
    std::optional<double> grid_lo;
    std::optional<double> grid_hi;
    std::optional<std::size_t> grid_n;
    unsigned threads = 0;
};

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<double> row_error;
    json meta = json::object();
    std::string summary;
};

std::string trim(const std::string &s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string &text, const char *what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != item.size())
            throw InvalidArgument(std::string("bad number '") + item + "' in " + what);
        out.push_back(v);
    }
    if (out.empty())
        throw InvalidArgument(std::string("empty list for ") + what);
    return out;
}

Shape shape_or(const Common &c, Shape fallback)
{
    return c.shape.empty() ? fallback : parse_shape(c.shape);
}

PulseSpec make_pulse(Shape s, double d)
{
    return s == Shape::Gaussian ? gaussian_pulse(d) : rectangular_pulse(d);
}

Grid override_grid(const Common &c, Grid g)
{
    if (c.grid_lo)
        g.lo = *c.grid_lo;
    if (c.grid_hi)
        g.hi = *c.grid_hi;
    if (c.grid_n)
        g.n = *c.grid_n;
    g.validate();
    return g;
}

bool grid_overridden(const Common &c)
{
    return c.grid_lo || c.grid_hi || c.grid_n;
}

MetricsOptions metrics_options(const Common &c, Shape shape, double d_signal, double d_ancilla)
{
    MetricsOptions opt;
    opt.shape = shape;
    opt.tol = {c.tol_1d, c.tol_2d, c.tol_root};
    opt.threads = c.threads;
    if (grid_overridden(c))
        opt.grid = override_grid(c, default_grid(make_pulse(shape, d_signal),
                                                 make_pulse(shape, d_ancilla)));
    return opt;
}

void add_metrics_row(Report &r, const QndMetrics &m)
{
    r.rows.push_back({m.d_signal, m.d_ancilla, m.p_suc, m.eqnd, m.p1R_ancilla});
    r.row_error.push_back(m.error);
}

const std::vector<std::string> kMetricsColumns = {"d_signal", "d_ancilla", "p_suc", "eqnd", "p1R"};

json tolerance_json(const Common &c)
{
    return {{"one_d", c.tol_1d}, {"two_d", c.tol_2d}, {"root", c.tol_root}};
}

std::string render_csv(const Report &r)
{
    std::string s;
    for (std::size_t k = 0; k < r.columns.size(); ++k)
        s += (k ? "," : "") + r.columns[k];
    s += '\n';
    for (const auto &row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            s += (k ? "," : "") + format_number(row[k]);
        s += '\n';
    }
    return s;
}

std::string render_json(const std::string &command, const Common &c, const Report &r)
{
    json doc = r.meta;
    doc["command"] = command;
    doc["tolerances"] = tolerance_json(c);
    doc["columns"] = r.columns;
    json rows = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        json row = json::object();
        for (std::size_t k = 0; k < r.columns.size(); ++k)
            row[r.columns[k]] = r.rows[i][k];
        if (i < r.row_error.size()) {
            row["quadrature_error"] = r.row_error[i];
            worst = std::max(worst, r.row_error[i]);
        }
        rows.push_back(row);
    }
    doc["rows"] = rows;
    doc["achieved_quadrature_error"] = worst;
    return doc.dump(2) + "\n";
}

std::filesystem::path resolve_output(const std::string &command, const Common &c)
{
    const char *dir = std::getenv("QND_OUTPUT_DIR");
    std::filesystem::path p = c.output;
    if (p.empty()) {
        if (!dir || !*dir)
            return {};
        p = command + (c.format == "json" ? ".json" : ".csv");
    }
    if (p.is_relative() && dir && *dir)
        p = std::filesystem::path(dir) / p;
    return p;
}

struct Args {
    std::vector<std::string> list;
    std::vector<std::pair<std::string, std::string>> config;
    std::string command;
};

// Config entries become flags placed right after the subcommand, ahead of
// the user's own flags, so the latter win under TakeLast.
Args expand_config(int argc, const char *const *argv)
{
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config" && i + 1 < raw.size())
            config_path = raw[i + 1];
        else if (raw[i].rfind("--config=", 0) == 0)
            config_path = raw[i].substr(9);
    }
    Args a;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw InvalidArgument("cannot read config file '" + config_path + "'");
        a.config = parse_config_text(in);
    }
    std::vector<std::string> rest;
    for (const auto &s : raw) {
        if (a.command.empty() && kCommands.count(s))
            a.command = s;
        else
            rest.push_back(s);
    }
    for (const auto &[k, v] : a.config) {
        if (k == "command" && a.command.empty())
            a.command = v;
    }
    if (!a.command.empty())
        a.list.push_back(a.command);
    for (const auto &[k, v] : a.config) {
        if (k == "command" || k == "config")
            continue;
        a.list.push_back("--" + k);
        a.list.push_back(v);
    }
    a.list.insert(a.list.end(), rest.begin(), rest.end());
    return a;
}

} // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream &in)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty() || value.empty())
            throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key or value");
        out.emplace_back(key, value);
    }
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    Args args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }

    CLI::App app{"QND photon scattering: one- and two-photon pulses on a two-sided atom-cavity"};
    app.name("qnd");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Common c;
    app.add_option("--config", c.config, "key=value file; flags override it");
    app.add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", c.output, "output file (relative to $QND_OUTPUT_DIR if set)");
    app.add_option("--shape", c.shape, "gaussian or rectangular")
        ->check(CLI::IsMember({"gaussian", "rectangular"}));
    app.add_option("--tol-1d", c.tol_1d, "1D quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-2d", c.tol_2d, "2D quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-root", c.tol_root, "root-finding tolerance on P_suc")
        ->check(CLI::PositiveNumber);
    app.add_option("--grid-lo", c.grid_lo, "grid lower end");
    app.add_option("--grid-hi", c.grid_hi, "grid upper end");
    app.add_option("--grid-n", c.grid_n, "grid sample count");
    app.add_option("--threads", c.threads, "worker threads for 2D quadrature (0: all cores)");

    std::string d_list = "40";
    auto *trans = app.add_subcommand("transmittance", "one-photon P(L), P(R) per duration");
    trans->add_option("--d", d_list, "durations in 1/Gamma, comma separated");

    double d_signal = 40.0, d_ancilla = 40.0, weak = 1.0;
    std::optional<double> target;
    std::string mode = "symmetric";
    std::optional<double> g_ghz, kappa_ghz, pulse_ps;
    auto *met = app.add_subcommand("metrics", "EQND and P_suc for one duration pair");
    met->add_option("--d-signal", d_signal, "signal duration (1/Gamma)");
    met->add_option("--d-ancilla", d_ancilla, "ancilla duration (1/Gamma)");
    met->add_option("--weak-weight", weak, "one-photon weight of a weak ancilla")
        ->check(CLI::Range(0.0, 1.0));
    met->add_option("--target-success", target, "root-find the duration giving this P_suc");
    met->add_option("--mode", mode, "symmetric or asymmetric (with --target-success)")
        ->check(CLI::IsMember({"symmetric", "asymmetric"}));
    met->add_option("--g-ghz", g_ghz, "coupling g (GHz), physical scenario");
    met->add_option("--kappa-ghz", kappa_ghz, "cavity decay kappa (GHz), physical scenario");
    met->add_option("--pulse-ps", pulse_ps, "pulse duration (ps), physical scenario");

    std::string sweep_list = "5,10,20,40,80";
    auto *swp = app.add_subcommand("sweep", "metrics over a list of durations");
    swp->add_option("--mode", mode, "symmetric or asymmetric")
        ->check(CLI::IsMember({"symmetric", "asymmetric"}));
    swp->add_option("--d", sweep_list, "signal durations, comma separated");
    swp->add_option("--d-ancilla", d_ancilla, "fixed ancilla duration in asymmetric mode");

    double shape_ds = 5.0, shape_da = 80.0, x_detect = 0.0;
    double delta_lo = -20.0, delta_hi = 20.0;
    std::size_t delta_n = 401;
    std::string side = "L";
    auto *shp = app.add_subcommand("shape", "heralded signal amplitude vs x_signal - x_detect");
    shp->add_option("--d-signal", shape_ds, "signal duration");
    shp->add_option("--d-ancilla", shape_da, "ancilla duration");
    shp->add_option("--x-detect", x_detect, "ancilla detection coordinate");
    shp->add_option("--delta-lo", delta_lo, "first sample");
    shp->add_option("--delta-hi", delta_hi, "last sample");
    shp->add_option("--delta-n", delta_n, "sample count")->check(CLI::Range(2, 10000000));
    shp->add_option("--side", side, "signal output side, L or R")
        ->check(CLI::IsMember({"L", "R"}));

    std::string ratio_list = "10";
    double oracle_d = 40.0;
    std::size_t brute_samples = 0, brute_points = 4000;
    auto *orc = app.add_subcommand("oracle-check", "full-model and brute-force cross checks");
    orc->add_option("--kappa-over-g", ratio_list, "kappa/g values (Gamma fixed to 1)");
    orc->add_option("--d", oracle_d, "pulse duration");
    orc->add_option("--brute-samples", brute_samples, "random interior two-photon points");
    orc->add_option("--brute-points", brute_points, "Riemann points per axis")
        ->check(CLI::Range(1000, 100000));

    for (auto *sub : {trans, met, swp, shp, orc})
        sub->fallthrough();

    for (const auto &[k, v] : args.config) {
        if (k == "command" || k == "config")
            continue;
        CLI::App *sub = args.command.empty() ? nullptr : app.get_subcommand_no_throw(args.command);
        const bool known = app.get_option_no_throw("--" + k) != nullptr ||
                           (sub && sub->get_option_no_throw("--" + k) != nullptr);
        if (!known) {
            err << "error: unknown config key '" << k << "'\n";
            return kExitInvalidConfig;
        }
    }

    try {
        std::vector<std::string> rev(args.list.rbegin(), args.list.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    Report rep;
    try {
        if (command == "transmittance") {
            const Shape shape = shape_or(c, Shape::Gaussian);
            rep.columns = {"d", "p_L", "p_R"};
            for (double d : parse_list(d_list, "--d")) {
                const PulseSpec p = make_pulse(shape, d);
                const Grid g = grid_overridden(c) ? override_grid(c, default_grid(p))
                                                  : default_grid(p);
                const auto res = one_photon_output(p, g, c.tol_1d);
                rep.rows.push_back({d, res.p_L, res.p_R});
                rep.row_error.push_back(res.error);
            }
            rep.meta["shape"] = to_string(shape);
            rep.summary = "transmittance rows: " + std::to_string(rep.rows.size());
        } else if (command == "metrics") {
            const Shape shape = shape_or(c, Shape::Gaussian);
            rep.columns = kMetricsColumns;
            QndMetrics m;
            if (g_ghz || kappa_ghz || pulse_ps) {
                PhysicalScenario s;
                s.g_ghz = g_ghz.value_or(s.g_ghz);
                s.kappa_ghz = kappa_ghz.value_or(4.0 * s.g_ghz);
                s.pulse_seconds = pulse_ps.value_or(s.pulse_seconds * 1e12) * 1e-12;
                CavityParams cav{s.g_ghz, s.kappa_ghz};
                cav.validate();
                const double d = cav.gamma() * 1e9 * s.pulse_seconds;
                const auto r = physical_scenario(s, metrics_options(c, shape, d, d));
                m = r.metrics;
                rep.meta["gamma_ghz"] = r.gamma_ghz;
                rep.meta["d"] = r.d;
                rep.meta["bad_cavity"] = r.bad_cavity;
                rep.meta["convention"] = r.convention;
                if (!r.bad_cavity)
                    err << "warning: kappa < 4g, outside the bad-cavity regime\n";
            } else if (target) {
                DurationSearch search;
                search.mode = parse_sweep_mode(mode);
                search.d_ancilla = d_ancilla;
                const auto r = find_duration_for_success(
                    *target, search, metrics_options(c, shape, d_signal, d_ancilla));
                m = r.metrics;
                rep.meta["target_success"] = *target;
                rep.meta["mode"] = mode;
                rep.meta["evaluations"] = r.iterations;
            } else {
                m = qnd_metrics(d_signal, d_ancilla,
                                metrics_options(c, shape, d_signal, d_ancilla));
            }
            m = weak_light_metrics(m, {weak});
            rep.meta["weak_weight"] = weak;
            rep.meta["shape"] = to_string(shape);
            add_metrics_row(rep, m);
            rep.summary = "eqnd=" + format_number(m.eqnd) + " p_suc=" + format_number(m.p_suc);
        } else if (command == "sweep") {
            const Shape shape = shape_or(c, Shape::Gaussian);
            const SweepMode sm = parse_sweep_mode(mode);
            rep.columns = kMetricsColumns;
            for (double d : parse_list(sweep_list, "--d")) {
                const double da = sm == SweepMode::Symmetric ? d : d_ancilla;
                add_metrics_row(rep, sweep(sm, {d}, da, metrics_options(c, shape, d, da)).front());
            }
            rep.meta["mode"] = mode;
            rep.meta["shape"] = to_string(shape);
            rep.summary = "sweep rows: " + std::to_string(rep.rows.size());
        } else if (command == "shape") {
            ShapeOptions so;
            so.shape = shape_or(c, Shape::Rectangular);
            so.signal_side = side == "L" ? Side::L : Side::R;
            if (!(delta_lo < delta_hi))
                throw InvalidArgument("--delta-lo must be below --delta-hi");
            for (std::size_t i = 0; i < delta_n; ++i)
                so.delta.push_back(delta_lo + (delta_hi - delta_lo) * static_cast<double>(i) /
                                                  static_cast<double>(delta_n - 1));
            const auto s = conditional_signal_shape(shape_ds, shape_da, x_detect, so);
            rep.columns = {"delta", "amplitude"};
            for (std::size_t i = 0; i < s.delta.size(); ++i)
                rep.rows.push_back({s.delta[i], s.amplitude[i]});
            rep.meta["shape"] = to_string(so.shape);
            rep.meta["aleph"] = s.aleph;
            rep.meta["d_signal"] = shape_ds;
            rep.meta["d_ancilla"] = shape_da;
            rep.meta["x_detect"] = x_detect;
            rep.meta["side"] = side;
            try {
                rep.meta["fitted_decay_rate"] = fit_decay_rate(s.delta, s.amplitude);
            } catch (const InvalidArgument &) {
                rep.meta["fitted_decay_rate"] = nullptr;
            }
            rep.summary = "shape samples: " + std::to_string(rep.rows.size());
        } else {
            const Shape shape = shape_or(c, Shape::Gaussian);
            const PulseSpec p = make_pulse(shape, oracle_d);
            const auto eff = one_photon_output(p, c.tol_1d);
            rep.columns = {"kappa_over_g", "d", "p_R_full", "p_R_effective", "rel_error",
                           "norm_drift"};
            for (double r : parse_list(ratio_list, "--kappa-over-g")) {
                if (!(r > 0.0))
                    throw InvalidArgument("--kappa-over-g values must be positive");
                const auto st = full_model_propagate({r, r * r}, p);
                const double pr = st.p_R();
                rep.rows.push_back(
                    {r, oracle_d, pr, eff.p_R, std::abs(pr - eff.p_R) / eff.p_R, st.norm_drift});
                rep.row_error.push_back(st.step_error);
            }
            if (brute_samples > 0) {
                std::mt19937_64 rng(20240607);
                std::uniform_real_distribution<double> pos(-oracle_d, oracle_d);
                double worst = 0.0;
                for (std::size_t i = 0; i < brute_samples; ++i) {
                    const double x1 = pos(rng), x2 = pos(rng);
                    const Channel ch = kChannels[i % 4];
                    const double fast = two_photon_amplitude(p, p, ch, x1, x2);
                    const double slow = brute_force_two_photon(p, p, ch, x1, x2, brute_points);
                    worst = std::max(worst, std::abs(fast - slow));
                }
                rep.meta["two_photon_max_abs_diff"] = worst;
                rep.meta["brute_samples"] = brute_samples;
            }
            rep.meta["shape"] = to_string(shape);
            rep.summary = "oracle rows: " + std::to_string(rep.rows.size());
        }
    } catch (const ConvergenceError &e) {
        err << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }

    const std::string text = c.format == "json" ? render_json(command, c, rep) : render_csv(rep);
    const auto path = resolve_output(command, c);
    if (path.empty()) {
        out << text;
    } else {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) {
            err << "error: cannot write '" << path.string() << "'\n";
            return kExitInvalidConfig;
        }
        f << text;
        out << rep.summary << " -> " << path.string() << "\n";
    }
    return kExitOk;
}

} // namespace qnd
