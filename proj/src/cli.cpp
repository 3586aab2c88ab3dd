#include "sagnac/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sagnac/analyzers.hpp"
#include "sagnac/bellstats.hpp"
#include "sagnac/coincidence.hpp"
#include "sagnac/ensemble.hpp"
#include "sagnac/pairmodel.hpp"

namespace sagnac::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::uint64_t trials = 100000;
    std::string config_path;
    std::string output_path;
    std::optional<Format> format;
    unsigned workers = 0;
};

// Options shared by the commands that build a source and run an ensemble.
struct SourceOptions {
    std::optional<double> bandwidth_hz;
    std::optional<std::string> phase_model;
};

std::string num(double value) { return fmt::format("{:.12g}", value); }

CoincidenceKind parse_mode(const std::string& name) {
    if (name == "post") return CoincidenceKind::PostSelected;
    if (name == "classical") return CoincidenceKind::Classical;
    throw UsageError("--mode must be post or classical");
}

struct Context {
    GlobalOptions global;
    SourceConfig config;
    RunSpec run;

    Format format_or(Format fallback) const { return global.format.value_or(fallback); }
};

Context make_context(const GlobalOptions& global, const SourceOptions& source) {
    Context ctx{global, {}, {}};
    std::optional<std::uint64_t> config_seed;
    if (!global.config_path.empty()) {
        std::ifstream in(global.config_path);
        if (!in) throw IoError("cannot open config file '" + global.config_path + "'");
        json doc;
        try {
            in >> doc;
            ctx.config = source_config_from_json(doc);
            if (doc.contains("master_seed")) config_seed = doc.at("master_seed").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw UsageError("bad config '" + global.config_path + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            throw UsageError("bad config '" + global.config_path + "': " + e.what());
        }
    }
    if (source.bandwidth_hz) ctx.config.bandwidth_sigma = kTwoPi * *source.bandwidth_hz;
    if (source.phase_model) {
        ctx.config.phase_model = *source.phase_model == "physical" ? PhaseModel::Physical : PhaseModel::Uniform;
    }
    try {
        ctx.config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (global.trials == 0) throw UsageError("--trials must be at least 1");
    ctx.run.n_trials = global.trials;
    ctx.run.master_seed = global.seed.value_or(config_seed.value_or(kDefaultSeed));
    ctx.run.workers = global.workers;
    return ctx;
}

// Evenly spaced points from start to end inclusive; one step gives start.
std::vector<double> linspace(double start, double end, int steps) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) out.push_back(steps == 1 ? start : start + (end - start) * k / (steps - 1));
    return out;
}

void check_range(const char* name, double start, double end, int steps) {
    if (steps < 1) throw UsageError(fmt::format("--{}-steps must be at least 1", name));
    if (start > end) throw UsageError(fmt::format("--{}-start must not exceed --{}-end", name, name));
}

std::vector<double> parse_angle_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::exception&) {
            throw UsageError("malformed angle list '" + text + "'");
        }
        if (used != item.size() || !std::isfinite(value)) throw UsageError("malformed angle list '" + text + "'");
        out.push_back(value);
    }
    if (out.size() != 4 || text.back() == ',') throw UsageError("--angles needs four comma-separated values");
    return out;
}

// ---------------------------------------------------------------- singles

struct SinglesArgs {
    double xi_deg = 0.0;
    double theta_deg = 0.0;
};

std::string cmd_singles(const Context& ctx, const SinglesArgs& args) {
    const auto settings = AnalyzerSettings::from_degrees(args.xi_deg, args.theta_deg);
    const auto& config = ctx.config;
    const auto signal = run_ensemble(ctx.run, config, [&](const PairSample& sample) {
        return singles_intensity(project_signal(build_output_fields(config, sample).port_a, settings));
    });
    const auto idler = run_ensemble(ctx.run, config, [&](const PairSample& sample) {
        return singles_intensity(project_idler(build_output_fields(config, sample).port_b, settings));
    });

    struct Row {
        const char* detector;
        double angle_deg;
        const Accumulator& acc;
    };
    const Row rows[] = {{"Ds", args.xi_deg, signal}, {"Di", args.theta_deg, idler}};

    if (ctx.format_or(Format::Csv) == Format::Json) {
        json doc = json::array();
        for (const auto& row : rows) {
            doc.push_back({{"detector", row.detector},
                           {"angle_deg", row.angle_deg},
                           {"mean_intensity", row.acc.mean()},
                           {"stderr", row.acc.standard_error()},
                           {"trials", ctx.run.n_trials},
                           {"seed", ctx.run.master_seed}});
        }
        return doc.dump(2) + "\n";
    }
    std::string out = "detector,angle_deg,mean_intensity,stderr,trials,seed\n";
    for (const auto& row : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", row.detector, num(row.angle_deg), num(row.acc.mean()),
                           num(row.acc.standard_error()), ctx.run.n_trials, ctx.run.master_seed);
    }
    return out;
}

// ------------------------------------------------------ coincidence/sweep

struct RateArgs {
    std::string mode = "post";
    bool analytic = false;
    double tau_s = 0.0;
    std::string time_model = "path";
};

CoincidenceMode make_mode(const RateArgs& args) {
    CoincidenceMode mode{parse_mode(args.mode), args.tau_s,
                         args.time_model == "detector" ? TimeModel::DetectorTime : TimeModel::PathTime};
    if (args.analytic && (mode.kind != CoincidenceKind::PostSelected || args.tau_s != 0.0))
        throw UsageError("--analytic is only available for post-selected rates at tau = 0");
    try {
        mode.idler_delay();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return mode;
}

RateFunction make_rates(const Context& ctx, const RateArgs& args) {
    const auto mode = make_mode(args);
    if (args.analytic) return analytic_post_selected_rates(ctx.config.intensity());
    return monte_carlo_rates(ctx.config, mode, ctx.run);
}

struct GridRow {
    double xi_deg;
    double theta_deg;
    double rate_norm;
    double stderr_norm;
};

std::string format_grid(const Context& ctx, const std::vector<GridRow>& rows, const std::string& mode) {
    if (ctx.format_or(Format::Csv) == Format::Json) {
        json points = json::array();
        for (const auto& r : rows) {
            points.push_back({{"xi_deg", r.xi_deg},
                              {"theta_deg", r.theta_deg},
                              {"rate_norm", r.rate_norm},
                              {"stderr", r.stderr_norm}});
        }
        return json{{"mode", mode}, {"points", points}}.dump(2) + "\n";
    }
    std::string out = "xi_deg,theta_deg,rate_norm,stderr\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{}\n", num(r.xi_deg), num(r.theta_deg), num(r.rate_norm), num(r.stderr_norm));
    }
    return out;
}

GridRow rate_row(const Context& ctx, const RateFunction& rates, double xi_deg, double theta_deg) {
    const double norm = 0.25 * ctx.config.intensity() * ctx.config.intensity();
    const auto p = rates(AnalyzerSettings::from_degrees(xi_deg, theta_deg));
    return {xi_deg, theta_deg, p.rate / norm, p.stat_error / norm};
}

struct PointArgs {
    double xi_deg = 0.0;
    double theta_deg = 0.0;
};

std::string cmd_coincidence(const Context& ctx, const PointArgs& point, const RateArgs& args) {
    const auto rates = make_rates(ctx, args);
    return format_grid(ctx, {rate_row(ctx, rates, point.xi_deg, point.theta_deg)}, args.mode);
}

struct SweepArgs {
    double xi_start = 0.0, xi_end = 180.0;
    int xi_steps = 37;
    double theta_start = 0.0, theta_end = 180.0;
    int theta_steps = 37;
};

std::string cmd_sweep(const Context& ctx, const SweepArgs& sweep, const RateArgs& args) {
    check_range("xi", sweep.xi_start, sweep.xi_end, sweep.xi_steps);
    check_range("theta", sweep.theta_start, sweep.theta_end, sweep.theta_steps);
    const auto rates = make_rates(ctx, args);
    std::vector<GridRow> rows;
    for (double xi : linspace(sweep.xi_start, sweep.xi_end, sweep.xi_steps)) {
        for (double theta : linspace(sweep.theta_start, sweep.theta_end, sweep.theta_steps)) {
            rows.push_back(rate_row(ctx, rates, xi, theta));
        }
    }
    return format_grid(ctx, rows, args.mode);
}

// ------------------------------------------------------------------- chsh

struct ChshArgs {
    std::string angles = "0,45,22.5,67.5";
    std::string mode = "post";
    bool analytic = false;
};

std::string cmd_chsh(const Context& ctx, const ChshArgs& args) {
    const auto deg = parse_angle_list(args.angles);
    RateArgs rate_args;
    rate_args.mode = args.mode;
    rate_args.analytic = args.analytic;
    const auto rates = make_rates(ctx, rate_args);
    ChshResult result;
    try {
        result = chsh_s(ChshAngles::from_degrees(deg[0], deg[1], deg[2], deg[3]), rates);
    } catch (const DegenerateCorrelationError& e) {
        throw UsageError(e.what());
    }
    json report = {
        {"e_ab", result.e_values[0]},
        {"e_abp", result.e_values[1]},
        {"e_apb", result.e_values[2]},
        {"e_apbp", result.e_values[3]},
        {"s", result.s_value},
        {"stderr", result.stat_error},
        {"mode", args.mode},
        {"rates", args.analytic ? "analytic" : "monte_carlo"},
        {"angles_deg", deg},
    };
    if (!args.analytic) {
        report["trials"] = ctx.run.n_trials;
        report["seed"] = ctx.run.master_seed;
    }
    if (ctx.format_or(Format::Json) == Format::Csv) {
        return fmt::format("e_ab,e_abp,e_apb,e_apbp,s,stderr,mode\n{},{},{},{},{},{},{}\n", num(result.e_values[0]),
                           num(result.e_values[1]), num(result.e_values[2]), num(result.e_values[3]),
                           num(result.s_value), num(result.stat_error), args.mode);
    }
    return report.dump(2) + "\n";
}

// --------------------------------------------------------------- decohere

struct DecohereArgs {
    double tau_max_s = 0.0;
    int steps = 21;
    double xi_deg = 45.0;
    double theta_deg = 135.0;
};

std::string cmd_decohere(const Context& ctx, const DecohereArgs& args) {
    if (!(ctx.config.bandwidth_sigma > 0.0)) throw UsageError("decohere needs --bandwidth > 0");
    if (ctx.config.spectrum != Spectrum::Gaussian) throw UsageError("decohere needs a gaussian spectrum");
    if (args.steps < 1) throw UsageError("--steps must be at least 1");
    const double tau_max = args.tau_max_s > 0.0 ? args.tau_max_s : 3.0 / ctx.config.bandwidth_sigma;
    const auto settings = AnalyzerSettings::from_degrees(args.xi_deg, args.theta_deg);
    const auto taus = linspace(0.0, tau_max, args.steps);

    const double i0 = ctx.config.intensity();
    const double norm = 0.25 * i0 * i0;
    const auto points = decoherence_scan(settings, ctx.config, taus, ctx.run);

    std::optional<std::vector<Contrast>> contrasts;
    try {
        std::vector<Contrast> c;
        for (const auto& p : points) c.push_back(cross_term_contrast(settings, i0, p));
        contrasts = std::move(c);
    } catch (const std::invalid_argument&) {
        // settings where the cross term vanishes: contrast columns left empty
    }

    if (ctx.format_or(Format::Csv) == Format::Json) {
        json rows = json::array();
        for (std::size_t i = 0; i < points.size(); ++i) {
            json row = {{"tau_s", taus[i]}, {"rate_norm", points[i].rate / norm},
                        {"stderr", points[i].stat_error / norm}};
            if (contrasts) {
                row["contrast"] = (*contrasts)[i].value;
                row["contrast_stderr"] = (*contrasts)[i].stat_error;
            }
            rows.push_back(row);
        }
        return json{{"sigma_rad_s", ctx.config.bandwidth_sigma}, {"points", rows}}.dump(2) + "\n";
    }
    std::string out = "tau_s,rate_norm,stderr,contrast,contrast_stderr\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        out += fmt::format("{},{},{},{},{}\n", num(taus[i]), num(points[i].rate / norm),
                           num(points[i].stat_error / norm), contrasts ? num((*contrasts)[i].value) : "",
                           contrasts ? num((*contrasts)[i].stat_error) : "");
    }
    return out;
}

// -------------------------------------------------------------- classical

struct ClassicalArgs {
    double xi_deg = 45.0;
    double theta_start = 0.0, theta_end = 180.0;
    int theta_steps = 37;
};

std::string cmd_classical(const Context& ctx, const ClassicalArgs& args) {
    check_range("theta", args.theta_start, args.theta_end, args.theta_steps);
    RateArgs rate_args;
    rate_args.mode = "classical";
    const auto rates = make_rates(ctx, rate_args);
    std::vector<GridRow> rows;
    double lo = INFINITY, hi = -INFINITY;
    for (double theta : linspace(args.theta_start, args.theta_end, args.theta_steps)) {
        rows.push_back(rate_row(ctx, rates, args.xi_deg, theta));
        lo = std::min(lo, rows.back().rate_norm);
        hi = std::max(hi, rows.back().rate_norm);
    }
    const double visibility = (hi - lo) / (hi + lo);

    if (ctx.format_or(Format::Csv) == Format::Json) {
        json points = json::array();
        for (const auto& r : rows) {
            points.push_back({{"theta_deg", r.theta_deg}, {"rate_norm", r.rate_norm}, {"stderr", r.stderr_norm}});
        }
        return json{{"xi_deg", args.xi_deg},
                    {"visibility", visibility},
                    {"trials", ctx.run.n_trials},
                    {"seed", ctx.run.master_seed},
                    {"points", points}}
                   .dump(2) +
               "\n";
    }
    std::string out = "theta_deg,rate_norm,stderr\n";
    for (const auto& r : rows) out += fmt::format("{},{},{}\n", num(r.theta_deg), num(r.rate_norm), num(r.stderr_norm));
    return out;
}

void emit(const GlobalOptions& global, const std::string& text, std::ostream& out) {
    if (global.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(global.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write '" + global.output_path + "'");
    file << text;
    if (!file.flush()) throw IoError("write to '" + global.output_path + "' failed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sagnac SPDC coherence-model simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    std::string format_name;
    app.add_option("--seed", global.seed, "Master RNG seed (default 42)");
    app.add_option("--trials", global.trials, "Monte Carlo trials per estimate");
    app.add_option("--config", global.config_path, "JSON source configuration");
    app.add_option("--output", global.output_path, "Write results to PATH instead of stdout");
    app.add_option("--format", format_name, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", global.workers, "Worker threads (0 = all cores)");

    SourceOptions source;
    auto add_source = [&](CLI::App* cmd) {
        cmd->add_option("--bandwidth", source.bandwidth_hz, "Detuning std. dev. in Hz (overrides config)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--phase-model", source.phase_model, "delta_jk sampling")
            ->check(CLI::IsMember({"uniform", "physical"}));
    };
    auto add_rate = [](CLI::App* cmd, RateArgs& r) {
        cmd->add_option("--mode", r.mode, "post or classical")->check(CLI::IsMember({"post", "classical"}));
        cmd->add_flag("--analytic", r.analytic, "Closed-form post-selected rates");
    };

    SinglesArgs singles;
    auto* singles_cmd = app.add_subcommand("singles", "Ensemble-mean singles intensities at Ds and Di");
    singles_cmd->add_option("--xi", singles.xi_deg, "Signal polarizer angle (deg)");
    singles_cmd->add_option("--theta", singles.theta_deg, "Idler polarizer angle (deg)");
    add_source(singles_cmd);

    PointArgs point;
    RateArgs point_rate;
    auto* coinc_cmd = app.add_subcommand("coincidence", "Coincidence rate at one analyzer setting");
    coinc_cmd->add_option("--xi", point.xi_deg, "Signal polarizer angle (deg)");
    coinc_cmd->add_option("--theta", point.theta_deg, "Idler polarizer angle (deg)");
    coinc_cmd->add_option("--tau", point_rate.tau_s, "Idler detector delay (s), detector time model");
    coinc_cmd->add_option("--time-model", point_rate.time_model, "path or detector")
        ->check(CLI::IsMember({"path", "detector"}));
    add_rate(coinc_cmd, point_rate);
    add_source(coinc_cmd);

    SweepArgs sweep;
    RateArgs sweep_rate;
    auto* sweep_cmd = app.add_subcommand("sweep", "Normalized coincidence grid over (xi, theta)");
    sweep_cmd->add_option("--xi-start", sweep.xi_start);
    sweep_cmd->add_option("--xi-end", sweep.xi_end);
    sweep_cmd->add_option("--xi-steps", sweep.xi_steps, "Number of xi points");
    sweep_cmd->add_option("--theta-start", sweep.theta_start);
    sweep_cmd->add_option("--theta-end", sweep.theta_end);
    sweep_cmd->add_option("--theta-steps", sweep.theta_steps, "Number of theta points");
    add_rate(sweep_cmd, sweep_rate);
    add_source(sweep_cmd);

    ChshArgs chsh;
    auto* chsh_cmd = app.add_subcommand("chsh", "CHSH Bell parameter report");
    chsh_cmd->add_option("--angles", chsh.angles, "a,a',b,b' in degrees");
    chsh_cmd->add_option("--mode", chsh.mode, "post or classical")->check(CLI::IsMember({"post", "classical"}));
    chsh_cmd->add_flag("--analytic", chsh.analytic, "Closed-form post-selected rates");
    add_source(chsh_cmd);

    DecohereArgs decohere;
    auto* decohere_cmd = app.add_subcommand("decohere", "Post-selected rate versus idler detector delay");
    decohere_cmd->add_option("--tau-max", decohere.tau_max_s, "Largest delay (s); default 3/sigma");
    decohere_cmd->add_option("--steps", decohere.steps, "Number of delays");
    decohere_cmd->add_option("--xi", decohere.xi_deg, "Signal polarizer angle (deg)");
    decohere_cmd->add_option("--theta", decohere.theta_deg, "Idler polarizer angle (deg)");
    add_source(decohere_cmd);

    ClassicalArgs classical;
    auto* classical_cmd = app.add_subcommand("classical", "Theta fringe without post-selection");
    classical_cmd->add_option("--xi", classical.xi_deg, "Signal polarizer angle (deg)");
    classical_cmd->add_option("--theta-start", classical.theta_start);
    classical_cmd->add_option("--theta-end", classical.theta_end);
    classical_cmd->add_option("--theta-steps", classical.theta_steps, "Number of theta points");
    add_source(classical_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    if (!format_name.empty()) global.format = format_name == "json" ? Format::Json : Format::Csv;

    try {
        const auto ctx = make_context(global, source);
        std::string text;
        if (*singles_cmd) {
            text = cmd_singles(ctx, singles);
        } else if (*coinc_cmd) {
            text = cmd_coincidence(ctx, point, point_rate);
        } else if (*sweep_cmd) {
            text = cmd_sweep(ctx, sweep, sweep_rate);
        } else if (*chsh_cmd) {
            text = cmd_chsh(ctx, chsh);
        } else if (*decohere_cmd) {
            text = cmd_decohere(ctx, decohere);
        } else {
            text = cmd_classical(ctx, classical);
        }
        emit(global, text, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kSuccess;
}

}  // namespace sagnac::cli
