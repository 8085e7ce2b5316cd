#include "commands.h"

#include "spectra_lab/epps.h"
#include "spectra_lab/error.h"
#include "spectra_lab/groups.h"
#include "spectra_lab/ingest.h"
#include "spectra_lab/io.h"
#include "spectra_lab/parallel.h"
#include "spectra_lab/rmt.h"
#include "spectra_lab/spectra.h"
#include "spectra_lab/svg.h"
#include "spectra_lab/synth.h"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace spectra_lab::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string ticks;
    std::string calendar;
    std::string groups;
    std::string panel;
    std::string out;
    std::string lags;
    bool lags_given = false;
    int tau = 0;
    int step = 1;
    std::uint64_t seed = 0;
    double saturation_tol = default_saturation_tolerance;

    std::string model = "async";
    std::size_t stocks = 10;
    std::size_t samples = 8000;
    std::size_t sessions = 250;
    double rho = 0.5;
    std::string intensities = "0.2";
    bool synchronous = false;
    int open = 600;
    int close = 960;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const auto end = std::min(text.find(',', begin), text.size());
        items.push_back(trim(std::string_view(text).substr(begin, end - begin)));
        begin = end + 1;
    }
    return items;
}

std::vector<int> parse_lags(const std::string& text) {
    std::vector<int> lags;
    for (const auto& item : split_list(text)) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || v <= 0) {
            throw SpecificationError(fmt::format("--lags: '{}' is not a positive number of minutes", item));
        }
        lags.push_back(v);
    }
    return lags;
}

std::vector<double> parse_reals(const std::string& text, const char* flag) {
    std::vector<double> values;
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw SpecificationError(fmt::format("{}: '{}' is not a number", flag, item));
        }
        values.push_back(v);
    }
    return values;
}

// Splices `key = value` lines of a config file in front of the remaining
// arguments so that later command-line flags take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (!path) {
        return args;
    }
    std::ifstream in(*path);
    if (!in) {
        throw InputError(fmt::format("config file not found: {}", *path));
    }
    std::vector<std::string> injected;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line.substr(0, line.find('#')));
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(fmt::format("{}: expected 'key = value', got '{}'", *path, text), line_no);
        }
        const auto key = trim(std::string_view(text).substr(0, eq));
        const auto value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) {
            throw ParseError(fmt::format("{}: empty key", *path), line_no);
        }
        injected.push_back(fmt::format("--{}={}", key, value));
    }
    const auto command = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.starts_with("-"); });
    const auto at = command == args.end() ? args.begin() : command + 1;
    args.insert(at, injected.begin(), injected.end());
    return args;
}

void require_path(const std::string& path, bool directory, const char* what) {
    std::error_code ec;
    const bool ok = directory ? fs::is_directory(path, ec) : fs::is_regular_file(path, ec);
    if (!ok) {
        throw InputError(fmt::format("{} not found: {}", what, path));
    }
}

std::string file_token(const std::string& id) {
    std::string s = id;
    for (char& c : s) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        if (!keep) {
            c = '_';
        }
    }
    return s.empty() ? "group" : s;
}

template <class Fn>
std::string render(Fn&& fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

struct Market {
    std::vector<PriceSeries> prices;
    std::vector<GroupSpec> groups;
};

Market load_market(const Options& o) {
    if (o.ticks.empty() || o.calendar.empty()) {
        throw SpecificationError("--ticks and --calendar are required (or --panel for a single-lag command)");
    }
    require_path(o.ticks, true, "tick directory");
    require_path(o.calendar, false, "calendar file");
    if (!o.groups.empty()) {
        require_path(o.groups, false, "group file");
    }
    if (o.step <= 0) {
        throw SpecificationError("--step must be positive");
    }

    const auto calendar = read_calendar_file(o.calendar, o.step);
    const auto ticks = read_tick_dir(o.ticks);
    if (ticks.empty()) {
        throw InputError(fmt::format("no tick files in {}", o.ticks));
    }
    Market m;
    m.prices.resize(ticks.size());
    parallel_for(ticks.size(), thread_budget(), [&](std::size_t i) { m.prices[i] = resample(ticks[i], calendar); });
    if (o.groups.empty()) {
        m.groups.push_back(listing_group("all", m.prices, calendar));
    } else {
        m.groups = read_group_file(o.groups);
    }
    return m;
}

// Single-lag analyses for every group, either from a panel file or from ticks.
std::vector<LagAnalysis> single_lag(const Options& o) {
    if (!o.panel.empty()) {
        if (!o.ticks.empty() || !o.groups.empty()) {
            throw SpecificationError("--panel cannot be combined with --ticks or --groups");
        }
        require_path(o.panel, false, "panel file");
        std::ifstream in(o.panel, std::ios::binary);
        auto panel = read_panel_binary(in);
        std::vector<LagAnalysis> runs;
        runs.push_back(analyze_panel(std::move(panel), fs::path(o.panel).stem().string()));
        return runs;
    }
    if (o.tau <= 0) {
        throw SpecificationError("--tau must be a positive number of minutes");
    }
    const auto market = load_market(o);
    std::vector<std::optional<LagAnalysis>> runs(market.groups.size());
    parallel_for(market.groups.size(), thread_budget(),
                 [&](std::size_t g) { runs[g] = analyze_lag(market.prices, market.groups[g], o.tau); });
    std::vector<LagAnalysis> out;
    for (auto& r : runs) {
        out.push_back(std::move(*r));
    }
    return out;
}

ReportContext context_of(const LagAnalysis& run) {
    return {run.correlation.group_id, run.panel.lag_minutes, run.panel.stocks(), run.panel.samples()};
}

std::string spectrum_title(const LagAnalysis& run, std::string_view what) {
    return fmt::format("{}{}, tau = {} min, N = {}, T = {}", run.correlation.group_id, what, run.panel.lag_minutes,
                       run.panel.stocks(), run.panel.samples());
}

int cmd_analyze(const Options& o, std::ostream& out) {
    const auto runs = single_lag(o);
    ArtifactWriter writer(o.out);
    for (const auto& run : runs) {
        const auto token = file_token(run.correlation.group_id);
        const auto& lambda = run.eigensystem.eigenvalues;
        writer.write(fmt::format("spectrum_{}.csv", token), render([&](auto& s) { write_eigenvalues_csv(s, lambda); }));
        writer.write(fmt::format("eigenvectors_{}.csv", token),
                     render([&](auto& s) { write_eigenvectors_csv(s, run.eigensystem); }));
        writer.write(fmt::format("report_{}.json", token), render([&](auto& s) {
                         write_report_json(s, context_of(run), run.bounds, lambda, run.report);
                     }));
        writer.write(fmt::format("spectrum_{}.svg", token), spectrum_svg(lambda, run.bounds, spectrum_title(run, "")));
        out << fmt::format("{}: lambda1 = {:.6g} (normalized {:.6g}), band [{:.6g}, {:.6g}], repulsion {}, "
                           "within fraction {:.4g}\n",
                           run.correlation.group_id, run.report.lambda1, run.report.lambda1_normalized,
                           run.bounds.lower, run.bounds.upper, run.report.repelled ? "yes" : "no",
                           run.report.within_fraction());
    }
    return 0;
}

int cmd_remove_market_mode(const Options& o, std::ostream& out) {
    const auto runs = single_lag(o);
    struct After {
        EigenSystem eigensystem;
        SpectrumReport report;
    };
    std::vector<std::optional<After>> after(runs.size());
    parallel_for(runs.size(), thread_budget(), [&](std::size_t g) {
        const auto residual = remove_market_mode(runs[g].panel, runs[g].eigensystem);
        auto es = eigendecompose(correlation_matrix(residual, runs[g].correlation.group_id));
        auto report = classify_residual_spectrum(es, runs[g].bounds);
        after[g] = After{std::move(es), std::move(report)};
    });

    ArtifactWriter writer(o.out);
    for (std::size_t g = 0; g < runs.size(); ++g) {
        const auto& run = runs[g];
        const auto& post = *after[g];
        const auto token = file_token(run.correlation.group_id);
        writer.write(fmt::format("spectrum_before_{}.csv", token),
                     render([&](auto& s) { write_eigenvalues_csv(s, run.eigensystem.eigenvalues); }));
        writer.write(fmt::format("spectrum_after_{}.csv", token),
                     render([&](auto& s) { write_eigenvalues_csv(s, post.eigensystem.eigenvalues); }));
        writer.write(fmt::format("market_mode_{}.json", token), render([&](auto& s) {
                         write_market_mode_json(s, context_of(run), run.bounds, run.report, post.report);
                     }));
        writer.write(fmt::format("spectrum_after_{}.svg", token),
                     spectrum_svg(post.eigensystem.eigenvalues, run.bounds,
                                  spectrum_title(run, " without market mode")));
        out << fmt::format("{}: within fraction {:.4g} -> {:.4g}, lambda1 {:.6g} -> {:.6g}\n",
                           run.correlation.group_id, run.report.within_fraction(), post.report.within_fraction(),
                           run.report.lambda1, post.report.lambda1);
    }
    return 0;
}

int cmd_epps(const Options& o, std::ostream& out, std::ostream& err) {
    const auto lags = o.lags_given ? parse_lags(o.lags)
                                   : std::vector<int>(std::begin(default_lags), std::end(default_lags));
    if (!(o.saturation_tol > 0.0 && o.saturation_tol < 1.0)) {
        throw SpecificationError("--saturation-tol must lie in (0, 1)");
    }
    const auto market = load_market(o);
    const std::size_t budget = thread_budget();
    const std::size_t groups = market.groups.size();
    const std::size_t inner = std::max<std::size_t>(1, budget / groups);

    std::vector<EppsCurve> curves(groups);
    parallel_for(groups, budget, [&](std::size_t g) {
        curves[g] = epps_curve(market.prices, market.groups[g], lags, o.saturation_tol, inner);
    });

    ArtifactWriter writer(o.out);
    for (const auto& curve : curves) {
        writer.write(fmt::format("epps_{}.csv", file_token(curve.group_id)),
                     render([&](auto& s) { write_curve_csv(s, curve); }));
        for (const auto& w : curve.warnings) {
            err << fmt::format("warning: group {}: {}\n", curve.group_id, w);
        }
        if (curve.saturation) {
            out << fmt::format("{}: {} lags, saturation level {:.6g} from tau = {} min\n", curve.group_id,
                               curve.points.size(), curve.saturation->level, curve.saturation->lag_minutes);
        } else {
            out << fmt::format("{}: {} lags, no saturation\n", curve.group_id, curve.points.size());
        }
    }
    writer.write("saturation.json", render([&](auto& s) { write_saturation_json(s, curves, o.saturation_tol); }));
    writer.write("epps.svg", epps_svg(curves, "largest eigenvalue against return lag"));
    return 0;
}

std::vector<double> stock_intensities(const Options& o) {
    const auto classes = parse_reals(o.intensities, "--intensities");
    if (classes.size() == 1 || classes.size() == o.stocks) {
        return classes;
    }
    if (classes.empty() || o.stocks % classes.size() != 0) {
        throw SpecificationError(fmt::format("--intensities: {} classes do not split {} stocks evenly",
                                             classes.size(), o.stocks));
    }
    std::vector<double> per_stock;
    const std::size_t size = o.stocks / classes.size();
    for (double v : classes) {
        per_stock.insert(per_stock.end(), size, v);
    }
    return per_stock;
}

int cmd_synth(const Options& o, std::ostream& out) {
    if (o.model == "wishart" || o.model == "one-factor") {
        auto panel = o.model == "wishart" ? gen_wishart_noise(o.stocks, o.samples, o.seed)
                                          : gen_one_factor(o.stocks, o.samples, o.rho, o.seed);
        ArtifactWriter writer(o.out);
        writer.write("panel.bin", render([&](auto& s) { write_panel_binary(s, panel); }));
        writer.write("panel.csv", render([&](auto& s) { write_panel_csv(s, panel); }));
        out << fmt::format("{} panel N = {} T = {} written to {}\n", o.model, panel.stocks(), panel.samples(), o.out);
        return 0;
    }
    if (o.model != "async") {
        throw SpecificationError(fmt::format("unknown model '{}'", o.model));
    }

    SynthConfig config;
    config.stocks = o.stocks;
    config.sessions = o.sessions;
    config.open_minute = o.open;
    config.close_minute = o.close;
    config.rho = o.rho;
    config.intensities = stock_intensities(o);
    config.synchronous = o.synchronous;
    config.seed = o.seed;
    const auto market = gen_async_market(config);

    const auto& days = market.calendar.sessions();
    std::vector<std::string> ids;
    for (const auto& t : market.ticks) {
        ids.push_back(t.stock_id);
    }
    std::vector<GroupSpec> groups{fixed_group("all", ids, days.front().date, days.back().date)};
    const auto classes = parse_reals(o.intensities, "--intensities");
    if (classes.size() > 1 && classes.size() < ids.size()) {
        const std::size_t size = ids.size() / classes.size();
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const std::vector<std::string> members(ids.begin() + static_cast<std::ptrdiff_t>(c * size),
                                                   ids.begin() + static_cast<std::ptrdiff_t>((c + 1) * size));
            groups.push_back(fixed_group(fmt::format("class{}", c + 1), members, days.front().date, days.back().date));
        }
    }

    ArtifactWriter writer(o.out);
    ArtifactWriter tick_writer(fs::path(o.out) / "ticks");
    for (const auto& t : market.ticks) {
        tick_writer.write(t.stock_id + ".csv", render([&](auto& s) { write_ticks(s, t); }));
    }
    writer.write("calendar.txt", render([&](auto& s) { write_calendar(s, market.calendar); }));
    writer.write("groups.txt", render([&](auto& s) { write_groups(s, groups); }));
    out << fmt::format("async market: {} stocks, {} sessions written to {}\n", market.ticks.size(), days.size(),
                       o.out);
    return 0;
}

void add_market_inputs(CLI::App* cmd, Options& o) {
    cmd->add_option("--ticks", o.ticks, "Directory of tick files, one per stock")->type_name("DIR");
    cmd->add_option("--calendar", o.calendar, "Session calendar file")->type_name("FILE");
    cmd->add_option("--groups", o.groups, "Group definition file (default: every stock over its listing)")
        ->type_name("FILE");
    cmd->add_option("--step", o.step, "Price grid step in minutes")->type_name("MIN");
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--out", o.out, "Output directory")->type_name("DIR")->required();
    cmd->add_option("--config", "Text config file of 'key = value' lines; flags override it")->type_name("FILE");
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Correlation-matrix spectra of high-frequency returns", "spectra-lab"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "Eigenvalue spectrum of each group's correlation matrix at one lag");
    add_market_inputs(analyze, o);
    analyze->add_option("--panel", o.panel, "Binary return panel instead of ticks")->type_name("FILE");
    analyze->add_option("--tau", o.tau, "Return lag in minutes")->type_name("MIN");
    add_common(analyze, o);

    auto* epps = app.add_subcommand("epps", "Largest eigenvalue as a function of the return lag");
    add_market_inputs(epps, o);
    epps->add_option("--lags", o.lags, "Comma-separated lags in minutes")->type_name("CSV-LIST");
    epps->add_option("--saturation-tol", o.saturation_tol, "Relative band for the saturation estimate")
        ->type_name("FLOAT");
    add_common(epps, o);

    auto* synth = app.add_subcommand("synth", "Generate synthetic panels or tick data");
    synth->add_option("--model", o.model, "wishart, one-factor or async")->type_name("NAME");
    synth->add_option("--seed", o.seed, "Random seed")->type_name("U64");
    synth->add_option("-N,--stocks", o.stocks, "Number of stocks");
    synth->add_option("-T,--samples", o.samples, "Panel length (wishart, one-factor)");
    synth->add_option("--rho", o.rho, "Factor correlation (one-factor, async)")->type_name("FLOAT");
    synth->add_option("--sessions", o.sessions, "Trading sessions (async)");
    synth->add_option("--intensities", o.intensities,
                      "Trades per minute: one value, one per stock, or one per equal-size class (async)")
        ->type_name("CSV-LIST");
    synth->add_flag("--synchronous", o.synchronous, "Trade at every grid minute (async)");
    synth->add_option("--open", o.open, "Session open, minutes after midnight (async)")->type_name("MIN");
    synth->add_option("--close", o.close, "Session close, minutes after midnight (async)")->type_name("MIN");
    add_common(synth, o);

    auto* rmm = app.add_subcommand("remove-market-mode", "Spectrum before and after removing the leading mode");
    add_market_inputs(rmm, o);
    rmm->add_option("--panel", o.panel, "Binary return panel instead of ticks")->type_name("FILE");
    rmm->add_option("--tau", o.tau, "Return lag in minutes")->type_name("MIN");
    add_common(rmm, o);

    try {
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            return app.exit(e, out, err) == 0 ? 0 : 2;
        }
        if (analyze->parsed()) {
            return cmd_analyze(o, out);
        }
        if (epps->parsed()) {
            o.lags_given = epps->count("--lags") > 0;
            return cmd_epps(o, out, err);
        }
        if (synth->parsed()) {
            return cmd_synth(o, out);
        }
        return cmd_remove_market_mode(o, out);
    } catch (const Error& e) {
        err << "spectra-lab: error: " << e.what() << '\n';
        return e.kind() == ErrorKind::input ? 2 : 1;
    } catch (const fs::filesystem_error& e) {
        err << "spectra-lab: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "spectra-lab: error: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace spectra_lab::cli
