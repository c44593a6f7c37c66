// track: Monte Carlo benchmark and replay tool for the GM-PHD filters.

#include "rgmphd/rgmphd.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw rgmphd::ValidationError("path", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct RunOptions {
    std::string config;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::string scenario;
    std::string filters;
    std::string out;
    std::optional<std::size_t> workers;
    std::string dump_dir;
};

int cmd_run(const RunOptions& opt) {
    std::string text;
    if (!opt.config.empty()) text = read_file(opt.config);
    if (!opt.scenario.empty()) text = "scenario = " + opt.scenario + "\n" + text;
    auto cfg = rgmphd::parse_config(text);
    if (opt.runs) cfg.runs = *opt.runs;
    if (opt.seed) cfg.seed = *opt.seed;
    if (!opt.filters.empty()) cfg.filters = rgmphd::detail::split_list(opt.filters);
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    if (const char* env = std::getenv("TRACK_OUT_DIR"); env != nullptr && *env != '\0') cfg.output_dir = env;
    if (opt.workers) cfg.workers = *opt.workers;
    if (!opt.dump_dir.empty()) cfg.dump_dir = opt.dump_dir;
    rgmphd::validate(cfg);

    const auto res = rgmphd::run_monte_carlo(cfg);
    rgmphd::emit_results(res, cfg, cfg.output_dir);

    for (const auto& f : res.summary.filters) {
        std::cout << f.filter << ": ospa " << f.ospa_mean << " +- " << f.ospa_std << " m, mu_N " << f.card_mean_abs
                  << ", sigma_N " << f.card_rms << ", " << f.runtime_mean_ms << " ms/step";
        if (f.failures > 0) std::cout << ", " << f.failures << " failed runs";
        std::cout << '\n';
    }
    std::cout << "results written to " << cfg.output_dir << '\n';
    return 0;
}

int cmd_replay(const std::string& dump, const std::string& filter, const std::string& scenario,
               const std::string& config, const std::string& est_out) {
    std::string text;
    if (!config.empty()) text = read_file(config);
    if (!scenario.empty()) text = "scenario = " + scenario + "\n" + text;
    auto cfg = rgmphd::parse_config(text);
    cfg.filters = {filter};
    rgmphd::validate(cfg);

    std::ifstream is(dump);
    if (!is) throw rgmphd::ValidationError("dump", "cannot open '" + dump + "'");
    const auto data = rgmphd::read_scenario_dump(is);
    const auto models = rgmphd::filter_models(cfg.scenario, rgmphd::filter_detection(cfg));
    const auto fr = rgmphd::run_filter(filter, data.frames, data.truth, models, cfg);
    if (fr.record.failed) {
        std::cerr << "filter failed: " << fr.record.failure << '\n';
        return kExitRuntime;
    }
    std::cout << "step,ospa,n_true,n_est\n";
    for (std::size_t k = 0; k < fr.record.steps(); ++k)
        std::cout << k << ',' << rgmphd::format_double(fr.record.ospa[k]) << ',' << fr.record.n_true[k] << ','
                  << fr.record.n_est[k] << '\n';
    if (!est_out.empty()) {
        std::ofstream os(est_out);
        rgmphd::write_estimate_dump(os, fr.estimates);
    }
    return 0;
}

int cmd_ospa(const std::string& truth_path, const std::string& est_path, double cutoff, double order) {
    std::ifstream ts(truth_path);
    std::ifstream es(est_path);
    if (!ts) throw rgmphd::ValidationError("truth", "cannot open '" + truth_path + "'");
    if (!es) throw rgmphd::ValidationError("est", "cannot open '" + est_path + "'");
    const auto truth = rgmphd::read_state_sets(ts);
    const auto est = rgmphd::read_state_sets(es);
    if (truth.size() != est.size())
        throw rgmphd::ValidationError("est", "step count differs from truth (" + std::to_string(est.size()) + " vs " +
                                                 std::to_string(truth.size()) + ")");
    const rgmphd::OspaConfig oc{cutoff, order};
    std::cout << "step,ospa\n";
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = rgmphd::ospa(est[k], truth[k], oc);
        sum += d;
        std::cout << k << ',' << rgmphd::format_double(d) << '\n';
    }
    if (!truth.empty()) std::cerr << "mean ospa " << sum / static_cast<double>(truth.size()) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo benchmark for Gaussian-mixture PHD multi-target filters"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment");
    run->add_option("--config", run_opt.config, "Configuration file (key = value or JSON)");
    run->add_option("--runs", run_opt.runs, "Number of Monte Carlo runs");
    run->add_option("--seed", run_opt.seed, "Master seed");
    run->add_option("--scenario", run_opt.scenario, "linear | nonlinear_ct | high_clutter | maneuvering");
    run->add_option("--filters", run_opt.filters, "Comma-separated filters: standard,robust,robust_extended");
    run->add_option("--out", run_opt.out, "Output directory (TRACK_OUT_DIR overrides)");
    run->add_option("--workers", run_opt.workers, "Worker threads");
    run->add_option("--dump-dir", run_opt.dump_dir, "Write per-run scenario and estimate dumps here");

    std::string dump, filter = "robust", scenario, config, est_out;
    auto* replay = app.add_subcommand("replay", "Run one filter over a scenario dump");
    replay->add_option("--dump", dump, "Scenario dump (JSON lines)")->required();
    replay->add_option("--filter", filter, "Filter name");
    replay->add_option("--scenario", scenario, "Scenario kind the dump was generated with");
    replay->add_option("--config", config, "Configuration file");
    replay->add_option("--est-out", est_out, "Write estimates as JSON lines");

    std::string truth_path, est_path;
    double cutoff = 100.0, order = 1.0;
    auto* ospa = app.add_subcommand("ospa", "Per-step OSPA between two state dumps");
    ospa->add_option("--truth", truth_path, "Truth dump")->required();
    ospa->add_option("--est", est_path, "Estimate dump")->required();
    ospa->add_option("--cutoff", cutoff, "OSPA cutoff c");
    ospa->add_option("--order", order, "OSPA order p");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run) return cmd_run(run_opt);
        if (*replay) return cmd_replay(dump, filter, scenario, config, est_out);
        if (*ospa) return cmd_ospa(truth_path, est_path, cutoff, order);
    } catch (const rgmphd::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const rgmphd::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
