#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/metrics.hpp"
#include "rgmphd/phd_extended.hpp"
#include "rgmphd/phd_robust.hpp"
#include "rgmphd/phd_standard.hpp"
#include "rgmphd/rng.hpp"
#include "rgmphd/scenarios.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace rgmphd {

inline const std::vector<std::string>& known_filters() {
    static const std::vector<std::string> names{"standard", "robust", "robust_extended"};
    return names;
}

struct ExperimentConfig {
    ScenarioConfig scenario;
    std::vector<std::string> filters{"standard", "robust"};
    std::size_t runs = 100;
    std::uint64_t seed = 1;
    ComponentManagementConfig management;
    AdaptationConfig adaptation;
    ExtendedTargetModel target;
    OspaConfig ospa;
    std::optional<double> filter_detection;  // filter-side p_D; defaults to the schedule mean
    std::string output_dir = "results";
    std::string dump_dir;  // empty: no dumps
    std::size_t workers = 1;
    bool timing = true;  // false writes runtime as 0 for byte-reproducible output
};

// ---------------------------------------------------------------------------
// Configuration parsing
//
// Flat `key = value` lines; `#` starts a comment. A document whose first
// non-blank character is '{' is read as a JSON object with the same keys.
// `scenario` is applied first so that the other keys override its defaults.

namespace detail {

struct RawEntry {
    std::string value;
    std::size_t line;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const RawEntry& e) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(e.line, key, "expected a number, got '" + e.value + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& key, const RawEntry& e) {
    if (e.value.empty() || e.value.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(e.line, key, "expected a non-negative integer, got '" + e.value + "'");
    try {
        return std::stoull(e.value);
    } catch (const std::exception&) {
        throw ParseError(e.line, key, "integer out of range");
    }
}

inline bool parse_bool(const std::string& key, const RawEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ParseError(e.line, key, "expected true or false, got '" + e.value + "'");
}

inline std::vector<std::pair<std::string, RawEntry>> tokenize_flat(const std::string& text) {
    std::vector<std::pair<std::string, RawEntry>> out;
    std::stringstream ss(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(ss, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(n, "", "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(n, "", "missing key");
        out.push_back({key, {trim(line.substr(eq + 1)), n}});
    }
    return out;
}

inline std::vector<std::pair<std::string, RawEntry>> tokenize_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(1, "", e.what());
    }
    if (!doc.is_object()) throw ParseError(1, "", "JSON configuration must be an object");
    std::vector<std::pair<std::string, RawEntry>> out;
    std::size_t n = 0;
    for (const auto& [key, val] : doc.items()) {
        ++n;
        std::string s;
        if (val.is_string()) {
            s = val.get<std::string>();
        } else if (val.is_array()) {
            for (const auto& item : val) {
                if (!s.empty()) s += ",";
                s += item.is_string() ? item.get<std::string>() : item.dump();
            }
        } else {
            s = val.dump();
        }
        out.push_back({key, {s, n}});
    }
    return out;
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
    auto prob = [](const std::string& key, double v) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(key, "must lie in [0, 1]");
    };
    if (c.runs < 1) throw ValidationError("runs", "must be at least 1");
    if (c.workers < 1) throw ValidationError("workers", "must be at least 1");
    if (c.scenario.duration < 1) throw ValidationError("duration", "must be at least 1");
    if (!(c.scenario.dt > 0.0)) throw ValidationError("dt", "must be positive");
    if (!(c.scenario.birth_rate >= 0.0)) throw ValidationError("birth_rate", "must be non-negative");
    if (!(c.scenario.clutter_rate >= 0.0)) throw ValidationError("clutter_rate", "must be non-negative");
    if (c.scenario.detection.levels.empty()) throw ValidationError("detection", "needs at least one level");
    for (double l : c.scenario.detection.levels) prob("detection", l);
    prob("survival", c.scenario.survival);
    if (c.filter_detection) prob("filter_p_detect", *c.filter_detection);
    if (!(c.scenario.region_half_width > 0.0)) throw ValidationError("region_half_width", "must be positive");
    if (c.filters.empty()) throw ValidationError("filters", "select at least one filter");
    for (const auto& f : c.filters)
        if (std::find(known_filters().begin(), known_filters().end(), f) == known_filters().end())
            throw ValidationError("filters", "unknown filter '" + f + "'");
    if (!(c.management.prune_threshold >= 0.0)) throw ValidationError("prune_threshold", "must be non-negative");
    if (!(c.management.merge_threshold >= 0.0)) throw ValidationError("merge_threshold", "must be non-negative");
    if (c.management.max_components < 1) throw ValidationError("max_components", "must be at least 1");
    if (!(c.management.eig_floor > 0.0 && c.management.eig_ceiling > c.management.eig_floor))
        throw ValidationError("eig_floor", "need 0 < eig_floor < eig_ceiling");
    if (!(c.adaptation.lambda_f >= 0.0)) throw ValidationError("lambda_f", "must be non-negative");
    if (!(c.adaptation.lambda_g >= 0.0)) throw ValidationError("lambda_g", "must be non-negative");
    if (!(c.adaptation.gamma >= 0.0)) throw ValidationError("gamma", "must be non-negative");
    if (!(c.adaptation.nu_max > 2.0)) throw ValidationError("nu_max", "must exceed 2");
    if (c.adaptation.kurtosis_window < 1) throw ValidationError("kurtosis_window", "must be at least 1");
    if (!(c.target.rate >= 0.0)) throw ValidationError("extended_rate", "must be non-negative");
    if (!(c.ospa.cutoff > 0.0)) throw ValidationError("ospa_cutoff", "must be positive");
    if (!(c.ospa.order >= 1.0)) throw ValidationError("ospa_order", "must be at least 1");
}

/// Parses a configuration document into a validated ExperimentConfig.
/// Unknown keys raise ParseError; out-of-range values raise ValidationError.
inline ExperimentConfig parse_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool is_json = first != std::string::npos && text[first] == '{';
    const auto entries = is_json ? detail::tokenize_json(text) : detail::tokenize_flat(text);

    ExperimentConfig c;
    for (const auto& [key, e] : entries) {
        if (key != "scenario") continue;
        const auto kind = scenario_from_string(e.value);
        if (!kind) throw ParseError(e.line, key, "unknown scenario '" + e.value + "'");
        c.scenario = default_scenario(*kind);
    }

    using Setter = std::function<void(const std::string&, const detail::RawEntry&)>;
    auto num = [](double& dst) -> Setter {
        return [&dst](const std::string& k, const detail::RawEntry& e) { dst = detail::parse_double(k, e); };
    };
    auto size = [](std::size_t& dst) -> Setter {
        return [&dst](const std::string& k, const detail::RawEntry& e) {
            dst = static_cast<std::size_t>(detail::parse_uint(k, e));
        };
    };
    auto flag = [](bool& dst) -> Setter {
        return [&dst](const std::string& k, const detail::RawEntry& e) { dst = detail::parse_bool(k, e); };
    };

    auto& s = c.scenario;
    auto& m = c.management;
    auto& a = c.adaptation;
    const std::map<std::string, Setter> setters{
        {"scenario", [](const std::string&, const detail::RawEntry&) {}},
        {"runs", size(c.runs)},
        {"seed", [&c](const std::string& k, const detail::RawEntry& e) { c.seed = detail::parse_uint(k, e); }},
        {"filters", [&c](const std::string&, const detail::RawEntry& e) { c.filters = detail::split_list(e.value); }},
        {"output_dir", [&c](const std::string&, const detail::RawEntry& e) { c.output_dir = e.value; }},
        {"dump_dir", [&c](const std::string&, const detail::RawEntry& e) { c.dump_dir = e.value; }},
        {"workers", size(c.workers)},
        {"timing", flag(c.timing)},
        {"duration", size(s.duration)},
        {"dt", num(s.dt)},
        {"birth_rate", num(s.birth_rate)},
        {"clutter_rate", num(s.clutter_rate)},
        {"detection",
         [&s](const std::string& k, const detail::RawEntry& e) {
             s.detection.levels.clear();
             for (const auto& item : detail::split_list(e.value))
                 s.detection.levels.push_back(detail::parse_double(k, {item, e.line}));
         }},
        {"detection_period", size(s.detection.period)},
        {"survival", num(s.survival)},
        {"region_half_width", num(s.region_half_width)},
        {"initial_tracks", size(s.initial_tracks)},
        {"filter_p_detect",
         [&c](const std::string& k, const detail::RawEntry& e) { c.filter_detection = detail::parse_double(k, e); }},
        {"prune_threshold", num(m.prune_threshold)},
        {"merge_threshold", num(m.merge_threshold)},
        {"max_components", size(m.max_components)},
        {"eig_floor", num(m.eig_floor)},
        {"eig_ceiling", num(m.eig_ceiling)},
        {"lambda_f", num(a.lambda_f)},
        {"lambda_g", num(a.lambda_g)},
        {"gamma", num(a.gamma)},
        {"gamma_w", num(a.gamma_w)},
        {"nu_max", num(a.nu_max)},
        {"kurtosis_window", size(a.kurtosis_window)},
        {"adaptive", flag(a.adaptive)},
        {"pinned_alpha", num(a.pinned.alpha)},
        {"pinned_birth_scale", num(a.pinned.birth_scale)},
        {"pinned_tail_mix", num(a.pinned.tail_mix)},
        {"pinned_w_global", num(a.pinned.w_global)},
        {"extended_rate", num(c.target.rate)},
        {"ospa_cutoff", num(c.ospa.cutoff)},
        {"ospa_order", num(c.ospa.order)},
    };
    for (const auto& [key, e] : entries) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ParseError(e.line, key, "unknown key");
        it->second(key, e);
    }
    validate(c);
    return c;
}

// ---------------------------------------------------------------------------
// Running filters

struct FilterRun {
    RunRecord record;
    std::vector<std::vector<Vector>> estimates;
};

/// Runs one named filter over a measurement stream, scoring each step's
/// estimates against the truth with OSPA. Library errors mark the record as
/// failed and stop the run.
inline FilterRun run_filter(const std::string& name, const std::vector<MeasurementFrame>& frames,
                            const ScenarioTruth& truth, const SystemModels& models, const ExperimentConfig& cfg) {
    FilterRun out;
    out.record.filter = name;
    GaussianMixture standard_state;
    RobustFilterConfig robust_cfg{cfg.management, cfg.adaptation};
    ExtendedFilterConfig ext_cfg;
    ext_cfg.management = cfg.management;
    ext_cfg.adaptation = cfg.adaptation;
    ext_cfg.target = cfg.target;
    auto robust_state = initial_robust_state(robust_cfg);

    auto& rec = out.record;
    try {
        for (std::size_t k = 0; k < frames.size(); ++k) {
            StepDiagnostics d;
            if (name == "standard") {
                auto r = standard_step(standard_state, frames[k].measurements, models, cfg.management);
                standard_state = std::move(r.posterior);
                d = std::move(r.diagnostics);
            } else if (name == "robust") {
                auto r = step(robust_state, frames[k].measurements, models, robust_cfg);
                robust_state = std::move(r.state);
                d = std::move(r.diagnostics);
            } else if (name == "robust_extended") {
                auto r = extended_step(robust_state, frames[k].measurements, models, ext_cfg);
                robust_state = std::move(r.state);
                d = std::move(r.diagnostics);
            } else {
                throw ValidationError("filters", "unknown filter '" + name + "'");
            }
            const auto truth_states = truth.states_at(k);
            rec.ospa.push_back(ospa(d.estimates, truth_states, cfg.ospa));
            rec.n_true.push_back(truth_states.size());
            rec.n_est.push_back(d.estimates.size());
            rec.max_condition.push_back(d.max_condition);
            rec.runtime.push_back(cfg.timing ? d.times : PhaseTimes{});
            rec.alpha.push_back(d.alpha);
            rec.beta.push_back(d.beta);
            rec.w_global.push_back(d.w_global);
            rec.components.push_back(d.component_count);
            rec.total_mass.push_back(d.total_mass);
            out.estimates.push_back(std::move(d.estimates));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        rec.failed = true;
        rec.failure = e.what();
    }
    return out;
}

inline double filter_detection(const ExperimentConfig& cfg) {
    return cfg.filter_detection.value_or(cfg.scenario.detection.mean());
}

/// Scenario of Monte Carlo run r: the configured scenario with the run's
/// child seed.
inline ScenarioConfig run_scenario(const ExperimentConfig& cfg, std::size_t run) {
    ScenarioConfig s = cfg.scenario;
    s.seed = child_seed(cfg.seed, run);
    return s;
}

// ---------------------------------------------------------------------------
// Summary

struct FilterSummary {
    std::string filter;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double ospa_mean = 0.0;
    double ospa_std = 0.0;
    double card_mean_abs = 0.0;  // mu_N
    double card_rms = 0.0;       // sigma_N
    double runtime_mean_ms = 0.0;
    double max_condition = 0.0;
    double components_mean = 0.0;
    std::size_t components_max = 0;

    bool operator==(const FilterSummary&) const = default;
};

struct Improvement {
    std::string baseline;
    std::string candidate;
    double ospa_pct = 0.0;         // 100 (baseline - candidate) / baseline
    double card_rms_pct = 0.0;

    bool operator==(const Improvement&) const = default;
};

struct SummaryReport {
    std::string scenario;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<FilterSummary> filters;
    std::vector<Improvement> improvements;

    bool operator==(const SummaryReport&) const = default;

    [[nodiscard]] const FilterSummary* find(const std::string& name) const {
        for (const auto& f : filters)
            if (f.filter == name) return &f;
        return nullptr;
    }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FilterSummary, filter, runs, failures, ospa_mean, ospa_std, card_mean_abs, card_rms,
                                   runtime_mean_ms, max_condition, components_mean, components_max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Improvement, baseline, candidate, ospa_pct, card_rms_pct)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SummaryReport, scenario, runs, seed, filters, improvements)

namespace detail {

inline double improvement_pct(double baseline, double candidate) {
    return baseline > 0.0 ? 100.0 * (baseline - candidate) / baseline : 0.0;
}

}  // namespace detail

/// Aggregates records per filter. OSPA mean and (population) standard
/// deviation are taken over every step of every run; runtime excludes step 0.
inline SummaryReport summarize(const std::vector<RunRecord>& records, const ExperimentConfig& cfg) {
    SummaryReport rep;
    rep.scenario = to_string(cfg.scenario.kind);
    rep.runs = cfg.runs;
    rep.seed = cfg.seed;
    for (const auto& name : cfg.filters) {
        FilterSummary s;
        s.filter = name;
        std::vector<RunRecord> mine;
        double ospa_sum = 0.0, ospa_sq = 0.0, rt_sum = 0.0, comp_sum = 0.0;
        std::size_t n = 0, rt_n = 0;
        for (const auto& r : records) {
            if (r.filter != name) continue;
            ++s.runs;
            if (r.failed) ++s.failures;
            mine.push_back(r);
            for (std::size_t k = 0; k < r.steps(); ++k) {
                ospa_sum += r.ospa[k];
                ospa_sq += r.ospa[k] * r.ospa[k];
                comp_sum += static_cast<double>(r.components[k]);
                s.components_max = std::max(s.components_max, r.components[k]);
                s.max_condition = std::max(s.max_condition, r.max_condition[k]);
                ++n;
                if (k > 0) {
                    rt_sum += r.runtime[k].total_ms();
                    ++rt_n;
                }
            }
        }
        if (n > 0) {
            const auto dn = static_cast<double>(n);
            s.ospa_mean = ospa_sum / dn;
            s.ospa_std = std::sqrt(std::max(0.0, ospa_sq / dn - s.ospa_mean * s.ospa_mean));
            s.components_mean = comp_sum / dn;
            const auto card = cardinality_stats(mine);
            s.card_mean_abs = card.mean_abs_error;
            s.card_rms = card.rms_error;
        }
        if (rt_n > 0) s.runtime_mean_ms = rt_sum / static_cast<double>(rt_n);
        rep.filters.push_back(std::move(s));
    }
    for (const auto& a : rep.filters) {
        for (const auto& b : rep.filters) {
            if (a.filter == b.filter) continue;
            rep.improvements.push_back({a.filter, b.filter, detail::improvement_pct(a.ospa_mean, b.ospa_mean),
                                        detail::improvement_pct(a.card_rms, b.card_rms)});
        }
    }
    return rep;
}

struct MonteCarloResult {
    std::vector<RunRecord> records;  // run-major, filters in configured order
    SummaryReport summary;
};

/// Runs every configured filter on `runs` independently seeded scenarios.
/// Runs are distributed over `workers` threads; results are stored by run
/// index, so the output does not depend on the worker count.
inline MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::size_t nf = cfg.filters.size();
    std::vector<RunRecord> records(cfg.runs * nf);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= cfg.runs) return;
            try {
                const auto scen = run_scenario(cfg, r);
                const auto truth = generate_truth(scen);
                const auto models = filter_models(scen, filter_detection(cfg));
                const auto frames = generate_measurements(truth, scen,
                                                          scenario_measurement_model(scen, scen.detection.levels.front()),
                                                          scenario_clutter(scen));
                if (!cfg.dump_dir.empty()) {
                    std::ofstream os(std::filesystem::path(cfg.dump_dir) / ("run_" + std::to_string(r) + "_scenario.jsonl"));
                    write_scenario_dump(os, truth, frames);
                }
                for (std::size_t f = 0; f < nf; ++f) {
                    auto fr = run_filter(cfg.filters[f], frames, truth, models, cfg);
                    fr.record.run = r;
                    if (!cfg.dump_dir.empty()) {
                        std::ofstream os(std::filesystem::path(cfg.dump_dir) /
                                         ("run_" + std::to_string(r) + "_" + cfg.filters[f] + "_estimates.jsonl"));
                        write_estimate_dump(os, fr.estimates);
                    }
                    records[r * nf + f] = std::move(fr.record);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(cfg.runs);
            }
        }
    };

    if (!cfg.dump_dir.empty()) std::filesystem::create_directories(cfg.dump_dir);
    const std::size_t nthreads = std::min(cfg.workers, cfg.runs);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    MonteCarloResult res;
    res.summary = summarize(records, cfg);
    res.records = std::move(records);
    return res;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* kStepCsvHeader =
    "run,step,filter,ospa,n_true,n_est,alpha,beta,w_global,runtime_ms,max_cond,components";

/// Per-step CSV rows in canonical (run, step, filter) order.
inline void write_step_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    std::vector<const RunRecord*> order;
    for (const auto& r : records) order.push_back(&r);
    std::size_t max_steps = 0;
    for (const auto* r : order) max_steps = std::max(max_steps, r->steps());
    std::stable_sort(order.begin(), order.end(), [](const RunRecord* a, const RunRecord* b) {
        return a->run != b->run ? a->run < b->run : a->filter < b->filter;
    });
    os << kStepCsvHeader << '\n';
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && order[j]->run == order[i]->run) ++j;
        for (std::size_t k = 0; k < max_steps; ++k) {
            for (std::size_t f = i; f < j; ++f) {
                const auto& r = *order[f];
                if (k >= r.steps()) continue;
                os << r.run << ',' << k << ',' << r.filter << ',' << format_double(r.ospa[k]) << ',' << r.n_true[k]
                   << ',' << r.n_est[k] << ',' << format_double(r.alpha[k]) << ',' << format_double(r.beta[k]) << ','
                   << format_double(r.w_global[k]) << ',' << format_double(r.runtime[k].total_ms()) << ','
                   << format_double(r.max_condition[k]) << ',' << r.components[k] << '\n';
            }
        }
        i = j;
    }
}

/// Mean OSPA per step and filter, one column per filter.
inline void write_ospa_series(std::ostream& os, const std::vector<RunRecord>& records,
                              const std::vector<std::string>& filters) {
    std::size_t max_steps = 0;
    for (const auto& r : records) max_steps = std::max(max_steps, r.steps());
    os << "step";
    for (const auto& f : filters) os << ',' << f;
    os << '\n';
    for (std::size_t k = 0; k < max_steps; ++k) {
        os << k;
        for (const auto& f : filters) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : records) {
                if (r.filter != f || k >= r.steps()) continue;
                sum += r.ospa[k];
                ++n;
            }
            os << ',' << format_double(n > 0 ? sum / static_cast<double>(n) : 0.0);
        }
        os << '\n';
    }
}

inline std::string summary_json(const SummaryReport& rep) { return nlohmann::json(rep).dump(2) + "\n"; }

inline SummaryReport parse_summary_json(const std::string& text) {
    return nlohmann::json::parse(text).get<SummaryReport>();
}

/// Writes steps.csv, summary.json and ospa_series.csv into `dir`.
inline void emit_results(const MonteCarloResult& res, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir / "steps.csv");
        write_step_csv(os, res.records);
    }
    {
        std::ofstream os(dir / "summary.json");
        os << summary_json(res.summary);
    }
    {
        std::ofstream os(dir / "ospa_series.csv");
        write_ospa_series(os, res.records, cfg.filters);
    }
}

}  // namespace rgmphd
