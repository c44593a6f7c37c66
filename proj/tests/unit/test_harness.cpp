#include "rgmphd/harness.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace rgmphd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExperimentConfig small_config(std::size_t runs = 2, std::size_t steps = 30) {
    auto cfg = parse_config("runs = " + std::to_string(runs) + "\nduration = " + std::to_string(steps) +
                            "\nseed = 5\ntiming = false\n");
    return cfg;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cols.push_back(cell);
        rows.push_back(std::move(cols));
    }
    return rows;
}

std::string csv_of(const MonteCarloResult& r) {
    std::ostringstream os;
    write_step_csv(os, r.records);
    return os.str();
}

}  // namespace

TEST_CASE("config defaults", "[harness]") {
    const auto cfg = parse_config("");
    CHECK(cfg.scenario.kind == ScenarioKind::linear);
    CHECK(cfg.runs == 100);
    CHECK(cfg.filters == std::vector<std::string>{"standard", "robust"});
    CHECK(cfg.management.prune_threshold == 1e-5);
    CHECK(cfg.management.merge_threshold == 4.0);
    CHECK(cfg.adaptation.lambda_f == 0.1);
    CHECK(cfg.adaptation.lambda_g == 0.05);
    CHECK(cfg.adaptation.gamma == 0.2);
    CHECK(cfg.ospa.cutoff == 100.0);
    CHECK(cfg.ospa.order == 1.0);
    CHECK(cfg.scenario.clutter_rate == 10.0);
    CHECK(cfg.scenario.detection.at(0) == 0.98);
}

TEST_CASE("config overrides and scenario presets", "[harness]") {
    const auto cfg = parse_config("# comment\nlambda_f = 0.2   # trailing\nclutter_rate = 12\nscenario = high_clutter\n"
                                  "filters = standard, robust_extended\ndetection = 0.5, 0.8\n");
    CHECK(cfg.adaptation.lambda_f == 0.2);
    CHECK(cfg.scenario.kind == ScenarioKind::high_clutter);
    CHECK(cfg.scenario.clutter_rate == 12.0);  // explicit key beats the preset
    CHECK(cfg.scenario.detection.levels == std::vector<double>{0.5, 0.8});
    CHECK(cfg.filters == std::vector<std::string>{"standard", "robust_extended"});

    const auto preset = parse_config("scenario = high_clutter");
    CHECK(preset.scenario.clutter_rate == 25.0);
    CHECK(filter_detection(preset) == 0.75);
}

TEST_CASE("JSON configuration", "[harness]") {
    const auto cfg = parse_config(R"({"runs": 3, "scenario": "maneuvering", "filters": ["robust"], "timing": false})");
    CHECK(cfg.runs == 3);
    CHECK(cfg.scenario.kind == ScenarioKind::maneuvering);
    CHECK(cfg.filters == std::vector<std::string>{"robust"});
    CHECK_FALSE(cfg.timing);
}

TEST_CASE("config errors", "[harness]") {
    try {
        parse_config("runs = 2\nbogus = 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.key() == "bogus");
    }
    CHECK_THROWS_AS(parse_config("runs = two"), ParseError);
    CHECK_THROWS_AS(parse_config("runs"), ParseError);
    CHECK_THROWS_AS(parse_config("scenario = underwater"), ParseError);
    CHECK_THROWS_AS(parse_config("runs = 0"), ValidationError);
    CHECK_THROWS_AS(parse_config("filters = kalman"), ValidationError);
    CHECK_THROWS_AS(parse_config("detection = 1.5"), ValidationError);
    CHECK_THROWS_AS(parse_config("ospa_order = 0.5"), ValidationError);
    CHECK_THROWS_AS(parse_config("{\"runs\": "), ParseError);
}

TEST_CASE("monte carlo runs are deterministic", "[harness]") {
    const auto cfg = small_config();
    const auto a = run_monte_carlo(cfg);
    const auto b = run_monte_carlo(cfg);
    CHECK(a.summary == b.summary);
    CHECK(csv_of(a) == csv_of(b));

    auto par = cfg;
    par.workers = 2;
    CHECK(csv_of(run_monte_carlo(par)) == csv_of(a));
}

TEST_CASE("output files", "[harness]") {
    auto cfg = small_config(2, 100);
    const auto res = run_monte_carlo(cfg);
    const auto csv = csv_of(res);
    const auto rows = read_csv(csv);
    REQUIRE(rows.size() == 1 + 400);
    CHECK(csv.substr(0, csv.find('\n')) == kStepCsvHeader);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() == 12);

    SECTION("summary round-trips through JSON") {
        CHECK(parse_summary_json(summary_json(res.summary)) == res.summary);
    }
    SECTION("summary aggregates match the CSV") {
        std::map<std::string, std::vector<double>> ospa;
        std::map<std::string, std::vector<double>> err;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            ospa[rows[i][2]].push_back(std::stod(rows[i][3]));
            err[rows[i][2]].push_back(std::stod(rows[i][5]) - std::stod(rows[i][4]));
        }
        for (const auto& f : res.summary.filters) {
            const auto& v = ospa[f.filter];
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            const double sd = std::sqrt(var / static_cast<double>(v.size()));
            CHECK_THAT(f.ospa_mean, WithinRel(mean, 1e-12));
            CHECK_THAT(f.ospa_std, WithinRel(sd, 1e-9));
            double mae = 0.0, mse = 0.0;
            for (double e : err[f.filter]) {
                mae += std::abs(e);
                mse += e * e;
            }
            const auto n = static_cast<double>(err[f.filter].size());
            CHECK_THAT(f.card_mean_abs, WithinRel(mae / n, 1e-12));
            CHECK_THAT(f.card_rms, WithinRel(std::sqrt(mse / n), 1e-12));
        }
    }
    SECTION("emitted files") {
        const auto dir = std::filesystem::temp_directory_path() / "rgmphd_harness_test";
        std::filesystem::remove_all(dir);
        emit_results(res, cfg, dir);
        CHECK(std::filesystem::exists(dir / "steps.csv"));
        CHECK(std::filesystem::exists(dir / "summary.json"));
        std::ifstream series(dir / "ospa_series.csv");
        std::string header;
        std::getline(series, header);
        CHECK(header == "step,standard,robust");
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("pinned robust filter matches standard OSPA series", "[harness]") {
    auto cfg = small_config(2, 100);
    cfg.adaptation.adaptive = false;
    const auto res = run_monte_carlo(cfg);
    for (std::size_t r = 0; r < 2; ++r) {
        const auto& a = res.records[r * 2];
        const auto& b = res.records[r * 2 + 1];
        REQUIRE(a.filter == "standard");
        REQUIRE(b.filter == "robust");
        REQUIRE(a.steps() == b.steps());
        for (std::size_t k = 0; k < a.steps(); ++k) CHECK_THAT(a.ospa[k], WithinAbs(b.ospa[k], 1e-9));
    }
}

TEST_CASE("OSPA column matches recomputation from dumps", "[harness]") {
    auto cfg = small_config(1, 40);
    const auto dir = std::filesystem::temp_directory_path() / "rgmphd_dump_test";
    std::filesystem::remove_all(dir);
    cfg.dump_dir = dir.string();
    const auto res = run_monte_carlo(cfg);

    std::ifstream ts(dir / "run_0_scenario.jsonl");
    const auto truth = read_state_sets(ts);
    for (const auto& rec : res.records) {
        std::ifstream es(dir / ("run_0_" + rec.filter + "_estimates.jsonl"));
        const auto est = read_state_sets(es);
        REQUIRE(est.size() == truth.size());
        for (std::size_t k = 0; k < est.size(); ++k) CHECK(ospa(est[k], truth[k], cfg.ospa) == rec.ospa[k]);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("extended filter runs through the harness", "[harness]") {
    auto cfg = small_config(1, 15);
    cfg.filters = {"robust_extended"};
    const auto res = run_monte_carlo(cfg);
    REQUIRE(res.records.size() == 1);
    CHECK_FALSE(res.records[0].failed);
    CHECK(res.records[0].steps() == 15);
}
