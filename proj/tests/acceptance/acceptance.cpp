// Acceptance checks for the library and the `track` CLI. Prints one
// PASS/FAIL line per criterion and exits nonzero if any criterion fails.

#include "rgmphd/rgmphd.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

using namespace rgmphd;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome reduction_oracle() {
    const auto t0 = Clock::now();
    auto scen = default_scenario(ScenarioKind::linear);
    scen.seed = 2024;
    const auto truth = generate_truth(scen);
    const auto frames =
        generate_measurements(truth, scen, scenario_measurement_model(scen, 0.98), scenario_clutter(scen));
    const auto models = filter_models(scen, 0.98);

    RobustFilterConfig cfg;
    cfg.adaptation.adaptive = false;
    auto robust = initial_robust_state(cfg);
    GaussianMixture standard;
    double worst = 0.0;
    bool shape_ok = true;
    for (const auto& fr : frames) {
        auto a = standard_step(standard, fr.measurements, models, cfg.management);
        auto b = step(robust, fr.measurements, models, cfg);
        if (a.posterior.size() != b.state.posterior.size() ||
            a.diagnostics.estimates.size() != b.diagnostics.estimates.size()) {
            shape_ok = false;
            break;
        }
        for (std::size_t j = 0; j < a.posterior.size(); ++j) {
            const auto& x = a.posterior.components[j];
            const auto& y = b.state.posterior.components[j];
            worst = std::max({worst, oracle::rel_diff(x.weight, y.weight), oracle::rel_diff(x.mean, y.mean),
                              oracle::rel_diff(x.covariance, y.covariance)});
        }
        for (std::size_t i = 0; i < a.diagnostics.estimates.size(); ++i)
            worst = std::max(worst, oracle::rel_diff(a.diagnostics.estimates[i], b.diagnostics.estimates[i]));
        standard = std::move(a.posterior);
        robust = std::move(b.state);
    }
    const double secs = seconds_since(t0);
    return {shape_ok && worst <= 1e-9 && secs < 5.0,
            fmt("100 steps, max rel diff %.3g, shapes %s, %.2f s", worst, shape_ok ? "equal" : "differ", secs)};
}

Outcome count_identities() {
    SplitMix64 rng(7001);
    std::uniform_int_distribution<std::size_t> small(0, 6);
    std::uniform_int_distribution<std::size_t> nz(0, 15);
    const auto motion = fixtures::cv_motion();
    const auto clutter = fixtures::square_clutter();
    std::size_t bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto prior = fixtures::random_mixture(small(rng), rng);
        const auto spawn = fixtures::random_spawn(small(rng) % 3, rng);
        const auto birth = fixtures::random_birth(small(rng), rng);
        const auto z = fixtures::random_measurements(nz(rng), rng);
        const auto mm = fixtures::linear_sensor(t % 2 ? 0.9 : 0.98);

        const auto pred = predict(prior, motion, spawn, birth);
        if (pred.size() != prior.size() * (1 + spawn.terms.size()) + birth.intensity.size()) ++bad;
        if (update(pred, z, mm, clutter).size() != pred.size() * (1 + z.size())) ++bad;

        // The robust recursion keeps the same update identity and adds one
        // memory copy per prior component in prediction.
        const auto rpred = robust_predict(prior, motion, spawn, birth, 0.2, 0.6);
        if (rpred.size() != prior.size() * (2 + spawn.terms.size()) + birth.intensity.size()) ++bad;
        RobustnessState rs;
        rs.w_global = 0.8;
        rs.beta = 0.3;
        rs.dof = 6.0;
        rs.measurement_weights.assign(z.size(), z.empty() ? 0.0 : 1.0 / static_cast<double>(z.size()));
        if (robust_update(rpred, z, mm, clutter, rs).size() != rpred.size() * (1 + z.size())) ++bad;
    }
    return {bad == 0, fmt("1000 randomized steps, %zu mismatches", bad)};
}

Outcome ospa_oracle() {
    const auto t0 = Clock::now();
    SplitMix64 rng(7002);
    std::uniform_int_distribution<std::size_t> card(0, 5);
    std::uniform_real_distribution<double> u(-150.0, 150.0);
    auto set = [&](std::size_t n) {
        std::vector<Vector> s;
        for (std::size_t i = 0; i < n; ++i) s.push_back(Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)));
        return s;
    };
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const auto x = set(card(rng));
        const auto y = set(card(rng));
        worst = std::max(worst, std::abs(ospa(x, y) - oracle::brute_force_ospa(x, y, 100.0, 1.0)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 30.0, fmt("10^4 pairs, max abs diff %.3g, %.2f s", worst, secs)};
}

Outcome merge_moments() {
    SplitMix64 rng(7003);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ComponentManagementConfig cfg;
    cfg.prune_threshold = 0.0;
    cfg.merge_threshold = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::size_t weight_mismatch = 0;
    for (int t = 0; t < 10000; ++t) {
        GaussianMixture mix;
        for (int i = 0; i < 2; ++i) {
            Vector m(4);
            for (int d = 0; d < 4; ++d) m(d) = 10.0 * (2.0 * u(rng) - 1.0);
            mix.components.push_back({0.01 + u(rng), m, fixtures::random_spd(4, rng, 1.0 + 10.0 * u(rng))});
        }
        const auto merged = prune_and_merge(mix, cfg);
        if (merged.size() != 1) {
            ++weight_mismatch;
            continue;
        }
        const auto& a = mix.components[0];
        const auto& b = mix.components[1];
        const auto ref = oracle::mixture_moments({a.weight, b.weight}, {a.mean, b.mean}, {a.covariance, b.covariance});
        const auto& c = merged.components[0];
        if (c.weight != a.weight + b.weight) ++weight_mismatch;
        worst = std::max({worst, oracle::rel_diff(c.mean, ref.mean), oracle::rel_diff(c.covariance, ref.cov)});
    }
    return {weight_mismatch == 0 && worst <= 1e-10,
            fmt("10^4 merges, weight mismatches %zu, max moment rel diff %.3g", weight_mismatch, worst)};
}

Outcome heavy_tail() {
    SplitMix64 rng(7004);
    const double nu = 6.0;
    Matrix s(2, 2);
    s << 14.0, 3.0, 3.0, 9.0;
    const Vector loc = Eigen::Vector2d(5.0, -2.0);
    const Matrix scale = moment_matched_t_scale(s, nu);
    const std::size_t n = 1000000;
    Vector sum = Vector::Zero(2);
    Matrix outer = Matrix::Zero(2, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector x = sample_student_t(loc, scale, nu, rng);
        sum += x;
        outer += x * x.transpose();
    }
    const Vector mean = sum / static_cast<double>(n);
    const Matrix cov = (outer - static_cast<double>(n) * mean * mean.transpose()) / static_cast<double>(n - 1);
    const double cov_err = (cov - s).norm() / s.norm();

    const auto mm = fixtures::linear_sensor();
    SplitMix64 rng2(7005);
    double lik_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto comp = fixtures::random_mixture(1, rng2).components[0];
        const Vector z = mm.observation * comp.mean + fixtures::random_measurements(1, rng2, 20.0)[0];
        const Matrix sz = mm.observation * comp.covariance * mm.observation.transpose() + mm.noise;
        const double g = gaussian_density(z, mm.observation * comp.mean, sz);
        lik_err = std::max(lik_err, oracle::rel_diff(robust_likelihood(z, comp, mm, nu, 0.0), g));
    }
    return {cov_err <= 0.01 && lik_err <= 1e-14,
            fmt("covariance rel err %.4f over 10^6 draws, beta=0 likelihood rel diff %.3g", cov_err, lik_err)};
}

Outcome adaptation_laws() {
    bool ok = alpha_law(0.0, 0.1) == 0.0 && std::abs(alpha_law(5.0, 0.1) - 0.393469) < 5e-7;
    SplitMix64 rng(7006);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    double alpha_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double e = u(rng);
        const double lf = u(rng) / 50.0;
        alpha_err = std::max(alpha_err, std::abs(alpha_law(e, lf) - (1.0 - std::exp(-lf * e))));
    }
    ok = ok && alpha_err == 0.0;

    // Softmax sums through the full adaptation step on random scenes.
    const auto motion = fixtures::cv_motion();
    const auto mm = fixtures::linear_sensor();
    AdaptationConfig cfg;
    double sum_err = 0.0;
    for (int t = 0; t < 500; ++t) {
        const auto prior = fixtures::random_mixture(1 + t % 8, rng);
        const auto pred = robust_predict(prior, motion, {}, fixtures::random_birth(2, rng), 0.1, 0.5);
        const auto z = fixtures::random_measurements(1 + t % 40, rng);
        const auto rs = adapt_parameters(prior, pred, z, motion, mm, cfg, initial_robustness(cfg));
        const double s = std::accumulate(rs.measurement_weights.begin(), rs.measurement_weights.end(), 0.0);
        sum_err = std::max(sum_err, std::abs(s - 1.0));
    }
    ok = ok && sum_err <= 1e-12;

    const double balance = global_weight_law(0.8, 5.0, 4, 1.0);
    ok = ok && balance == 0.5;
    return {ok, fmt("alpha max err %.3g, alpha(5)=%.6f, max |sum w(z) - 1| %.3g, w_global at balance %.17g", alpha_err,
                    alpha_law(5.0, 0.1), sum_err, balance)};
}

ExperimentConfig benchmark_config(ScenarioKind kind, std::size_t runs, std::uint64_t seed) {
    auto cfg = parse_config("scenario = " + to_string(kind));
    cfg.runs = runs;
    cfg.seed = seed;
    cfg.timing = false;
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    return cfg;
}

Outcome directional_robustness() {
    const auto t0 = Clock::now();
    const auto cfg = benchmark_config(ScenarioKind::high_clutter, 50, 31);
    const auto res = run_monte_carlo(cfg);
    const auto* std_s = res.summary.find("standard");
    const auto* rob_s = res.summary.find("robust");
    const double secs = seconds_since(t0);
    if (std_s == nullptr || rob_s == nullptr) return {false, "missing filter summary"};
    const bool ok = rob_s->ospa_mean <= std_s->ospa_mean && rob_s->card_rms <= std_s->card_rms && secs < 600.0;
    return {ok, fmt("50 runs: OSPA standard %.2f robust %.2f; card RMSE standard %.2f robust %.2f; %.1f s",
                    std_s->ospa_mean, rob_s->ospa_mean, std_s->card_rms, rob_s->card_rms, secs)};
}

Outcome stability_bounds() {
    const ComponentManagementConfig mgmt;
    const double kappa_bound = mgmt.eig_ceiling / mgmt.eig_floor;
    double worst_ratio = 0.0;
    double worst_kappa = 0.0;
    std::size_t failures = 0;
    for (auto kind : {ScenarioKind::linear, ScenarioKind::nonlinear_ct, ScenarioKind::high_clutter,
                      ScenarioKind::maneuvering}) {
        const auto cfg = benchmark_config(kind, 50, 41);
        const auto res = run_monte_carlo(cfg);
        for (const auto& r : res.records) {
            if (r.failed) ++failures;
            for (std::size_t k = 0; k < r.steps(); ++k) {
                const double n = static_cast<double>(std::max<std::size_t>(r.n_true[k], 1));
                worst_ratio = std::max(worst_ratio, r.total_mass[k] / n);
                worst_kappa = std::max(worst_kappa, r.max_condition[k]);
            }
        }
    }
    return {failures == 0 && worst_ratio <= 10.0 && worst_kappa <= kappa_bound,
            fmt("4 scenarios x 50 runs: max mass/max(N,1) %.3f, max condition %.3g (bound %.3g), failed runs %zu",
                worst_ratio, worst_kappa, kappa_bound, failures)};
}

Outcome complexity_scaling() {
    SplitMix64 rng(7009);
    const auto mm = fixtures::linear_sensor(0.9);
    const auto clutter = fixtures::square_clutter();
    const std::vector<std::pair<std::size_t, std::size_t>> sweep{{50, 40}, {100, 30}, {100, 40}, {150, 40}, {200, 40}};
    struct Point {
        GaussianMixture pred;
        std::vector<Vector> z;
        RobustnessState rs;
        std::vector<double> times;
    };
    std::vector<Point> points;
    for (auto [j, nz] : sweep) {
        Point p{fixtures::random_mixture(j, rng), fixtures::random_measurements(nz, rng), {}, {}};
        p.rs.w_global = 0.9;
        p.rs.beta = 0.2;
        p.rs.dof = 6.0;
        p.rs.measurement_weights.assign(nz, 1.0 / static_cast<double>(nz));
        if (robust_update(p.pred, p.z, mm, clutter, p.rs).size() != j * (1 + nz))
            return {false, "unexpected component count"};
        points.push_back(std::move(p));
    }
    // Round-robin repetitions so drift in machine load hits every point alike.
    for (int rep = 0; rep < 41; ++rep) {
        for (auto& p : points) {
            const auto t0 = Clock::now();
            const auto out = robust_update(p.pred, p.z, mm, clutter, p.rs);
            p.times.push_back(seconds_since(t0));
        }
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& t = points[i].times;
        std::nth_element(t.begin(), t.begin() + 20, t.end());
        lx.push_back(std::log(static_cast<double>(sweep[i].first * sweep[i].second)));
        ly.push_back(std::log(t[20]));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope >= 0.8 && slope <= 1.3, fmt("J*|Z| from 2000 to 8000, log-log slope %.3f", slope)};
}

Outcome extended_target() {
    bool bell_ok = true;
    for (std::size_t n = 0; n <= 6; ++n) bell_ok = bell_ok && enumerate_partitions(n).size() == oracle::bell(n);

    SplitMix64 rng(7010);
    const auto mm = fixtures::linear_sensor(0.9);
    const auto clutter = fixtures::square_clutter();
    ExtendedTargetModel etm;
    const auto pred = fixtures::random_mixture(3, rng);
    const auto z = fixtures::random_measurements(3, rng);
    const auto parts = enumerate_partitions(z.size());
    std::size_t cells_with_low = 0;
    std::size_t cells_total = 0;
    for (const auto& p : parts) {
        for (const auto& c : p.cells) {
            ++cells_total;
            if (std::find(c.begin(), c.end(), 0) != c.end()) ++cells_with_low;
        }
    }
    RobustnessState rs;
    rs.w_global = 1.0;
    rs.measurement_weights = {5e-7, 0.6, 0.4};
    const auto pruned = extended_update(pred, z, parts, etm, mm, clutter, rs);
    const bool prune_ok = pruned.size() == pred.size() * (1 + cells_total - cells_with_low);

    rs.w_global = 0.65;
    rs.measurement_weights.clear();
    const auto empty = extended_update(pred, std::vector<Vector>{}, std::vector<Partition>{}, etm, mm, clutter, rs);
    bool empty_ok = empty.size() == pred.size();
    for (std::size_t j = 0; empty_ok && j < pred.size(); ++j) {
        const auto& a = empty.components[j];
        const auto& b = pred.components[j];
        empty_ok = a.weight == (1.0 - 0.65 * 0.9) * b.weight && a.mean == b.mean && a.covariance == b.covariance;
    }
    return {bell_ok && prune_ok && empty_ok,
            fmt("Bell counts %s, low-credibility cells %s, empty-Z update %s", bell_ok ? "ok" : "wrong",
                prune_ok ? "excluded" : "kept", empty_ok ? "exact" : "differs")};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string canonical_sort(const std::string& csv) {
    std::istringstream is(csv);
    std::string header;
    std::getline(is, header);
    std::vector<std::string> lines;
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    std::sort(lines.begin(), lines.end());
    std::string out = header + "\n";
    for (const auto& l : lines) out += l + "\n";
    return out;
}

Outcome determinism() {
#ifndef TRACK_BINARY
    return {false, "track binary not built"};
#else
    const auto dir = std::filesystem::temp_directory_path() / "rgmphd_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream cfg(dir / "experiment.cfg");
        cfg << "scenario = high_clutter\nruns = 6\nseed = 17\nduration = 60\n"
               "filters = standard, robust, robust_extended\ntiming = false\n";
    }
    std::string csv[2];
    const unsigned workers[2] = {1, 3};
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("out" + std::to_string(workers[i]));
        const std::string cmd = std::string("\"") + TRACK_BINARY + "\" run --config \"" +
                                (dir / "experiment.cfg").string() + "\" --workers " + std::to_string(workers[i]) +
                                " --out \"" + out.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "track run exited with an error"};
        csv[i] = read_file(out / "steps.csv");
    }
    std::filesystem::remove_all(dir);
    const bool same = !csv[0].empty() && canonical_sort(csv[0]) == canonical_sort(csv[1]);
    const bool raw_same = csv[0] == csv[1];
    return {same, fmt("workers 1 vs 3: sorted CSV %s, raw CSV %s (%zu bytes)", same ? "identical" : "different",
                      raw_same ? "identical" : "different", csv[0].size())};
#endif
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select criteria by label prefix, e.g. `acceptance AC3 AC9`.
    const std::vector<std::string> only(argv + 1, argv + argc);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"AC1 reduction oracle", reduction_oracle},
        {"AC2 component-count identities", count_identities},
        {"AC3 OSPA brute-force equivalence", ospa_oracle},
        {"AC4 merge moment preservation", merge_moments},
        {"AC5 heavy-tail consistency", heavy_tail},
        {"AC6 adaptation laws", adaptation_laws},
        {"AC7 high-clutter robustness", directional_robustness},
        {"AC8 mass and conditioning bounds", stability_bounds},
        {"AC9 update complexity scaling", complexity_scaling},
        {"AC10 extended-target correctness", extended_target},
        {"AC11 CLI determinism", determinism},
    };
    int failed = 0;
    std::size_t ran = 0;
    for (const auto& [name, fn] : checks) {
        if (!only.empty() && std::none_of(only.begin(), only.end(), [&](const std::string& p) {
                return name.compare(0, p.size() + 1, p + " ") == 0;
            }))
            continue;
        ++ran;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " - " << o.detail << std::endl;
    }
    std::cout << (ran - static_cast<std::size_t>(failed)) << "/" << ran << " criteria passed"
              << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
