// Acceptance report: one PASS/FAIL line per criterion.
// Exit status is 0 once the report completes; pass --strict to make any FAIL
// return 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "monoproj/cli.hpp"
#include "monoproj/projection.hpp"
#include "monoproj/simbench.hpp"
#include "oracles.hpp"

using namespace monoproj;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> random_axis(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> gap(0.1, 2.0);
    std::vector<double> a(n);
    a[0] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    for (std::size_t i = 1; i < n; ++i) a[i] = a[i - 1] + gap(rng);
    return a;
}

GridFunction random_monotone(std::mt19937_64& rng, std::shared_ptr<const Grid> g) {
    std::vector<std::vector<double>> prof;
    for (std::size_t k = 0; k < g->dim(); ++k) prof.push_back(oracle::random_monotone_1d(rng, g->extent(k), 2.0));
    const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
        auto idx = g->unravel(i);
        double s = 0.0, m = 1e300;
        for (std::size_t k = 0; k < g->dim(); ++k) s += prof[k][idx[k]], m = std::min(m, prof[k][idx[k]]);
        v[i] = s + a * m;
    }
    return GridFunction(std::move(g), std::move(v));
}

// Raw estimate: truth plus smooth and rough perturbations.
GridFunction perturb(std::mt19937_64& rng, const GridFunction& truth) {
    std::normal_distribution<double> z;
    const double rough = std::exp(z(rng)), wave = std::exp(z(rng));
    std::vector<double> freq(truth.grid().dim());
    for (double& f : freq) f = 0.5 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<double> v(truth.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto x = truth.grid().node(i);
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += std::sin(freq[k] * x[k]);
        v[i] = truth[i] + rough * z(rng) - wave * s;
    }
    return truth.with_values(std::move(v));
}

bool history_non_increasing(const ProjectionResult& r) {
    for (std::size_t i = 1; i < r.residual_norm_history.size(); ++i)
        if (r.residual_norm_history[i] > r.residual_norm_history[i - 1] + 1e-10) return false;
    return true;
}

// Shared between criteria 2/3 and 5.
std::size_t g_nd_runs = 0, g_nd_history_failures = 0;

Outcome crit1() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> wd(0.05, 3.0);
    std::normal_distribution<double> z(0.0, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng() % 10;
        std::vector<double> f(n), w(n), axis(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = z(rng), w[i] = wd(rng), axis[i] = static_cast<double>(i);
        std::vector<double> ref = oracle::pooling_isotonic(f, w);
        std::vector<double> got;
        if (n >= 2) {
            auto g = std::make_shared<const Grid>(Grid({axis}));
            auto p = project_monotone_1d(GridFunction(g, f), w);
            got.assign(p.values().begin(), p.values().end());
        } else {
            got = pava(f, w);
        }
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(got[i] - ref[i]));
    }
    return {worst <= 1e-10, fmt("max |diff| = %.3g over 1000 instances (limit 1e-10)", worst)};
}

Outcome crit2() {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> z;
    double worst = 0.0;
    std::size_t unconverged = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = t % 2 == 0 ? 4 : 5;
        auto g = std::make_shared<const Grid>(Grid({random_axis(rng, n), random_axis(rng, n)}));
        std::vector<double> f(g->size());
        for (double& v : f) v = z(rng);
        ProjectionOptions opts{1e-9, 1000000};
        auto r = project_monotone_nd(GridFunction(g, f), opts);
        unconverged += !r.converged;
        ++g_nd_runs;
        g_nd_history_failures += !history_non_increasing(r);
        std::vector<double> w(g->weights().begin(), g->weights().end());
        auto ref = oracle::active_set_qp(f, w, oracle::grid_order_pairs(g->shape()));
        for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(r.projected[i] - ref[i]));
    }
    return {worst <= 1e-6 && unconverged == 0,
            fmt("sup |diff| vs QP = %.3g over 200 grids (limit 1e-6), unconverged = %zu", worst, unconverged)};
}

Outcome crit3() {
    std::mt19937_64 rng(303);
    std::size_t violations = 0, unconverged = 0;
    double worst_margin = -1e300;
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        for (int t = 0; t < 500; ++t) {
            std::vector<std::vector<double>> axes;
            const std::size_t n = dim == 1 ? 5 + rng() % 60 : dim == 2 ? 4 + rng() % 12 : 3 + rng() % 5;
            for (std::size_t k = 0; k < dim; ++k) axes.push_back(random_axis(rng, n));
            auto g = std::make_shared<const Grid>(Grid(axes));
            auto truth = random_monotone(rng, g);
            auto raw = perturb(rng, truth);
            auto r = project_monotone_nd(raw, ProjectionOptions{std::nullopt, kReplicateMaxSweeps});
            unconverged += !r.converged;
            if (dim > 1) {
                ++g_nd_runs;
                g_nd_history_failures += !history_non_increasing(r);
            }
            const double margin = norm_lp(r.projected, truth, 2.0) - norm_lp(raw, truth, 2.0);
            worst_margin = std::max(worst_margin, margin);
            violations += margin > 1e-9;
        }
    }
    return {violations == 0 && unconverged == 0,
            fmt("violations = %zu of 1500, max (||proj-F|| - ||raw-F||) = %.3g, unconverged = %zu", violations,
                worst_margin, unconverged)};
}

Outcome crit4() {
    std::mt19937_64 rng(404);
    std::size_t violations = 0;
    const std::vector<std::pair<const char*, std::function<double(double)>>> phis{
        {"|u|", [](double u) { return std::abs(u); }},
        {"u^2", [](double u) { return u * u; }},
        {"u^4", [](double u) { return u * u * u * u; }},
    };
    for (int t = 0; t < 500; ++t) {
        auto g = std::make_shared<const Grid>(Grid({random_axis(rng, 5 + rng() % 80)}));
        auto truth = random_monotone(rng, g);
        auto raw = perturb(rng, truth);
        auto proj = project_monotone_1d(raw);
        const auto& w = g->weights();
        for (const auto& [name, phi] : phis) {
            double a = 0.0, b = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                a += w[i] * phi(proj[i] - truth[i]);
                b += w[i] * phi(raw[i] - truth[i]);
            }
            violations += a > b + 1e-9;
        }
        violations += norm_lp(proj, truth, kSupNorm) > norm_lp(raw, truth, kSupNorm) + 1e-9;
    }
    return {violations == 0, fmt("violations = %zu of 2000 comparisons", violations)};
}

Outcome crit5() {
    return {g_nd_runs > 0 && g_nd_history_failures == 0,
            fmt("non-increasing history in %zu of %zu N-D runs", g_nd_runs - g_nd_history_failures, g_nd_runs)};
}

double mean_rmse(MeanFunctionId id, double sigma, std::uint64_t seed = 0, std::size_t* failed = nullptr) {
    ExperimentConfig cfg;
    cfg.mean_id = id;
    cfg.sigma = sigma;
    cfg.n = 100;
    cfg.replicates = 50;
    cfg.seed = seed;
    auto s = run_rmse_experiment(cfg);
    if (failed) *failed += s.failed;
    return s.mean;
}

Outcome band_check(const std::vector<std::tuple<MeanFunctionId, double, double, double>>& rows) {
    bool ok = true;
    std::string detail;
    std::size_t failed = 0;
    for (const auto& [id, sigma, lo, hi] : rows) {
        double m = mean_rmse(id, sigma, 0, &failed);
        bool in = m >= lo && m <= hi;
        ok = ok && in;
        detail += fmt("%s(sigma=%g) = %.4f in [%.2f, %.2f]%s; ", to_string(id).c_str(), sigma, m, lo, hi, in ? "" : " NO");
    }
    detail += fmt("failed replicates = %zu", failed);
    return {ok, detail};
}

Outcome crit6() {
    return band_check({{MeanFunctionId::F11, 0.5, 0.03, 0.07},
                       {MeanFunctionId::F13, 1.0, 0.30, 0.48},
                       {MeanFunctionId::F12, 1.0, 0.17, 0.28}});
}

Outcome crit7() {
    return band_check({{MeanFunctionId::F21, 1.0, 0.13, 0.26}, {MeanFunctionId::F24, 1.0, 0.18, 0.33}});
}

Outcome crit8() {
    int good = 0;
    for (std::uint64_t batch = 0; batch < 50; ++batch) {
        const std::uint64_t seed = 8000 + batch;
        double f11 = mean_rmse(MeanFunctionId::F11, 1.0, seed), f13 = mean_rmse(MeanFunctionId::F13, 1.0, seed);
        double f17 = mean_rmse(MeanFunctionId::F17, 1.0, seed), f18 = mean_rmse(MeanFunctionId::F18, 1.0, seed);
        good += std::min(f13, f18) > std::max(f11, f17);
    }
    return {good >= 45, fmt("ordering held in %d of 50 seed batches (need >= 45)", good)};
}

Outcome crit9() {
    bool ok = true;
    std::string detail = "B = 500 bootstrap replicates, 300 outer replicates; ";
    for (const auto& [id, x, target] : {std::tuple{MeanFunctionId::F12, 2.5, 97.6}, std::tuple{MeanFunctionId::F16, 1.5, 98.5}}) {
        ExperimentConfig cfg;
        cfg.mean_id = id;
        cfg.sigma = 1.0;
        cfg.n = 100;
        cfg.replicates = 300;
        cfg.seed = 9;
        auto r = run_coverage_experiment(cfg, {{x}}, 500, 0.95);
        const double pct = 100.0 * r.coverage[0];
        const bool in = std::abs(pct - target) <= 4.0;
        ok = ok && in;
        detail += fmt("%s at x1=%g: %.1f%% vs %.1f +/- 4 (failed %zu)%s; ", to_string(id).c_str(), x, pct, target,
                      r.failed, in ? "" : " NO");
    }
    detail.resize(detail.size() - 2);
    return {ok, detail};
}

Outcome crit10() {
    const fs::path dir = fs::temp_directory_path() / ("monoproj_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::ostringstream out, err;
    const int code = run_cli({"toxicology", "--replicates", "2000", "--seed", "2024", "--out-dir", dir.string()}, out, err);
    if (code != kExitOk) {
        fs::remove_all(dir);
        return {false, "toxicology command failed: " + err.str()};
    }
    std::ifstream in(dir / "toxicology_summary.json");
    const auto j = nlohmann::json::parse(in);
    fs::remove_all(dir);
    const double violation = j["output_violation"].get<double>();
    const double lo = j["fit_at_min_corner"].get<double>(), hi = j["fit_at_max_corner"].get<double>();
    const std::size_t inside = j["inside_band"].get<std::size_t>();
    const bool ok = violation <= 1e-8 && hi > lo && inside >= 14;
    std::string outside;
    for (const auto& c : j["cells"])
        if (!c["inside"].get<bool>())
            outside += fmt(" (%g,%g)", c["x1"].get<double>(), c["x2"].get<double>());
    return {ok, fmt("violation = %.2g, fit(3,3) = %.5f > fit(0,0) = %.5f, inside bands = %zu/16 (need >= 14), outside:%s",
                    violation, hi, lo, inside, outside.c_str())};
}

Outcome crit11() {
    double worst = 0.0;
    for (auto id : {MeanFunctionId::F12, MeanFunctionId::F14, MeanFunctionId::F15, MeanFunctionId::F16}) {
        for (std::uint64_t r = 0; r < 10; ++r) {
            ExperimentConfig cfg;
            cfg.mean_id = id;
            cfg.sigma = 1.0;
            cfg.seed = 11;
            Dataset d = generate_dataset(cfg, r);
            auto coarse = std::make_shared<const Grid>(Grid::uniform(d.domain(), 101));
            auto fine = std::make_shared<const Grid>(Grid::uniform(d.domain(), 201));
            auto pc = project_monotone_1d(fit_smoother(d, KernelSpec{}, coarse).fit);
            auto pf = project_monotone_1d(fit_smoother(d, KernelSpec{}, fine).fit);
            for (std::size_t i = 0; i < coarse->size(); ++i) worst = std::max(worst, std::abs(pc[i] - pf[2 * i]));
        }
    }
    return {worst < 1e-3, fmt("sup change 101 -> 201 nodes = %.3g over 40 kernel fits (limit 1e-3)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--strict") == 0) strict = true;

    const std::vector<Criterion> criteria{
        {1, "1-D oracle equivalence", 5, crit1},
        {2, "2-D oracle equivalence", 60, crit2},
        {3, "projection reduces L2 error (p = 1, 2, 3)", 600, crit3},
        {4, "projection reduces integrated Phi and sup error (1-D)", 600, crit4},
        {5, "norm history non-increasing", 1, crit5},
        {6, "one-predictor RMSE (kernel)", 300, crit6},
        {7, "two-predictor RMSE (kernel)", 600, crit7},
        {8, "RMSE ordering step/mixture vs flat", 1800, crit8},
        {9, "pointwise coverage (B = 500)", 1800, crit9},
        {10, "toxicology analysis", 120, crit10},
        {11, "grid refinement stability", 60, crit11},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.time_limit;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("[%s] %2d %s: %s; %.1f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.time_limit, in_time ? "" : " OVER TIME");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return strict && failures ? 1 : 0;
}
