#include "monoproj/simbench.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <random>

#include "monoproj/bootstrap.hpp"
#include "monoproj/parallel.hpp"
#include "monoproj/random.hpp"

namespace monoproj {

namespace {

constexpr std::array<std::pair<MeanFunctionId, const char*>, 19> kNames{{
    {MeanFunctionId::F11, "F11"}, {MeanFunctionId::F12, "F12"}, {MeanFunctionId::F13, "F13"},
    {MeanFunctionId::F14, "F14"}, {MeanFunctionId::F15, "F15"}, {MeanFunctionId::F16, "F16"},
    {MeanFunctionId::F17, "F17"}, {MeanFunctionId::F18, "F18"}, {MeanFunctionId::F21, "F21"},
    {MeanFunctionId::F22, "F22"}, {MeanFunctionId::F23, "F23"}, {MeanFunctionId::F24, "F24"},
    {MeanFunctionId::F25, "F25"}, {MeanFunctionId::F26, "F26"}, {MeanFunctionId::F31, "F31"},
    {MeanFunctionId::F32, "F32"}, {MeanFunctionId::F33, "F33"}, {MeanFunctionId::F34, "F34"},
    {MeanFunctionId::F35, "F35"},
}};

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::string to_string(MeanFunctionId id) {
    for (const auto& [k, name] : kNames)
        if (k == id) return name;
    return "?";
}

MeanFunctionId parse_mean_function(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (name == n) return k;
    throw InvalidArgument("unknown mean function '" + std::string(name) + "'");
}

std::size_t catalog_dim(MeanFunctionId id) {
    if (id <= MeanFunctionId::F18) return 1;
    if (id <= MeanFunctionId::F26) return 2;
    return 3;
}

std::vector<Interval> catalog_domain(MeanFunctionId id) {
    switch (catalog_dim(id)) {
        case 1: return {{0.0, 10.0}};
        case 2: return {{0.0, 1.0}, {0.0, 1.0}};
        default: return {{0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}};
    }
}

std::vector<MeanFunctionId> catalog(std::size_t dim) {
    std::vector<MeanFunctionId> out;
    for (const auto& [k, name] : kNames)
        if (catalog_dim(k) == dim) out.push_back(k);
    return out;
}

double mean_function(MeanFunctionId id, std::span<const double> x) {
    const auto domain = catalog_domain(id);
    if (x.size() != domain.size())
        throw DomainError(to_string(id) + " takes " + std::to_string(domain.size()) + " predictors");
    for (std::size_t k = 0; k < x.size(); ++k)
        if (!domain[k].contains(x[k])) throw DomainError(to_string(id) + ": argument outside the catalog domain");

    switch (id) {
        case MeanFunctionId::F11: return 3.0;
        case MeanFunctionId::F12: return 0.32 * (x[0] + std::sin(x[0]));
        case MeanFunctionId::F13: return x[0] <= 8.0 ? 3.0 : 6.0;
        case MeanFunctionId::F14: return 0.3 * x[0];
        case MeanFunctionId::F15: return 0.15 * std::exp(0.6 * x[0] - 3.0);
        case MeanFunctionId::F16: return 3.0 / (1.0 + std::exp(-2.0 * x[0] + 10.0));
        case MeanFunctionId::F17: {
            double u = 0.1 * x[0] - 1.0;
            return 3.0 * std::exp(-0.5 * 0.02 * 0.02 * u * u);
        }
        case MeanFunctionId::F18: {
            double u = 0.1 * x[0];
            return 6.0 * (0.5 * normal_cdf((u - 0.25) / 0.004) + 0.5 * normal_cdf((u - 0.75) / 0.04));
        }
        case MeanFunctionId::F21: return std::sqrt(x[0]);
        case MeanFunctionId::F22: return 0.5 * x[0] + 0.5 * x[1];
        case MeanFunctionId::F23: return std::min(x[0], x[1]);
        case MeanFunctionId::F24: return 0.25 * x[0] + 0.25 * x[1] + (x[0] + x[1] > 1.0 ? 0.5 : 0.0);
        case MeanFunctionId::F25:
            return 0.25 * x[0] + 0.25 * x[1] + (std::min(x[0], x[1]) > 0.5 ? 0.5 : 0.0);
        case MeanFunctionId::F26: {
            double r2 = (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 1.0) * (x[1] - 1.0);
            return r2 < 1.0 ? std::sqrt(1.0 - r2) : 0.0;
        }
        case MeanFunctionId::F31: return 0.15 * (x[0] + x[1] + x[2]);
        case MeanFunctionId::F32: return 0.5 * x[0] * x[1] * x[2];
        case MeanFunctionId::F33: return std::min({x[0], x[1], x[2]});
        case MeanFunctionId::F34: return 1.0 / (1.0 + std::exp(-(x[0] + x[1] + x[2])));
        case MeanFunctionId::F35: return std::exp(0.01 * x[0] + 0.1 * std::sqrt(x[1])) + std::sin(x[2] / 5.0);
    }
    throw InvalidArgument("unknown mean function");
}

std::shared_ptr<const Grid> experiment_grid(const ExperimentConfig& config) {
    const std::size_t dim = catalog_dim(config.mean_id);
    const std::size_t nodes = config.grid_nodes ? config.grid_nodes : Grid::default_nodes(dim);
    return std::make_shared<const Grid>(Grid::uniform(catalog_domain(config.mean_id), nodes));
}

Dataset generate_dataset(const ExperimentConfig& config, std::uint64_t replicate) {
    if (!(config.sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
    if (config.n < 2) throw InvalidArgument("sample size must be >= 2");
    const auto domain = catalog_domain(config.mean_id);
    const std::size_t dim = domain.size(), n = config.n;
    auto rng = stream_rng(config.seed, replicate);

    std::vector<double> x(n * dim);
    if (dim == 1) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = domain[0].lo + domain[0].length() * static_cast<double>(i + 1) / static_cast<double>(n);
    } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < dim; ++k) x[i * dim + k] = domain[k].lo + domain[k].length() * unit(rng);
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = noise(rng);
        y[i] = mean_function(config.mean_id, std::span<const double>(x.data() + i * dim, dim)) + config.sigma * z;
    }
    return Dataset(dim, std::move(x), std::move(y), domain);
}

double rmse(std::span<const double> fitted, MeanFunctionId truth, const Dataset& design) {
    if (fitted.size() != design.size()) throw InvalidArgument("one fitted value per design point is required");
    double ss = 0.0;
    for (std::size_t i = 0; i < design.size(); ++i) {
        double e = fitted[i] - mean_function(truth, design.point(i));
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(design.size()));
}

RmseSummary run_rmse_experiment(const ExperimentConfig& config) {
    if (config.replicates < 1) throw InvalidArgument("need at least one replicate");
    const auto grid = experiment_grid(config);
    const GridFunction truth =
        GridFunction::sample(grid, [&](const std::vector<double>& x) { return mean_function(config.mean_id, x); });

    std::vector<std::optional<ReplicateOutcome>> outcomes(config.replicates);
    parallel_for(config.replicates, [&](std::size_t r) {
        try {
            const Dataset data = generate_dataset(config, r);
            const SmoothFit raw = fit_smoother(data, config.smoother, grid);
            const ProjectionResult proj = project_monotone_nd(raw.fit, config.projection);
            std::vector<double> at_design(data.size()), raw_at_design(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                at_design[i] = proj.projected.interpolate(data.point(i));
                raw_at_design[i] = raw.fit.interpolate(data.point(i));
            }
            ReplicateOutcome o;
            o.rmse_projected = rmse(at_design, config.mean_id, data);
            o.rmse_raw = rmse(raw_at_design, config.mean_id, data);
            o.l2_projected = norm_lp(proj.projected, truth, 2.0);
            o.l2_raw = norm_lp(raw.fit, truth, 2.0);
            o.converged = proj.converged;
            if (o.converged) outcomes[r] = o;
        } catch (const Error&) {
        }
    });

    RmseSummary s;
    for (const auto& o : outcomes)
        if (o) s.outcomes.push_back(*o);
    s.replicates = s.outcomes.size();
    s.failed = config.replicates - s.replicates;
    if (s.replicates == 0) throw NumericalError("every replicate failed");
    const double m = static_cast<double>(s.replicates);
    for (const auto& o : s.outcomes) {
        s.mean += o.rmse_projected / m;
        s.mean_raw += o.rmse_raw / m;
    }
    double ss = 0.0;
    for (const auto& o : s.outcomes) ss += (o.rmse_projected - s.mean) * (o.rmse_projected - s.mean);
    s.sd = s.replicates > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    s.standard_error = s.sd / std::sqrt(m);
    return s;
}

CoverageResult run_coverage_experiment(const ExperimentConfig& config, const std::vector<std::vector<double>>& points,
                                       std::size_t bootstrap_replicates, double level) {
    const auto domain = catalog_domain(config.mean_id);
    for (const auto& p : points) {
        if (p.size() != domain.size()) throw InvalidArgument("evaluation point has the wrong dimension");
        for (std::size_t k = 0; k < p.size(); ++k)
            if (!domain[k].contains(p[k])) throw DomainError("evaluation point outside the domain");
    }
    const auto grid = experiment_grid(config);
    std::vector<double> truth;
    for (const auto& p : points) truth.push_back(mean_function(config.mean_id, p));

    std::vector<std::optional<std::vector<char>>> hits(config.replicates);
    parallel_for(config.replicates, [&](std::size_t r) {
        try {
            const Dataset data = generate_dataset(config, r);
            BootstrapOptions opts;
            opts.replicates = bootstrap_replicates;
            opts.level = level;
            opts.seed = derive_seed(config.seed, r);
            opts.projection = config.projection;
            const BandEstimate band = bootstrap_bands(data, config.smoother, grid, opts);
            std::vector<char> h(points.size());
            for (std::size_t j = 0; j < points.size(); ++j) {
                double lo = band.lower.interpolate(points[j]), hi = band.upper.interpolate(points[j]);
                // Rounding slack so that degenerate (sigma = 0) bands still cover an exact truth.
                const double slack = 1e-9 * (1.0 + std::abs(truth[j]));
                h[j] = lo - slack <= truth[j] && truth[j] <= hi + slack;
            }
            hits[r] = std::move(h);
        } catch (const Error&) {
        }
    });

    CoverageResult out;
    out.points = points;
    out.coverage.assign(points.size(), 0.0);
    for (const auto& h : hits) {
        if (!h) continue;
        ++out.replicates;
        for (std::size_t j = 0; j < points.size(); ++j) out.coverage[j] += (*h)[j];
    }
    out.failed = config.replicates - out.replicates;
    if (out.replicates == 0) throw NumericalError("every coverage replicate failed");
    for (double& c : out.coverage) c /= static_cast<double>(out.replicates);
    return out;
}

std::vector<std::vector<double>> default_coverage_points(std::size_t dim) {
    if (dim == 1) return {{0.5}, {1.5}, {2.5}, {3.5}, {5.5}, {6.5}, {7.5}, {8.5}, {9.5}};
    if (dim == 2) {
        std::vector<std::vector<double>> pts;
        const double levels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
        for (double x2 : levels)
            for (double x1 : levels) pts.push_back({x1, x2});
        return pts;
    }
    throw InvalidArgument("coverage tables exist for 1 and 2 predictors only");
}

}  // namespace monoproj
