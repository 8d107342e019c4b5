#include "monoproj/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "monoproj/parallel.hpp"
#include "monoproj/random.hpp"

namespace monoproj {

double empirical_quantile(std::span<double> sample, double q) {
    if (sample.empty()) throw InvalidArgument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    // Guard against q * n landing a hair above an integer, e.g. 0.025 * 2000.
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sample.size());
    return sample[rank - 1];
}

BandEstimate bootstrap_bands(const Dataset& data, const SmootherSpec& smoother, std::shared_ptr<const Grid> grid,
                             const BootstrapOptions& options) {
    if (options.replicates < 2) throw InvalidArgument("bootstrap needs at least 2 replicates");
    if (!(options.level > 0.0 && options.level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");

    const PreparedSmoother prepared(data, smoother, grid);
    const SmoothFit initial = prepared.fit(data.ys());
    const ProjectionResult projected = project_monotone_nd(initial.fit, options.projection);
    const GridFunction& estimate = projected.projected;

    const std::size_t n = data.size();
    std::vector<double> center(n), residuals(n);
    for (std::size_t i = 0; i < n; ++i) {
        center[i] = estimate.interpolate(data.point(i));
        residuals[i] = data.y(i) - center[i];
    }

    std::vector<std::optional<std::vector<double>>> replicates(options.replicates);
    parallel_for(options.replicates, [&](std::size_t r) {
        auto rng = stream_rng(options.seed, r);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<double> ystar(n);
        for (std::size_t i = 0; i < n; ++i) ystar[i] = center[i] + residuals[pick(rng)];
        try {
            SmoothFit refit = prepared.fit(ystar);
            ProjectionResult p = project_monotone_nd(refit.fit, options.projection);
            if (!p.converged) return;
            replicates[r].emplace(p.projected.values().begin(), p.projected.values().end());
        } catch (const Error&) {
            // excluded; counted below
        }
    });

    std::vector<const std::vector<double>*> ok;
    for (const auto& r : replicates)
        if (r) ok.push_back(&*r);
    if (ok.size() < 2) throw NumericalError("fewer than 2 bootstrap replicates succeeded");

    const double alpha = 0.5 * (1.0 - options.level);
    std::vector<double> lo(grid->size()), hi(grid->size()), column(ok.size());
    for (std::size_t node = 0; node < grid->size(); ++node) {
        for (std::size_t r = 0; r < ok.size(); ++r) column[r] = (*ok[r])[node];
        lo[node] = empirical_quantile(column, alpha);
        hi[node] = empirical_quantile(column, 1.0 - alpha);
    }

    BandEstimate out{estimate,
                     estimate.with_values(std::move(lo)),
                     estimate.with_values(std::move(hi)),
                     initial.fit,
                     options.level,
                     options.replicates,
                     options.replicates - ok.size(),
                     options.seed,
                     projected.sweeps,
                     projected.final_violation};
    return out;
}

}  // namespace monoproj
