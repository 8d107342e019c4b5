#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "monoproj/core.hpp"
#include "monoproj/projection.hpp"
#include "monoproj/smoothers.hpp"

namespace monoproj {

struct BootstrapOptions {
    std::size_t replicates = 2000;
    double level = 0.95;
    std::uint64_t seed = 0;
    ProjectionOptions projection{std::nullopt, kReplicateMaxSweeps};
};

// Pointwise residual-bootstrap percentile band around the projected fit.
struct BandEstimate {
    GridFunction estimate;  // projected fit of the original data
    GridFunction lower;
    GridFunction upper;
    GridFunction raw_fit;   // unconstrained smoother output
    double level = 0.95;
    std::size_t replicates = 0;
    std::size_t failed_replicates = 0;
    std::uint64_t seed = 0;
    std::size_t estimate_sweeps = 0;
    double estimate_violation = 0.0;
};

// Type-1 empirical quantile: the ceil(q * n)-th order statistic (1-based,
// clamped to [1, n]). Sorts `sample` in place.
double empirical_quantile(std::span<double> sample, double q);

// Fit, project, resample residuals against the projected fit, refit and
// re-project each replicate, and take per-node percentiles. Replicate r draws
// from RNG stream (seed, r); a replicate whose refit throws or whose projection
// does not converge is excluded and counted in failed_replicates.
BandEstimate bootstrap_bands(const Dataset& data, const SmootherSpec& smoother, std::shared_ptr<const Grid> grid,
                             const BootstrapOptions& options);

}  // namespace monoproj
