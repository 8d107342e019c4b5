#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "monoproj/core.hpp"
#include "monoproj/projection.hpp"
#include "monoproj/smoothers.hpp"

namespace monoproj {

// Catalog of monotone test functions: eight with one predictor, six with two,
// five with three.
enum class MeanFunctionId { F11, F12, F13, F14, F15, F16, F17, F18, F21, F22, F23, F24, F25, F26, F31, F32, F33, F34, F35 };

std::string to_string(MeanFunctionId id);
MeanFunctionId parse_mean_function(std::string_view name);
std::size_t catalog_dim(MeanFunctionId id);
// [0,10] for 1-D, [0,1]^2 for 2-D, [0,10]^3 for 3-D.
std::vector<Interval> catalog_domain(MeanFunctionId id);
std::vector<MeanFunctionId> catalog(std::size_t dim);

// Throws DomainError when x lies outside the catalog domain.
double mean_function(MeanFunctionId id, std::span<const double> x);

struct ExperimentConfig {
    MeanFunctionId mean_id = MeanFunctionId::F11;
    double sigma = 1.0;
    std::size_t n = 100;
    std::size_t replicates = 50;
    SmootherSpec smoother = KernelSpec{};
    std::uint64_t seed = 0;
    std::size_t grid_nodes = 0;  // 0: Grid::default_nodes(dim)
    ProjectionOptions projection{std::nullopt, kReplicateMaxSweeps};
};

std::shared_ptr<const Grid> experiment_grid(const ExperimentConfig& config);

// Replicate `replicate` of the configured design: equidistant x_i = 10 i / n
// in 1-D, uniform on the domain otherwise, and y_i = F(x_i) + sigma z_i.
Dataset generate_dataset(const ExperimentConfig& config, std::uint64_t replicate = 0);

// sqrt(mean_i (fitted_i - F(x_i))^2) over the design points.
double rmse(std::span<const double> fitted, MeanFunctionId truth, const Dataset& design);

struct ReplicateOutcome {
    double rmse_projected = 0.0;
    double rmse_raw = 0.0;
    double l2_projected = 0.0;  // grid-weighted L2 distance to the truth
    double l2_raw = 0.0;
    bool converged = true;
};

struct RmseSummary {
    double mean = 0.0;
    double sd = 0.0;              // spread of the replicate RMSEs
    double standard_error = 0.0;  // sd / sqrt(replicates)
    double mean_raw = 0.0;        // same statistic for the unprojected fit
    std::size_t replicates = 0;
    std::size_t failed = 0;
    std::vector<ReplicateOutcome> outcomes;
};

RmseSummary run_rmse_experiment(const ExperimentConfig& config);

struct CoverageResult {
    std::vector<std::vector<double>> points;
    std::vector<double> coverage;  // fraction in [0, 1], one per point
    std::size_t replicates = 0;
    std::size_t failed = 0;
};

// Outer Monte Carlo loop over bootstrap_bands: fraction of replicates whose
// band (interpolated at each point) contains the true mean.
CoverageResult run_coverage_experiment(const ExperimentConfig& config, const std::vector<std::vector<double>>& points,
                                       std::size_t bootstrap_replicates, double level);

// Evaluation points of the published coverage tables.
std::vector<std::vector<double>> default_coverage_points(std::size_t dim);

}  // namespace monoproj
