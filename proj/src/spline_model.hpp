#pragma once

#include <optional>
#include <span>
#include <vector>

#include "monoproj/smoothers.hpp"

namespace monoproj::detail {

// Penalised spline on the unit-rescaled design: 1-D smoothing spline or 2-D
// tensor product with the thin-plate style penalty.
struct SplineModel {
    std::shared_ptr<const Grid> grid;
    std::vector<std::size_t> basis_sizes;
    std::vector<Eigen::MatrixXd> grid_basis;  // per axis: grid extent x basis size
    std::optional<PenalizedSplineSystem> system;

    GridFunction evaluate(const Eigen::VectorXd& coefficients) const;
};

SplineModel build_spline_model(const Dataset& data, std::span<const SplineSpec> specs, std::shared_ptr<const Grid> grid);

// Solves at `lambda`, or picks lambda by GCV over gcv_lambda_grid() when unset.
SmoothFit fit_spline_model(const SplineModel& model, std::span<const double> y, std::optional<double> lambda);

}  // namespace monoproj::detail
