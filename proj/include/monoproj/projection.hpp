#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "monoproj/core.hpp"

namespace monoproj {

// Greatest convex minorant of the piecewise-linear interpolant of (xs, ys).
struct ConvexMinorant {
    std::vector<double> breakpoints;     // hull vertex abscissae
    std::vector<double> values;          // hull vertex ordinates
    std::vector<double> slopes;          // one per hull segment, non-decreasing
    std::vector<double> segment_slopes;  // minorant slope over each input interval [x_i, x_{i+1}]

    double operator()(double x) const;
};

ConvexMinorant gcm(std::span<const double> xs, std::span<const double> ys);

// Weighted isotonic regression by pooled adjacent violators: argmin over
// non-decreasing g of sum_i w_i (f_i - g_i)^2. Blocks merge only on a strict
// decrease, so runs of equal values are left alone.
std::vector<double> pava(std::span<const double> values, std::span<const double> weights);

// 1-D L2 projection onto non-decreasing functions, using the grid quadrature
// weights (or caller-supplied positive weights).
GridFunction project_monotone_1d(const GridFunction& f);
GridFunction project_monotone_1d(const GridFunction& f, std::span<const double> weights);

// Projects every line of f parallel to `axis` with that axis' quadrature weights.
GridFunction project_along_axis(const GridFunction& f, std::size_t axis);

// f minus its projection along `axis`: the projection onto the dual cone of
// functions that are monotone along that axis.
GridFunction dual_cone_residual(const GridFunction& f, std::size_t axis);

struct ProjectionOptions {
    std::optional<double> tol;  // default 1e-8 * (max f - min f)
    std::size_t max_sweeps = 500;
};

// Sweep budget for bootstrap and Monte Carlo replicates, where a replicate
// that runs out of sweeps is discarded. Noisy 51x51 surfaces can need ~1500.
inline constexpr std::size_t kReplicateMaxSweeps = 5000;

struct ProjectionResult {
    GridFunction projected;
    std::size_t sweeps = 0;
    double final_violation = 0.0;
    double tol = 0.0;
    // Weighted L2 norm of the iterate after every axis step, in order.
    std::vector<double> residual_norm_history;
    bool converged = false;
};

// Projection onto coordinatewise non-decreasing functions. For p >= 2 runs
// cyclic per-axis projections; each axis keeps the residual of its last
// projection, and axis k projects f plus the residuals of all other axes.
// Stops after the first full sweep whose iterate is monotone to within tol
// and moved by at most tol (sup norm) over the sweep.
ProjectionResult project_monotone_nd(const GridFunction& f, const ProjectionOptions& options = {});

}  // namespace monoproj
