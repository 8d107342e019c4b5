#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "monoproj/core.hpp"

namespace monoproj {

namespace detail {
struct SplineModel;
}

// ---------------------------------------------------------------------------
// Kernels and local polynomial regression

enum class KernelFamily { gaussian, epanechnikov, uniform };

struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    // One bandwidth per axis, or a single value broadcast to every axis.
    // Empty means the normal-reference rule 1.06 * sd * n^(-1/5).
    std::vector<double> bandwidth;
    int degree = 1;
};

// Unscaled kernel profile K(u).
double kernel_profile(KernelFamily family, double u);

// K_h(u) = K(u/h)/h along `axis` of the spec's bandwidth.
double kernel_eval(const KernelSpec& spec, double u, std::size_t axis = 0);

// Normal-reference bandwidth per axis.
std::vector<double> default_bandwidth(const Dataset& data);

// Bandwidths resolved against `data` (defaults filled, scalars broadcast). Throws on h <= 0.
std::vector<double> resolve_bandwidth(const KernelSpec& spec, const Dataset& data);

struct SmootherDiagnostics {
    std::size_t degree_fallbacks = 0;      // nodes where the local design was singular
    std::size_t bandwidth_inflations = 0;  // nodes whose kernel window was empty
    bool ridge_jitter = false;             // rank-deficient spline system
    std::optional<double> lambda;          // smoothing weight actually used
    std::vector<double> bandwidth;         // bandwidth actually used
    std::vector<std::string> warnings;
};

struct SmoothFit {
    GridFunction fit;
    SmootherDiagnostics diagnostics;
    std::vector<double> coefficients;  // spline coefficients; empty for kernel fits
};

// A smoother that is linear in the responses for a fixed design: fit = S * y.
class LinearSmoother {
public:
    LinearSmoother(std::shared_ptr<const Grid> grid, Eigen::MatrixXd matrix, SmootherDiagnostics diagnostics);

    GridFunction apply(std::span<const double> y) const;
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    const SmootherDiagnostics& diagnostics() const noexcept { return diagnostics_; }
    const std::shared_ptr<const Grid>& grid() const noexcept { return grid_; }

private:
    std::shared_ptr<const Grid> grid_;
    Eigen::MatrixXd matrix_;
    SmootherDiagnostics diagnostics_;
};

// Local polynomial operator: at each node solves the kernel-weighted least
// squares problem in a total-degree monomial basis and keeps the intercept.
LinearSmoother local_poly_operator(const Dataset& design, const KernelSpec& spec, std::shared_ptr<const Grid> grid);

SmoothFit local_poly_fit(const Dataset& data, const KernelSpec& spec, std::shared_ptr<const Grid> grid);

// ---------------------------------------------------------------------------
// B-splines

struct SplineSpec {
    std::vector<double> knots;  // non-decreasing, in data coordinates
    int order = 4;
    double lambda = 0.5;  // weight on the residual sum of squares, in (0,1]
};

// Clamped cubic knot vector with `interior` equally spaced interior knots.
SplineSpec clamped_spline_spec(Interval range, std::size_t interior, double lambda);

// Cox-de Boor recursion for B_{j,order}(x), j zero-based. Order-1 pieces are
// half-open [t_j, t_{j+1}) except the last non-empty span, which is closed.
// 0/0 terms are 0; x outside the knot range gives 0.
double bspline_basis(std::span<const double> knots, std::size_t j, int order, double x);

// Fast evaluation of all basis functions and their derivatives.
class BSplineBasis {
public:
    BSplineBasis(std::vector<double> knots, int order);

    std::size_t size() const noexcept { return knots_.size() - static_cast<std::size_t>(order_); }
    int order() const noexcept { return order_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    double lo() const { return knots_[static_cast<std::size_t>(order_) - 1]; }
    double hi() const { return knots_[size()]; }

    // Dense vector of all `size()` basis values (deriv = 0) or derivatives; x clamped to [lo, hi].
    Eigen::VectorXd evaluate(double x, int deriv = 0) const;

    // Exact Gram matrix of the deriv-th derivatives, integral over [lo, hi].
    Eigen::MatrixXd gram(int deriv) const;
    // Upper-triangular R with R'R = gram(deriv).
    Eigen::MatrixXd gram_factor(int deriv) const;

private:
    std::size_t find_span(double x) const;

    std::vector<double> knots_;
    int order_;
};

// Penalised least squares  lambda * ||y - B c||^2 + (1 - lambda) * c' P c
// for a fixed design, diagonalised once so that any lambda costs O(n N).
class PenalizedSplineSystem {
public:
    PenalizedSplineSystem(Eigen::MatrixXd design, const Eigen::MatrixXd& penalty);
    // Penalty given as R'R; keeps the penalty null space exact to rounding.
    static PenalizedSplineSystem from_penalty_factor(Eigen::MatrixXd design, const Eigen::MatrixXd& factor);

    struct Solution {
        Eigen::VectorXd coefficients;
        double rss = 0.0;
        double trace = 0.0;  // effective degrees of freedom
        bool jitter = false;
    };

    Solution solve(std::span<const double> y, double lambda) const;
    double gcv(const Solution& s) const;
    const Eigen::MatrixXd& design() const noexcept { return design_; }

private:
    PenalizedSplineSystem(Eigen::MatrixXd design, const Eigen::MatrixXd* penalty, const Eigen::MatrixXd* factor);

    Eigen::MatrixXd design_;
    Eigen::MatrixXd basis_;         // Q with Q'(B'B + P)Q = I and Q'PQ = diag(penalty_eigen_)
    Eigen::MatrixXd design_basis_;  // B Q
    Eigen::VectorXd penalty_eigen_;  // in [0, 1]
};

// The 25-point logarithmic lambda grid in (1e-6, 1 - 1e-6) used for GCV.
std::vector<double> gcv_lambda_grid();

SmoothFit smooth_spline_fit_1d(const Dataset& data, const SplineSpec& spec, std::shared_ptr<const Grid> grid);
SmoothFit tensor_spline_fit_2d(const Dataset& data, const SplineSpec& spec_s, const SplineSpec& spec_t,
                               std::shared_ptr<const Grid> grid);

// ---------------------------------------------------------------------------
// Smoother configuration

struct SplineSmootherSpec {
    std::size_t interior_knots = 20;
    std::optional<double> lambda;  // unset: chosen by GCV
};

using SmootherSpec = std::variant<KernelSpec, SplineSmootherSpec>;

std::string smoother_name(const SmootherSpec& spec);

// Fits any configured smoother; dispatches on the spec and the data dimension.
SmoothFit fit_smoother(const Dataset& data, const SmootherSpec& spec, std::shared_ptr<const Grid> grid);

// Repeated fits on one fixed design (bootstrap, Monte Carlo). Linear smoothers
// are precomputed to a matrix; GCV splines keep their diagonalised system.
class PreparedSmoother {
public:
    PreparedSmoother(const Dataset& design, SmootherSpec spec, std::shared_ptr<const Grid> grid);

    SmoothFit fit(std::span<const double> y) const;
    const std::shared_ptr<const Grid>& grid() const noexcept { return grid_; }

private:
    Dataset design_;
    SmootherSpec spec_;
    std::shared_ptr<const Grid> grid_;
    std::optional<LinearSmoother> linear_;
    std::shared_ptr<const detail::SplineModel> spline_;
};

}  // namespace monoproj
