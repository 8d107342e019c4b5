#include <algorithm>
#include <cmath>
#include <numbers>

#include "monoproj/smoothers.hpp"

namespace monoproj {

double kernel_profile(KernelFamily family, double u) {
    switch (family) {
        case KernelFamily::gaussian:
            return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
        case KernelFamily::epanechnikov:
            return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
        case KernelFamily::uniform:
            return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

double kernel_eval(const KernelSpec& spec, double u, std::size_t axis) {
    if (spec.bandwidth.empty()) throw InvalidArgument("kernel bandwidth is not set");
    double h = spec.bandwidth.size() == 1 ? spec.bandwidth[0] : spec.bandwidth.at(axis);
    if (!(h > 0.0)) throw InvalidArgument("kernel bandwidth must be positive");
    return kernel_profile(spec.family, u / h) / h;
}

std::vector<double> default_bandwidth(const Dataset& data) {
    const double n = static_cast<double>(data.size());
    std::vector<double> h(data.dim());
    for (std::size_t k = 0; k < data.dim(); ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) mean += data.x(i, k);
        mean /= n;
        double ss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) ss += (data.x(i, k) - mean) * (data.x(i, k) - mean);
        h[k] = 1.06 * std::sqrt(ss / (n - 1.0)) * std::pow(n, -0.2);
    }
    return h;
}

std::vector<double> resolve_bandwidth(const KernelSpec& spec, const Dataset& data) {
    std::vector<double> h;
    if (spec.bandwidth.empty())
        h = default_bandwidth(data);
    else if (spec.bandwidth.size() == 1)
        h.assign(data.dim(), spec.bandwidth[0]);
    else if (spec.bandwidth.size() == data.dim())
        h = spec.bandwidth;
    else
        throw InvalidArgument("bandwidth needs 1 or " + std::to_string(data.dim()) + " entries");
    for (double v : h)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("kernel bandwidth must be positive");
    return h;
}

namespace {

// Exponent tuples of all monomials with total degree <= degree.
std::vector<std::array<int, kMaxDim>> monomials(std::size_t dim, int degree) {
    std::vector<std::array<int, kMaxDim>> out;
    std::array<int, kMaxDim> e{};
    auto rec = [&](auto&& self, std::size_t axis, int remaining) -> void {
        if (axis == dim) {
            out.push_back(e);
            return;
        }
        for (int p = 0; p <= remaining; ++p) {
            e[axis] = p;
            self(self, axis + 1, remaining - p);
        }
        e[axis] = 0;
    };
    rec(rec, 0, degree);
    std::stable_sort(out.begin(), out.end(), [dim](const auto& a, const auto& b) {
        int sa = 0, sb = 0;
        for (std::size_t k = 0; k < dim; ++k) sa += a[k], sb += b[k];
        return sa < sb;
    });
    return out;
}

struct NodeSolve {
    bool ok = false;
    Eigen::VectorXd row;
};

// Intercept row of the weighted least-squares solve, or !ok when singular.
NodeSolve intercept_row(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
    NodeSolve out;
    const Eigen::Index cols = X.cols();
    Eigen::MatrixXd sx = w.cwiseSqrt().asDiagonal() * X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sx);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols) return out;
    Eigen::MatrixXd gram = X.transpose() * w.asDiagonal() * X;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(cols);
    e1(0) = 1.0;
    Eigen::VectorXd a = gram.ldlt().solve(e1);
    out.row = w.cwiseProduct(X * a);
    out.ok = out.row.allFinite();
    return out;
}

}  // namespace

LinearSmoother::LinearSmoother(std::shared_ptr<const Grid> grid, Eigen::MatrixXd matrix,
                               SmootherDiagnostics diagnostics)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), diagnostics_(std::move(diagnostics)) {
    if (static_cast<std::size_t>(matrix_.rows()) != grid_->size())
        throw InvalidArgument("smoother matrix rows must match the grid size");
}

GridFunction LinearSmoother::apply(std::span<const double> y) const {
    if (static_cast<Eigen::Index>(y.size()) != matrix_.cols())
        throw InvalidArgument("response vector length does not match the smoother design");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    Eigen::VectorXd f = matrix_ * yv;
    return GridFunction(grid_, std::vector<double>(f.data(), f.data() + f.size()));
}

LinearSmoother local_poly_operator(const Dataset& design, const KernelSpec& spec, std::shared_ptr<const Grid> grid) {
    if (grid->dim() != design.dim()) throw InvalidArgument("grid and dataset dimensions differ");
    if (spec.degree < 0) throw InvalidArgument("local polynomial degree must be >= 0");
    const std::size_t dim = design.dim();
    const std::size_t n = design.size();
    const std::vector<double> h = resolve_bandwidth(spec, design);
    const auto terms = monomials(dim, spec.degree);
    const auto constant_term = monomials(dim, 0);

    SmootherDiagnostics diag;
    diag.bandwidth = h;
    Eigen::MatrixXd S(static_cast<Eigen::Index>(grid->size()), static_cast<Eigen::Index>(n));
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));

    auto weights_at = [&](const std::vector<double>& node, double scale) {
        std::size_t support = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double wi = 1.0;
            for (std::size_t k = 0; k < dim; ++k) {
                double hk = h[k] * scale;
                wi *= kernel_profile(spec.family, (design.x(i, k) - node[k]) / hk) / hk;
            }
            w(static_cast<Eigen::Index>(i)) = wi;
            if (wi > 0.0) ++support;
        }
        return support;
    };
    auto design_matrix = [&](const std::vector<double>& node, const auto& basis) {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < basis.size(); ++c) {
                double v = 1.0;
                for (std::size_t k = 0; k < dim; ++k) v *= std::pow(design.x(i, k) - node[k], basis[c][k]);
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
            }
        return X;
    };

    for (std::size_t node_idx = 0; node_idx < grid->size(); ++node_idx) {
        const std::vector<double> node = grid->node(node_idx);
        double scale = 1.0;
        if (weights_at(node, scale) == 0) {
            // Widen just enough to reach the nearest design point.
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                double r = 0.0;
                for (std::size_t k = 0; k < dim; ++k) r = std::max(r, std::abs(design.x(i, k) - node[k]) / h[k]);
                nearest = std::min(nearest, r);
            }
            scale = nearest * 1.05;
            weights_at(node, scale);
            ++diag.bandwidth_inflations;
        }
        NodeSolve solve = intercept_row(design_matrix(node, terms), w);
        if (!solve.ok && spec.degree > 0) {
            solve = intercept_row(design_matrix(node, constant_term), w);
            ++diag.degree_fallbacks;
        }
        if (!solve.ok) throw NumericalError("local polynomial fit failed at grid node " + std::to_string(node_idx));
        S.row(static_cast<Eigen::Index>(node_idx)) = solve.row.transpose();
    }
    if (diag.bandwidth_inflations > 0)
        diag.warnings.push_back(std::to_string(diag.bandwidth_inflations) +
                                " grid nodes had an empty kernel window; bandwidth inflated locally");
    if (diag.degree_fallbacks > 0)
        diag.warnings.push_back(std::to_string(diag.degree_fallbacks) +
                                " grid nodes had a singular local design; fell back to degree 0");
    return LinearSmoother(std::move(grid), std::move(S), std::move(diag));
}

SmoothFit local_poly_fit(const Dataset& data, const KernelSpec& spec, std::shared_ptr<const Grid> grid) {
    LinearSmoother op = local_poly_operator(data, spec, std::move(grid));
    return SmoothFit{op.apply(data.ys()), op.diagnostics(), {}};
}

}  // namespace monoproj
