#include <cmath>
#include <limits>

#include "monoproj/smoothers.hpp"
#include "spline_model.hpp"

namespace monoproj {

namespace {

constexpr double kJitter = 1e-10;

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("smoothing weight lambda must lie in (0, 1]");
}

}  // namespace

// ---------------------------------------------------------------------------
// PenalizedSplineSystem

PenalizedSplineSystem::PenalizedSplineSystem(Eigen::MatrixXd design, const Eigen::MatrixXd& penalty)
    : PenalizedSplineSystem(std::move(design), &penalty, nullptr) {}

PenalizedSplineSystem PenalizedSplineSystem::from_penalty_factor(Eigen::MatrixXd design, const Eigen::MatrixXd& factor) {
    return PenalizedSplineSystem(std::move(design), nullptr, &factor);
}

PenalizedSplineSystem::PenalizedSplineSystem(Eigen::MatrixXd design, const Eigen::MatrixXd* penalty,
                                             const Eigen::MatrixXd* factor)
    : design_(std::move(design)) {
    const Eigen::Index N = design_.cols();
    if (penalty && (penalty->rows() != N || penalty->cols() != N))
        throw InvalidArgument("penalty size does not match the basis");
    if (factor && factor->cols() != N) throw InvalidArgument("penalty factor size does not match the basis");
    Eigen::MatrixXd P = penalty ? *penalty : Eigen::MatrixXd(factor->transpose() * *factor);
    Eigen::MatrixXd C = design_.transpose() * design_ + P;
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) {
        // Data do not pin down the penalty null space; regularise the metric.
        C.diagonal().array() += kJitter * (1.0 + C.diagonal().mean());
        llt.compute(C);
        if (llt.info() != Eigen::Success) throw NumericalError("spline normal equations are not positive definite");
    }
    const auto L = llt.matrixL();
    // K = L^-1 P L^-T, built from the factor when there is one so that null
    // directions of the penalty come out at rounding level rather than eps*|P|.
    Eigen::MatrixXd K;
    if (factor) {
        Eigen::MatrixXd W = L.solve(factor->transpose());
        K = W * W.transpose();
    } else {
        Eigen::MatrixXd tmp = L.solve(P);
        K = L.solve(tmp.transpose());
    }
    K = 0.5 * (K + K.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    if (eig.info() != Eigen::Success) throw NumericalError("eigen decomposition of spline system failed");
    penalty_eigen_ = eig.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    basis_ = llt.matrixU().solve(eig.eigenvectors());
    design_basis_ = design_ * basis_;
}

PenalizedSplineSystem::Solution PenalizedSplineSystem::solve(std::span<const double> y, double lambda) const {
    check_lambda(lambda);
    if (static_cast<Eigen::Index>(y.size()) != design_.rows())
        throw InvalidArgument("response vector length does not match the spline design");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    Solution s;
    Eigen::VectorXd z = design_basis_.transpose() * yv;
    Eigen::VectorXd shrink(penalty_eigen_.size());
    for (Eigen::Index i = 0; i < penalty_eigen_.size(); ++i) {
        const double e = penalty_eigen_(i), d = 1.0 - e;
        double denom = lambda * d + (1.0 - lambda) * e;
        if (denom < kJitter) {
            denom += kJitter;
            s.jitter = true;
        }
        shrink(i) = lambda / denom;
        s.trace += shrink(i) * d;
    }
    Eigen::VectorXd scaled = shrink.cwiseProduct(z);
    s.coefficients = basis_ * scaled;
    Eigen::VectorXd fitted = design_basis_ * scaled;
    s.rss = (yv - fitted).squaredNorm();
    return s;
}

double PenalizedSplineSystem::gcv(const Solution& s) const {
    const double n = static_cast<double>(design_.rows());
    const double dof = n - s.trace;
    if (dof <= 1e-8 * n) return std::numeric_limits<double>::infinity();
    return n * s.rss / (dof * dof);
}

std::vector<double> gcv_lambda_grid() {
    constexpr int count = 25;
    const double lo = std::log(1e-6), hi = std::log(1.0 - 1e-6);
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = std::exp(lo + (hi - lo) * i / (count - 1));
    grid.back() = 1.0 - 1e-6;
    return grid;
}

// ---------------------------------------------------------------------------
// SplineModel

namespace detail {

GridFunction SplineModel::evaluate(const Eigen::VectorXd& coef) const {
    std::vector<double> values(grid->size());
    if (grid_basis.size() == 1) {
        Eigen::VectorXd f = grid_basis[0] * coef;
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(static_cast<Eigen::Index>(i));
    } else {
        const auto N1 = static_cast<Eigen::Index>(basis_sizes[0]), N2 = static_cast<Eigen::Index>(basis_sizes[1]);
        // coef index i*N2 + j  ->  row-major N1 x N2 matrix
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> C(coef.data(), N1,
                                                                                                   N2);
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> F =
            grid_basis[0] * C * grid_basis[1].transpose();
        for (Eigen::Index i = 0; i < F.rows(); ++i)
            for (Eigen::Index j = 0; j < F.cols(); ++j) values[static_cast<std::size_t>(i * F.cols() + j)] = F(i, j);
    }
    return GridFunction(grid, std::move(values));
}

SplineModel build_spline_model(const Dataset& data, std::span<const SplineSpec> specs,
                               std::shared_ptr<const Grid> grid) {
    const std::size_t dim = data.dim();
    if (dim != specs.size()) throw InvalidArgument("need one spline spec per axis");
    if (dim > 2) throw InvalidArgument("spline smoothers support 1 or 2 predictors");
    if (grid->dim() != dim) throw InvalidArgument("grid and dataset dimensions differ");

    SplineModel model;
    model.grid = grid;
    std::vector<BSplineBasis> bases;
    for (std::size_t k = 0; k < dim; ++k) {
        const SplineSpec& s = specs[k];
        if (s.order != 4) throw InvalidArgument("only cubic (order 4) smoothing splines are supported");
        const Interval dom = data.domain()[k];
        std::vector<double> knots;
        for (double t : s.knots) knots.push_back((t - dom.lo) / dom.length());
        bases.emplace_back(std::move(knots), s.order);
        if (bases.back().size() < 4) throw InvalidArgument("spline needs at least 4 basis functions");
        model.basis_sizes.push_back(bases.back().size());

        const auto& axis = grid->axis(k);
        Eigen::MatrixXd gb(static_cast<Eigen::Index>(axis.size()), static_cast<Eigen::Index>(bases.back().size()));
        for (std::size_t i = 0; i < axis.size(); ++i)
            gb.row(static_cast<Eigen::Index>(i)) = bases.back().evaluate((axis[i] - dom.lo) / dom.length()).transpose();
        model.grid_basis.push_back(std::move(gb));
    }

    const auto n = static_cast<Eigen::Index>(data.size());
    std::size_t total = 1;
    for (auto s : model.basis_sizes) total *= s;
    Eigen::MatrixXd B(n, static_cast<Eigen::Index>(total));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto u = to_unit(data.point(static_cast<std::size_t>(i)), data.domain());
        Eigen::VectorXd row = bases[0].evaluate(u[0]);
        if (dim == 2) {
            Eigen::VectorXd b2 = bases[1].evaluate(u[1]);
            Eigen::VectorXd r(row.size() * b2.size());
            for (Eigen::Index a = 0; a < row.size(); ++a) r.segment(a * b2.size(), b2.size()) = row(a) * b2;
            row = std::move(r);
        }
        B.row(i) = row.transpose();
    }

    // Penalty as R'R: G2s x G0t + 2 G1s x G1t + G0s x G2t in 2-D.
    Eigen::MatrixXd R;
    if (dim == 1) {
        R = bases[0].gram_factor(2);
    } else {
        Eigen::MatrixXd R0s = bases[0].gram_factor(0), R1s = bases[0].gram_factor(1), R2s = bases[0].gram_factor(2);
        Eigen::MatrixXd R0t = bases[1].gram_factor(0), R1t = bases[1].gram_factor(1), R2t = bases[1].gram_factor(2);
        Eigen::MatrixXd a = kron(R2s, R0t), b = std::sqrt(2.0) * kron(R1s, R1t), c = kron(R0s, R2t);
        R.resize(a.rows() + b.rows() + c.rows(), a.cols());
        R << a, b, c;
    }
    model.system.emplace(PenalizedSplineSystem::from_penalty_factor(std::move(B), R));
    return model;
}

SmoothFit fit_spline_model(const SplineModel& model, std::span<const double> y, std::optional<double> lambda) {
    const PenalizedSplineSystem& sys = *model.system;
    double chosen;
    PenalizedSplineSystem::Solution best;
    if (lambda) {
        chosen = *lambda;
        best = sys.solve(y, chosen);
    } else {
        double best_score = std::numeric_limits<double>::infinity();
        chosen = gcv_lambda_grid().front();
        for (double l : gcv_lambda_grid()) {
            auto s = sys.solve(y, l);
            double score = sys.gcv(s);
            if (score < best_score) {
                best_score = score;
                best = std::move(s);
                chosen = l;
            }
        }
        if (best.coefficients.size() == 0) best = sys.solve(y, chosen);
    }
    SmoothFit out{model.evaluate(best.coefficients), {}, {}};
    out.coefficients.assign(best.coefficients.data(), best.coefficients.data() + best.coefficients.size());
    out.diagnostics.lambda = chosen;
    out.diagnostics.ridge_jitter = best.jitter;
    if (best.jitter) out.diagnostics.warnings.push_back("rank-deficient spline system; ridge jitter 1e-10 added");
    return out;
}

}  // namespace detail

SmoothFit smooth_spline_fit_1d(const Dataset& data, const SplineSpec& spec, std::shared_ptr<const Grid> grid) {
    if (data.dim() != 1) throw InvalidArgument("smooth_spline_fit_1d needs a 1-D dataset");
    check_lambda(spec.lambda);
    const SplineSpec specs[] = {spec};
    auto model = detail::build_spline_model(data, specs, std::move(grid));
    return detail::fit_spline_model(model, data.ys(), spec.lambda);
}

SmoothFit tensor_spline_fit_2d(const Dataset& data, const SplineSpec& spec_s, const SplineSpec& spec_t,
                               std::shared_ptr<const Grid> grid) {
    if (data.dim() != 2) throw InvalidArgument("tensor_spline_fit_2d needs a 2-D dataset");
    if (spec_s.lambda != spec_t.lambda) throw InvalidArgument("both axes must share one smoothing weight");
    check_lambda(spec_s.lambda);
    const SplineSpec specs[] = {spec_s, spec_t};
    auto model = detail::build_spline_model(data, specs, std::move(grid));
    return detail::fit_spline_model(model, data.ys(), spec_s.lambda);
}

}  // namespace monoproj
