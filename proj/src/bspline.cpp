#include <algorithm>
#include <array>
#include <cmath>

#include "monoproj/smoothers.hpp"

namespace monoproj {

SplineSpec clamped_spline_spec(Interval range, std::size_t interior, double lambda) {
    SplineSpec spec;
    spec.order = 4;
    spec.lambda = lambda;
    for (int r = 0; r < spec.order; ++r) spec.knots.push_back(range.lo);
    for (std::size_t i = 1; i <= interior; ++i)
        spec.knots.push_back(range.lo + range.length() * static_cast<double>(i) / static_cast<double>(interior + 1));
    for (int r = 0; r < spec.order; ++r) spec.knots.push_back(range.hi);
    return spec;
}

double bspline_basis(std::span<const double> t, std::size_t j, int order, double x) {
    if (order < 1) throw InvalidArgument("B-spline order must be >= 1");
    if (j + static_cast<std::size_t>(order) >= t.size()) throw InvalidArgument("B-spline index out of range");
    if (x < t.front() || x > t.back()) return 0.0;
    if (order == 1) {
        if (t[j] <= x && x < t[j + 1]) return 1.0;
        // Close the last non-empty span so the right end of the range is covered.
        if (x == t.back() && t[j] < t[j + 1] && t[j + 1] == t.back()) return 1.0;
        return 0.0;
    }
    double out = 0.0;
    const std::size_t l = static_cast<std::size_t>(order);
    double left_den = t[j + l - 1] - t[j];
    if (left_den > 0.0) out += (x - t[j]) / left_den * bspline_basis(t, j, order - 1, x);
    double right_den = t[j + l] - t[j + 1];
    if (right_den > 0.0) out += (t[j + l] - x) / right_den * bspline_basis(t, j + 1, order - 1, x);
    return out;
}

BSplineBasis::BSplineBasis(std::vector<double> knots, int order) : knots_(std::move(knots)), order_(order) {
    if (order_ < 1) throw InvalidArgument("B-spline order must be >= 1");
    if (knots_.size() < static_cast<std::size_t>(order_) + 1)
        throw InvalidArgument("need at least order + 1 knots");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (knots_[i] < knots_[i - 1]) throw InvalidArgument("knots must be non-decreasing");
    if (!(hi() > lo())) throw InvalidArgument("knot vector spans an empty interval");
}

std::size_t BSplineBasis::find_span(double x) const {
    const std::size_t p = static_cast<std::size_t>(order_) - 1;
    if (x >= hi()) {
        std::size_t s = size() - 1;
        while (s > p && knots_[s] == knots_[s + 1]) --s;
        return s;
    }
    auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(p),
                               knots_.begin() + static_cast<std::ptrdiff_t>(size()) + 1, x);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

// Nonzero basis functions and derivatives at x (de Boor's triangular scheme).
Eigen::VectorXd BSplineBasis::evaluate(double x, int deriv) const {
    const int p = order_ - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    if (deriv > p) return out;
    x = std::clamp(x, lo(), hi());
    const std::size_t span = find_span(x);
    const auto& U = knots_;

    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            double temp = ndu[j][r] == 0.0 ? 0.0 : ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    if (deriv == 0) {
        for (int j = 0; j <= p; ++j) out(static_cast<Eigen::Index>(span - p + j)) = ndu[j][p];
        return out;
    }
    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        double d = 0.0;
        for (int k = 1; k <= deriv; ++k) {
            d = 0.0;
            int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = ndu[pk + 1][rk] == 0.0 ? 0.0 : a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            int j1 = rk >= -1 ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = ndu[pk + 1][rk + j] == 0.0 ? 0.0 : (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = ndu[pk + 1][r] == 0.0 ? 0.0 : -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            std::swap(s1, s2);
        }
        double factor = 1.0;
        for (int i = p; i > p - deriv; --i) factor *= i;
        out(static_cast<Eigen::Index>(span - p + r)) = d * factor;
    }
    return out;
}

namespace {

// 5-point Gauss-Legendre is exact up to degree 9, enough for order <= 5.
constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};

// Rows sqrt(w_q) * B^(deriv)(x_q) over every span, so that Q'Q is the Gram matrix.
Eigen::MatrixXd quadrature_rows(const BSplineBasis& basis, int deriv) {
    if (basis.order() > 5) throw InvalidArgument("exact Gram matrices support order <= 5");
    const auto& t = basis.knots();
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t s = static_cast<std::size_t>(basis.order()) - 1; s < basis.size(); ++s) {
        double a = t[s], b = t[s + 1];
        if (!(b > a)) continue;
        for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
            double x = 0.5 * (a + b) + 0.5 * (b - a) * kGaussNodes[q];
            rows.push_back(std::sqrt(0.5 * (b - a) * kGaussWeights[q]) * basis.evaluate(x, deriv));
        }
    }
    Eigen::MatrixXd Q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) Q.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return Q;
}

}  // namespace

Eigen::MatrixXd BSplineBasis::gram(int deriv) const {
    Eigen::MatrixXd Q = quadrature_rows(*this, deriv);
    return Q.transpose() * Q;
}

Eigen::MatrixXd BSplineBasis::gram_factor(int deriv) const {
    Eigen::MatrixXd Q = quadrature_rows(*this, deriv);
    const Eigen::Index N = Q.cols();
    if (Q.rows() < N) {
        // Fewer quadrature rows than basis functions: pad with zero rows.
        Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(N, N);
        padded.topRows(Q.rows()) = Q;
        Q = std::move(padded);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
    return qr.matrixQR().topRows(N).triangularView<Eigen::Upper>();
}

}  // namespace monoproj
