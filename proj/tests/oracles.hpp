#pragma once

// Reference implementations used only by the tests. Each is written
// independently of the library code it checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// 1-D isotonic regression by exhaustive search over consecutive poolings.

inline std::vector<double> pooling_isotonic(const std::vector<double>& f, const std::vector<double>& w) {
    const std::size_t n = f.size();
    if (n == 0) return {};
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_fit;
    // Bit i set: a block boundary between i and i+1.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        std::vector<double> fit(n);
        std::size_t start = 0;
        double prev = -std::numeric_limits<double>::infinity();
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            bool end = i + 1 == n || ((mask >> i) & 1u);
            if (!end) continue;
            double sw = 0.0, swf = 0.0;
            for (std::size_t k = start; k <= i; ++k) sw += w[k], swf += w[k] * f[k];
            double m = swf / sw;
            if (m < prev) ok = false;
            for (std::size_t k = start; k <= i; ++k) fit[k] = m;
            prev = m;
            start = i + 1;
        }
        if (!ok) continue;
        double sse = 0.0;
        for (std::size_t k = 0; k < n; ++k) sse += w[k] * (f[k] - fit[k]) * (f[k] - fit[k]);
        if (sse < best) best = sse, best_fit = fit;
    }
    return best_fit;
}

// ---------------------------------------------------------------------------
// Order constraints g[a] <= g[b] between axis-adjacent nodes of a row-major grid.

inline std::vector<std::pair<std::size_t, std::size_t>> grid_order_pairs(const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t k = shape.size(); k-- > 1;) strides[k - 1] = strides[k] * shape[k];
    std::size_t total = strides[0] * shape[0];
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t flat = 0; flat < total; ++flat)
        for (std::size_t k = 0; k < shape.size(); ++k)
            if ((flat / strides[k]) % shape[k] + 1 < shape[k]) pairs.emplace_back(flat, flat + strides[k]);
    return pairs;
}

// Primal active-set solve of
//   min 1/2 sum w_i (g_i - f_i)^2  subject to  g_a <= g_b for every pair.
// Starts from the weighted-mean constant (feasible); every blocking
// constraint added is independent of the working set.
inline std::vector<double> active_set_qp(const std::vector<double>& f, const std::vector<double>& w,
                                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                         int max_iter = 100000) {
    const auto n = static_cast<Eigen::Index>(f.size());
    Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), n);
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, wv.dot(fv) / wv.sum());
    std::vector<std::size_t> working;
    auto row = [&](std::size_t c) {
        Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
        a(static_cast<Eigen::Index>(pairs[c].first)) = 1.0;
        a(static_cast<Eigen::Index>(pairs[c].second)) = -1.0;
        return a;
    };
    for (int iter = 0; iter < max_iter; ++iter) {
        const auto m = static_cast<Eigen::Index>(working.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
        K.topLeftCorner(n, n) = wv.asDiagonal();
        for (Eigen::Index r = 0; r < m; ++r) {
            Eigen::RowVectorXd a = row(working[static_cast<std::size_t>(r)]);
            K.block(n + r, 0, 1, n) = a;
            K.block(0, n + r, n, 1) = a.transpose();
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
        rhs.head(n) = -wv.cwiseProduct(x - fv);
        Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
        Eigen::VectorXd p = sol.head(n);
        Eigen::VectorXd lambda = sol.tail(m);
        const double scale = 1.0 + fv.cwiseAbs().maxCoeff();
        if (p.cwiseAbs().maxCoeff() <= 1e-13 * scale) {
            if (m == 0) break;
            Eigen::Index worst = 0;
            double most_negative = lambda.minCoeff(&worst);
            if (most_negative >= -1e-13 * scale * wv.maxCoeff()) break;
            working.erase(working.begin() + worst);
            continue;
        }
        double alpha = 1.0;
        std::size_t blocking = pairs.size();
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            if (std::find(working.begin(), working.end(), c) != working.end()) continue;
            double ap = p(static_cast<Eigen::Index>(pairs[c].first)) - p(static_cast<Eigen::Index>(pairs[c].second));
            if (ap <= 1e-15 * scale) continue;
            double ax = x(static_cast<Eigen::Index>(pairs[c].first)) - x(static_cast<Eigen::Index>(pairs[c].second));
            double step = std::max(0.0, -ax / ap);
            if (step < alpha) alpha = step, blocking = c;
        }
        x += alpha * p;
        if (blocking < pairs.size()) working.push_back(blocking);
    }
    return {x.data(), x.data() + n};
}

// Min-max formula for isotonic regression on a partial order:
//   g(x) = max over upper sets U containing x of min over lower sets L
//          containing x of the weighted average of f over U intersect L.
// Lower sets of a 2-D grid are staircases; there are C(r+c, r) of them.
inline std::vector<double> minmax_isotonic_2d(const std::vector<double>& f, const std::vector<double>& w,
                                              std::size_t rows, std::size_t cols) {
    // A lower set is given by non-increasing column heights h_0 >= h_1 >= ... (row counts per column).
    std::vector<std::vector<std::size_t>> stairs;
    std::vector<std::size_t> h(cols);
    auto rec = [&](auto&& self, std::size_t c, std::size_t cap) -> void {
        if (c == cols) {
            stairs.push_back(h);
            return;
        }
        for (std::size_t v = 0; v <= cap; ++v) {
            h[c] = v;
            self(self, c + 1, v);
        }
    };
    rec(rec, 0, rows);
    // Node (i, j) is in lower set L iff i < h[j]; in the upper set complementary to L iff i >= h[j].
    std::vector<double> out(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& u : stairs) {
                if (!(i >= u[j])) continue;  // upper set must contain (i, j)
                double inner = std::numeric_limits<double>::infinity();
                for (const auto& l : stairs) {
                    if (!(i < l[j])) continue;
                    double sw = 0.0, swf = 0.0;
                    for (std::size_t c = 0; c < cols; ++c)
                        for (std::size_t r = u[c]; r < l[c]; ++r) sw += w[r * cols + c], swf += w[r * cols + c] * f[r * cols + c];
                    if (sw > 0.0) inner = std::min(inner, swf / sw);
                }
                best = std::max(best, inner);
            }
            out[i * cols + j] = best;
        }
    return out;
}

// ---------------------------------------------------------------------------
// B-splines straight from the recursion, with derivatives from the
// derivative recurrence. Order-1 indicators are half-open except on the last
// non-empty span.

inline double bspline(const std::vector<double>& t, std::size_t j, int k, double x) {
    if (k == 1) {
        std::size_t last = t.size() - 1;
        while (last > 0 && t[last - 1] == t[last]) --last;  // right end of the last non-empty span
        if (t[j] < t[j + 1] && t[j] <= x && (x < t[j + 1] || (j + 1 == last && x == t[j + 1]))) return 1.0;
        return 0.0;
    }
    double a = 0.0, b = 0.0;
    double d1 = t[j + static_cast<std::size_t>(k) - 1] - t[j];
    double d2 = t[j + static_cast<std::size_t>(k)] - t[j + 1];
    if (d1 > 0.0) a = (x - t[j]) / d1 * bspline(t, j, k - 1, x);
    if (d2 > 0.0) b = (t[j + static_cast<std::size_t>(k)] - x) / d2 * bspline(t, j + 1, k - 1, x);
    return a + b;
}

inline double bspline_deriv(const std::vector<double>& t, std::size_t j, int k, double x, int deriv) {
    if (deriv == 0) return bspline(t, j, k, x);
    double a = 0.0, b = 0.0;
    double d1 = t[j + static_cast<std::size_t>(k) - 1] - t[j];
    double d2 = t[j + static_cast<std::size_t>(k)] - t[j + 1];
    if (d1 > 0.0) a = bspline_deriv(t, j, k - 1, x, deriv - 1) / d1;
    if (d2 > 0.0) b = bspline_deriv(t, j + 1, k - 1, x, deriv - 1) / d2;
    return (k - 1) * (a - b);
}

// 6-point Gauss-Legendre on [-1, 1].
inline const std::vector<std::pair<double, double>>& gauss6() {
    static const std::vector<std::pair<double, double>> rule{
        {-0.9324695142031521, 0.1713244923791704}, {-0.6612093864662645, 0.3607615730481386},
        {-0.2386191860831969, 0.4679139345726910}, {0.2386191860831969, 0.4679139345726910},
        {0.6612093864662645, 0.3607615730481386},  {0.9324695142031521, 0.1713244923791704},
    };
    return rule;
}

// Integration nodes (x, weight) covering every non-empty knot span, exact
// for polynomials of degree <= 11 per span.
inline std::vector<std::pair<double, double>> span_quadrature(const std::vector<double>& t) {
    std::vector<std::pair<double, double>> q;
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
        if (!(t[s + 1] > t[s])) continue;
        double mid = 0.5 * (t[s] + t[s + 1]), half = 0.5 * (t[s + 1] - t[s]);
        for (auto [u, w] : gauss6()) q.emplace_back(mid + half * u, half * w);
    }
    return q;
}

inline std::size_t basis_count(const std::vector<double>& t, int order) { return t.size() - static_cast<std::size_t>(order); }

// Gram matrix of deriv-th derivatives by span-wise quadrature.
inline Eigen::MatrixXd gram(const std::vector<double>& t, int order, int deriv) {
    const std::size_t N = basis_count(t, order);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (auto [x, wq] : span_quadrature(t)) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(N));
        for (std::size_t j = 0; j < N; ++j) v(static_cast<Eigen::Index>(j)) = bspline_deriv(t, j, order, x, deriv);
        G += wq * v * v.transpose();
    }
    return G;
}

// Dense solve of  lambda * ||y - B c||^2 + (1 - lambda) c' P c.
inline Eigen::VectorXd penalized_solve(const Eigen::MatrixXd& B, const Eigen::MatrixXd& P, const Eigen::VectorXd& y,
                                       double lambda) {
    Eigen::MatrixXd A = lambda * B.transpose() * B + (1.0 - lambda) * P;
    return A.ldlt().solve(lambda * B.transpose() * y);
}

// ---------------------------------------------------------------------------
// Random helpers

inline std::vector<double> random_monotone_1d(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::exponential_distribution<double> step(1.0);
    std::bernoulli_distribution flat(0.3);
    std::vector<double> v(n);
    double level = std::normal_distribution<double>(0.0, scale)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !flat(rng)) level += scale * step(rng) / static_cast<double>(n) * 4.0;
        v[i] = level;
    }
    return v;
}

}  // namespace oracle
