#include "monoproj/projection.hpp"

#include <algorithm>
#include <cmath>

namespace monoproj {

// ---------------------------------------------------------------------------
// Greatest convex minorant

double ConvexMinorant::operator()(double x) const {
    if (x <= breakpoints.front()) return values.front();
    if (x >= breakpoints.back()) return values.back();
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    return values[i] + slopes[i] * (x - breakpoints[i]);
}

ConvexMinorant gcm(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("gcm: xs and ys differ in length");
    if (xs.size() < 2) throw InvalidArgument("gcm needs at least 2 points");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw InvalidArgument("gcm: xs must be strictly increasing");

    // Lower hull scan; a point is dropped when it lies on or above the chord.
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull.back();
            double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }

    ConvexMinorant out;
    for (std::size_t h : hull) {
        out.breakpoints.push_back(xs[h]);
        out.values.push_back(ys[h]);
    }
    for (std::size_t s = 0; s + 1 < hull.size(); ++s)
        out.slopes.push_back((ys[hull[s + 1]] - ys[hull[s]]) / (xs[hull[s + 1]] - xs[hull[s]]));
    std::size_t seg = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        while (xs[hull[seg + 1]] <= xs[i]) ++seg;
        out.segment_slopes.push_back(out.slopes[seg]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 1-D projection

namespace {

struct Block {
    double value;
    double weight;
    std::size_t count;
};

// Weighted PAVA on a strided line; `stack` is scratch space.
void pava_line(const double* in, double* out, std::size_t stride, std::span<const double> weights,
               std::vector<Block>& stack) {
    stack.clear();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        stack.push_back({in[i * stride], weights[i], 1});
        while (stack.size() >= 2 && stack[stack.size() - 2].value > stack.back().value) {
            Block top = stack.back();
            stack.pop_back();
            Block& prev = stack.back();
            double w = prev.weight + top.weight;
            prev.value = (prev.weight * prev.value + top.weight * top.value) / w;
            prev.weight = w;
            prev.count += top.count;
        }
    }
    std::size_t i = 0;
    for (const Block& b : stack)
        for (std::size_t c = 0; c < b.count; ++c, ++i) out[i * stride] = b.value;
}

}  // namespace

std::vector<double> pava(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) throw InvalidArgument("pava: values and weights differ in length");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("pava: weights must be positive");
    std::vector<double> out(values.size());
    std::vector<Block> stack;
    stack.reserve(values.size());
    pava_line(values.data(), out.data(), 1, weights, stack);
    return out;
}

GridFunction project_monotone_1d(const GridFunction& f) {
    if (f.grid().dim() != 1) throw InvalidArgument("project_monotone_1d needs a 1-D grid");
    return f.with_values(pava(f.values(), f.grid().axis_weights(0)));
}

GridFunction project_monotone_1d(const GridFunction& f, std::span<const double> weights) {
    if (f.grid().dim() != 1) throw InvalidArgument("project_monotone_1d needs a 1-D grid");
    if (weights.size() != f.size()) throw InvalidArgument("one weight per grid node is required");
    return f.with_values(pava(f.values(), weights));
}

namespace {

void project_lines(std::span<const double> in, std::span<double> out, const Grid& grid, std::size_t axis) {
    const std::size_t stride = grid.stride(axis), n = grid.extent(axis);
    const auto& w = grid.axis_weights(axis);
    std::vector<Block> stack;
    stack.reserve(n);
    // Line starts: every node whose index along `axis` is zero.
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < grid.size(); outer += block)
        for (std::size_t inner = 0; inner < stride; ++inner)
            pava_line(in.data() + outer + inner, out.data() + outer + inner, stride, w, stack);
}

double max_violation(std::span<const double> v, const Grid& grid) {
    double worst = 0.0;
    for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
        const std::size_t stride = grid.stride(axis), n = grid.extent(axis), block = stride * n;
        for (std::size_t outer = 0; outer < grid.size(); outer += block)
            for (std::size_t i = outer; i + stride < outer + block; ++i) worst = std::max(worst, v[i] - v[i + stride]);
    }
    return worst;
}

}  // namespace

GridFunction project_along_axis(const GridFunction& f, std::size_t axis) {
    if (axis >= f.grid().dim()) throw InvalidArgument("axis out of range");
    std::vector<double> out(f.size());
    project_lines(f.values(), out, f.grid(), axis);
    return f.with_values(std::move(out));
}

GridFunction dual_cone_residual(const GridFunction& f, std::size_t axis) {
    return f - project_along_axis(f, axis);
}

// ---------------------------------------------------------------------------
// N-D projection

ProjectionResult project_monotone_nd(const GridFunction& f, const ProjectionOptions& options) {
    const Grid& grid = f.grid();
    const std::size_t dim = grid.dim();
    const double tol = options.tol.value_or(1e-8 * (f.max() - f.min()));
    if (options.tol && !(*options.tol > 0.0)) throw InvalidArgument("projection tolerance must be positive");
    if (options.max_sweeps < 1) throw InvalidArgument("max_sweeps must be >= 1");

    if (dim == 1) {
        GridFunction p = project_monotone_1d(f);
        double v = monotone_violation(p).max_violation;
        return ProjectionResult{p, 1, v, tol, {norm2(p)}, v <= tol};
    }

    const std::size_t size = grid.size();
    const auto weights = grid.weights();
    auto weighted_norm = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < size; ++i) s += weights[i] * v[i] * v[i];
        return std::sqrt(s);
    };

    std::vector<std::vector<double>> residual(dim, std::vector<double>(size, 0.0));
    std::vector<double> input(size), iterate(f.values().begin(), f.values().end()), previous = iterate;
    ProjectionResult result{f, 0, 0.0, tol, {}, false};

    for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        result.sweeps = sweep;
        for (std::size_t k = 0; k < dim; ++k) {
            // f plus every other axis' residual
            for (std::size_t i = 0; i < size; ++i) {
                double v = f[i];
                for (std::size_t j = 0; j < dim; ++j)
                    if (j != k) v += residual[j][i];
                input[i] = v;
            }
            project_lines(input, iterate, grid, k);
            for (std::size_t i = 0; i < size; ++i) residual[k][i] = iterate[i] - input[i];
            result.residual_norm_history.push_back(weighted_norm(iterate));
        }
        // A sweep of per-axis isotonic fits already yields a monotone surface,
        // so monotonicity alone does not signal arrival at the projection; the
        // iterate must also have stopped moving.
        double change = 0.0;
        for (std::size_t i = 0; i < size; ++i) change = std::max(change, std::abs(iterate[i] - previous[i]));
        previous = iterate;
        const bool last = sweep == options.max_sweeps;
        if (change > tol && !last) continue;
        const double violation = max_violation(iterate, grid);
        if ((violation <= tol && change <= tol) || last) {
            result.projected = f.with_values(iterate);
            result.final_violation = violation;
            result.converged = violation <= tol && change <= tol;
            return result;
        }
    }
    return result;
}

}  // namespace monoproj
