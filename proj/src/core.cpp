#include "monoproj/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

namespace monoproj {

namespace {

void check_dim(std::size_t dim) {
    if (dim < 1 || dim > kMaxDim)
        throw InvalidArgument("dimension must be between 1 and 3, got " + std::to_string(dim));
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y, std::vector<Interval> domain)
    : dim_(dim), x_(std::move(x)), y_(std::move(y)), domain_(std::move(domain)) {
    check_dim(dim_);
    if (x_.size() != y_.size() * dim_)
        throw InvalidArgument("predictor array has " + std::to_string(x_.size()) + " entries, expected " +
                              std::to_string(y_.size() * dim_));
    if (domain_.size() != dim_) throw InvalidArgument("domain must have one interval per axis");
    for (const auto& iv : domain_)
        if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw InvalidArgument("domain intervals must be finite with lo < hi");
    for (std::size_t i = 0; i < y_.size(); ++i) {
        if (!std::isfinite(y_[i])) throw InvalidArgument("response " + std::to_string(i) + " is not finite");
        for (std::size_t k = 0; k < dim_; ++k) {
            double v = x_[i * dim_ + k];
            if (!std::isfinite(v) || !domain_[k].contains(v))
                throw InvalidArgument("point " + std::to_string(i) + " lies outside the declared domain");
        }
    }
    for (std::size_t k = 0; k < dim_; ++k) {
        std::set<double> distinct;
        for (std::size_t i = 0; i < y_.size() && distinct.size() < 2; ++i) distinct.insert(x_[i * dim_ + k]);
        if (distinct.size() < 2)
            throw InvalidArgument("axis " + std::to_string(k + 1) + " needs at least 2 distinct predictor values");
    }
}

Dataset Dataset::from_points(std::size_t dim, std::vector<double> x, std::vector<double> y) {
    check_dim(dim);
    std::vector<Interval> dom(dim, Interval{std::numeric_limits<double>::infinity(),
                                            -std::numeric_limits<double>::infinity()});
    for (std::size_t i = 0; i * dim < x.size(); ++i)
        for (std::size_t k = 0; k < dim; ++k) {
            dom[k].lo = std::min(dom[k].lo, x[i * dim + k]);
            dom[k].hi = std::max(dom[k].hi, x[i * dim + k]);
        }
    return Dataset(dim, std::move(x), std::move(y), std::move(dom));
}

Dataset Dataset::with_responses(std::vector<double> y) const {
    return Dataset(dim_, x_, std::move(y), domain_);
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
    check_dim(axes_.size());
    axis_weights_.resize(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        const auto& a = axes_[k];
        if (a.size() < 2) throw InvalidArgument("each grid axis needs at least 2 nodes");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!std::isfinite(a[i])) throw InvalidArgument("grid coordinates must be finite");
            if (i > 0 && !(a[i] > a[i - 1])) throw InvalidArgument("grid axis coordinates must be strictly increasing");
        }
        auto& w = axis_weights_[k];
        w.assign(a.size(), 0.0);
        for (std::size_t i = 0; i + 1 < a.size(); ++i) {
            double half = 0.5 * (a[i + 1] - a[i]);
            w[i] += half;
            w[i + 1] += half;
        }
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t k = axes_.size() - 1; k-- > 0;) strides_[k] = strides_[k + 1] * axes_[k + 1].size();
    std::size_t total = strides_[0] * axes_[0].size();
    weights_.assign(total, 1.0);
    for (std::size_t flat = 0; flat < total; ++flat)
        for (std::size_t k = 0; k < axes_.size(); ++k)
            weights_[flat] *= axis_weights_[k][(flat / strides_[k]) % axes_[k].size()];
}

Grid Grid::uniform(const std::vector<Interval>& domain, std::size_t nodes_per_axis) {
    return uniform(domain, std::vector<std::size_t>(domain.size(), nodes_per_axis));
}

Grid Grid::uniform(const std::vector<Interval>& domain, const std::vector<std::size_t>& nodes) {
    if (nodes.size() != domain.size()) throw InvalidArgument("node counts must match the domain dimension");
    std::vector<std::vector<double>> axes(domain.size());
    for (std::size_t k = 0; k < domain.size(); ++k) {
        if (nodes[k] < 2) throw InvalidArgument("each grid axis needs at least 2 nodes");
        axes[k].resize(nodes[k]);
        const double lo = domain[k].lo, hi = domain[k].hi;
        for (std::size_t i = 0; i < nodes[k]; ++i)
            axes[k][i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nodes[k] - 1);
        axes[k].back() = hi;
    }
    return Grid(std::move(axes));
}

std::size_t Grid::default_nodes(std::size_t dim) {
    switch (dim) {
        case 1: return 101;
        case 2: return 51;
        case 3: return 21;
        default: throw InvalidArgument("dimension must be between 1 and 3");
    }
}

std::vector<std::size_t> Grid::shape() const {
    std::vector<std::size_t> s;
    for (const auto& a : axes_) s.push_back(a.size());
    return s;
}

std::vector<Interval> Grid::bounds() const {
    std::vector<Interval> b;
    for (std::size_t k = 0; k < dim(); ++k) b.push_back(bounds(k));
    return b;
}

double Grid::volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) v *= bounds(k).length();
    return v;
}

std::vector<std::size_t> Grid::unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(dim());
    for (std::size_t k = 0; k < dim(); ++k) idx[k] = (flat / strides_[k]) % axes_[k].size();
    return idx;
}

std::vector<double> Grid::node(std::size_t flat) const {
    std::vector<double> x(dim());
    for (std::size_t k = 0; k < dim(); ++k) x[k] = axes_[k][(flat / strides_[k]) % axes_[k].size()];
    return x;
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("grid function needs a grid");
    if (values_.size() != grid_->size())
        throw InvalidArgument("grid function has " + std::to_string(values_.size()) + " values for " +
                              std::to_string(grid_->size()) + " grid nodes");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidArgument("grid function values must be finite");
}

GridFunction GridFunction::constant(std::shared_ptr<const Grid> grid, double c) {
    std::size_t n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, c));
}

bool GridFunction::same_grid(const GridFunction& other) const {
    return grid_ == other.grid_ || *grid_ == *other.grid_;
}

GridFunction GridFunction::with_values(std::vector<double> values) const {
    return GridFunction(grid_, std::move(values));
}

double GridFunction::interpolate(std::span<const double> x) const {
    const Grid& g = *grid_;
    if (x.size() != g.dim()) throw InvalidArgument("interpolation point has the wrong dimension");
    std::array<std::size_t, kMaxDim> lower{};
    std::array<double, kMaxDim> frac{};
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const auto& a = g.axis(k);
        double v = std::clamp(x[k], a.front(), a.back());
        auto it = std::upper_bound(a.begin(), a.end(), v);
        std::size_t hi = static_cast<std::size_t>(it - a.begin());
        if (hi >= a.size()) hi = a.size() - 1;
        if (hi == 0) hi = 1;
        lower[k] = hi - 1;
        frac[k] = (v - a[hi - 1]) / (a[hi] - a[hi - 1]);
    }
    double result = 0.0;
    const std::size_t corners = std::size_t{1} << g.dim();
    for (std::size_t c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t k = 0; k < g.dim(); ++k) {
            bool up = (c >> k) & 1u;
            w *= up ? frac[k] : 1.0 - frac[k];
            flat += (lower[k] + (up ? 1 : 0)) * g.stride(k);
        }
        if (w != 0.0) result += w * values_[flat];
    }
    return result;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

// ---------------------------------------------------------------------------
// Norms

double weighted_inner_product(const GridFunction& f, const GridFunction& g) {
    if (!f.same_grid(g)) throw GridMismatch();
    auto w = f.grid().weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * g[i];
    return s;
}

double norm_lp(const GridFunction& f, const GridFunction& g, double q) {
    if (!f.same_grid(g)) throw GridMismatch();
    if (std::isnan(q) || q < 1.0) throw InvalidArgument("norm exponent must be >= 1");
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
        return m;
    }
    auto w = f.grid().weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f[i] - g[i]), q);
    return std::pow(s, 1.0 / q);
}

double norm2(const GridFunction& f) { return std::sqrt(weighted_inner_product(f, f)); }

MonotoneViolation monotone_violation(const GridFunction& f) {
    const Grid& g = f.grid();
    MonotoneViolation out;
    out.axis_violations.assign(g.dim(), 0.0);
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const std::size_t stride = g.stride(k), n = g.extent(k);
        double worst = 0.0;
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            if ((flat / stride) % n == n - 1) continue;
            worst = std::max(worst, f[flat] - f[flat + stride]);
        }
        out.axis_violations[k] = worst;
        out.max_violation = std::max(out.max_violation, worst);
    }
    return out;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    if (!a.same_grid(b)) throw GridMismatch();
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return a.with_values(std::move(v));
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    if (!a.same_grid(b)) throw GridMismatch();
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return a.with_values(std::move(v));
}

GridFunction operator-(const GridFunction& a) {
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x = -x;
    return a.with_values(std::move(v));
}

std::vector<double> to_unit(std::span<const double> x, const std::vector<Interval>& domain) {
    std::vector<double> u(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) u[k] = (x[k] - domain[k].lo) / domain[k].length();
    return u;
}

}  // namespace monoproj
