#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace monoproj {

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    GridMismatch() : Error("grid mismatch: functions are defined on different grids") {}
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : Error(path + ", line " + std::to_string(line) + ": " + what), path_(std::move(path)), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    std::size_t line_;
};

inline constexpr std::size_t kMaxDim = 3;
inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
    bool operator==(const Interval&) const = default;
};

// Regression input: n rows of (x in R^p, y). Immutable once built.
class Dataset {
public:
    // `x` is row-major, n*p entries. Throws InvalidArgument on any violated invariant.
    Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y, std::vector<Interval> domain);

    // Domain defaults to the bounding box of the predictors.
    static Dataset from_points(std::size_t dim, std::vector<double> x, std::vector<double> y);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return y_.size(); }
    std::span<const double> point(std::size_t i) const { return {x_.data() + i * dim_, dim_}; }
    double x(std::size_t i, std::size_t axis) const { return x_[i * dim_ + axis]; }
    double y(std::size_t i) const { return y_[i]; }
    std::span<const double> xs() const noexcept { return x_; }
    std::span<const double> ys() const noexcept { return y_; }
    const std::vector<Interval>& domain() const noexcept { return domain_; }

    // Same design and domain, new responses.
    Dataset with_responses(std::vector<double> y) const;

private:
    std::size_t dim_;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<Interval> domain_;
};

// Tensor-product grid with trapezoidal product quadrature weights.
class Grid {
public:
    explicit Grid(std::vector<std::vector<double>> axes);

    static Grid uniform(const std::vector<Interval>& domain, std::size_t nodes_per_axis);
    static Grid uniform(const std::vector<Interval>& domain, const std::vector<std::size_t>& nodes);
    // 101 nodes for p=1, 51 for p=2, 21 for p=3.
    static std::size_t default_nodes(std::size_t dim);

    std::size_t dim() const noexcept { return axes_.size(); }
    std::size_t size() const noexcept { return weights_.size(); }
    const std::vector<double>& axis(std::size_t k) const { return axes_[k]; }
    const std::vector<std::vector<double>>& axes() const noexcept { return axes_; }
    const std::vector<double>& axis_weights(std::size_t k) const { return axis_weights_[k]; }
    std::size_t extent(std::size_t k) const { return axes_[k].size(); }
    std::size_t stride(std::size_t k) const { return strides_[k]; }
    std::vector<std::size_t> shape() const;
    std::span<const double> weights() const noexcept { return weights_; }
    Interval bounds(std::size_t k) const { return {axes_[k].front(), axes_[k].back()}; }
    std::vector<Interval> bounds() const;
    double volume() const;

    // Row-major multi-index (last axis fastest).
    std::vector<std::size_t> unravel(std::size_t flat) const;
    std::vector<double> node(std::size_t flat) const;

    bool operator==(const Grid& other) const { return axes_ == other.axes_; }

private:
    std::vector<std::vector<double>> axes_;
    std::vector<std::vector<double>> axis_weights_;
    std::vector<std::size_t> strides_;
    std::vector<double> weights_;
};

// Values sampled on a Grid. The grid is shared and immutable.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values);

    template <typename F>
    static GridFunction sample(std::shared_ptr<const Grid> grid, F&& fn) {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
        return GridFunction(std::move(grid), std::move(v));
    }
    static GridFunction constant(std::shared_ptr<const Grid> grid, double c);

    const Grid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    bool same_grid(const GridFunction& other) const;
    GridFunction with_values(std::vector<double> values) const;

    // Multilinear interpolation; points outside the grid are clamped to its box.
    double interpolate(std::span<const double> x) const;

    double min() const;
    double max() const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

struct MonotoneViolation {
    double max_violation = 0.0;
    std::vector<double> axis_violations;
};

// sum_i w_i f_i g_i
double weighted_inner_product(const GridFunction& f, const GridFunction& g);

// (sum_i w_i |f_i - g_i|^q)^(1/q); q == kSupNorm gives max_i |f_i - g_i|.
double norm_lp(const GridFunction& f, const GridFunction& g, double q);

// Weighted L2 norm of f itself.
double norm2(const GridFunction& f);

// Largest decrease between axis-adjacent nodes, per axis and overall.
MonotoneViolation monotone_violation(const GridFunction& f);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a);

// Maps the coordinates of `x` from `domain` onto [0,1]^p.
std::vector<double> to_unit(std::span<const double> x, const std::vector<Interval>& domain);

}  // namespace monoproj
