#include "monoproj/smoothers.hpp"
#include "spline_model.hpp"

namespace monoproj {

namespace {

std::vector<SplineSpec> default_knots(const Dataset& data, const SplineSmootherSpec& s) {
    std::vector<SplineSpec> specs;
    for (std::size_t k = 0; k < data.dim(); ++k)
        specs.push_back(clamped_spline_spec(data.domain()[k], s.interior_knots, s.lambda.value_or(0.5)));
    return specs;
}

}  // namespace

std::string smoother_name(const SmootherSpec& spec) {
    return std::holds_alternative<KernelSpec>(spec) ? "kernel" : "spline";
}

SmoothFit fit_smoother(const Dataset& data, const SmootherSpec& spec, std::shared_ptr<const Grid> grid) {
    if (const auto* k = std::get_if<KernelSpec>(&spec)) return local_poly_fit(data, *k, std::move(grid));
    const auto& s = std::get<SplineSmootherSpec>(spec);
    if (s.lambda) {
        if (!(*s.lambda > 0.0 && *s.lambda <= 1.0)) throw InvalidArgument("smoothing weight lambda must lie in (0, 1]");
    }
    auto specs = default_knots(data, s);
    auto model = detail::build_spline_model(data, specs, std::move(grid));
    return detail::fit_spline_model(model, data.ys(), s.lambda);
}

PreparedSmoother::PreparedSmoother(const Dataset& design, SmootherSpec spec, std::shared_ptr<const Grid> grid)
    : design_(design), spec_(std::move(spec)), grid_(std::move(grid)) {
    if (const auto* k = std::get_if<KernelSpec>(&spec_)) {
        linear_.emplace(local_poly_operator(design_, *k, grid_));
    } else {
        const auto& s = std::get<SplineSmootherSpec>(spec_);
        auto specs = default_knots(design_, s);
        spline_ = std::make_shared<const detail::SplineModel>(detail::build_spline_model(design_, specs, grid_));
    }
}

SmoothFit PreparedSmoother::fit(std::span<const double> y) const {
    if (linear_) return SmoothFit{linear_->apply(y), linear_->diagnostics(), {}};
    return detail::fit_spline_model(*spline_, y, std::get<SplineSmootherSpec>(spec_).lambda);
}

}  // namespace monoproj
