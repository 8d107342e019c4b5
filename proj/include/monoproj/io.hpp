#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "monoproj/bootstrap.hpp"
#include "monoproj/core.hpp"
#include "monoproj/projection.hpp"
#include "monoproj/smoothers.hpp"

namespace monoproj {

// Shortest text that round-trips the double exactly ("%.17g" style).
std::string format_double(double v);

// Dataset CSV: header `x1[,x2[,x3]],y` followed optionally by further named
// numeric columns (ignored). Lines starting with '#' and blank lines are
// skipped. The domain is the bounding box of the predictors.
Dataset parse_dataset_csv(std::istream& in, const std::string& source = "<stream>");
Dataset parse_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

// GridFunction CSV: header `x1[,x2[,x3]],value`, one row per node in
// row-major order (last axis varies fastest).
GridFunction parse_grid_function_csv(std::istream& in, const std::string& source = "<stream>");
GridFunction parse_grid_function_csv(const std::filesystem::path& path);
void write_grid_function_csv(std::ostream& out, const GridFunction& f);

// Band CSV: node coordinates, estimate, lower, upper.
void write_band_csv(std::ostream& out, const GridFunction& estimate, const GridFunction& lower,
                    const GridFunction& upper);

// {"type":"kernel","family":"gaussian","bandwidth":[...],"degree":1}
// {"type":"spline","interior_knots":20,"lambda":0.5}
nlohmann::json smoother_to_json(const SmootherSpec& spec);
SmootherSpec smoother_from_json(const nlohmann::json& j);
// Accepts a JSON object, or the shorthands "kernel" and "spline".
SmootherSpec parse_smoother(const std::string& text);

nlohmann::json diagnostics_to_json(const SmootherDiagnostics& d);
// {"sweeps", "final_violation", "converged", "norm_history", "tol"}
nlohmann::json projection_to_json(const ProjectionResult& r);

}  // namespace monoproj
