#include "monoproj/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

#include "monoproj/bootstrap.hpp"
#include "monoproj/io.hpp"
#include "monoproj/projection.hpp"
#include "monoproj/random.hpp"
#include "monoproj/simbench.hpp"
#include "monoproj/toxicology.hpp"

namespace monoproj {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    if (!c.input.empty()) j["input"] = c.input.string();
    j["out_dir"] = c.out_dir.string();
    if (!c.out.empty()) j["out"] = c.out.string();
    j["smoother"] = smoother_to_json(c.smoother);
    j["grid_nodes"] = c.grid_nodes;
    if (c.tol) j["tol"] = *c.tol;
    if (c.max_sweeps) j["max_sweeps"] = *c.max_sweeps;
    j["seed"] = c.seed;
    j["decreasing"] = c.decreasing;
    j["clamp_unit"] = c.clamp_unit;
    if (c.replicates) j["replicates"] = *c.replicates;
    j["bootstrap_replicates"] = c.bootstrap_replicates;
    j["level"] = c.level;
    j["catalog"] = c.catalog;
    j["functions"] = c.functions;
    j["sigmas"] = c.sigmas;
    j["n"] = c.n;
    return j;
}

void apply_config_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "command") continue;
            else if (key == "input") c.input = v.get<std::string>();
            else if (key == "out_dir") c.out_dir = v.get<std::string>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "smoother") c.smoother = v.is_string() ? parse_smoother(v.get<std::string>()) : smoother_from_json(v);
            else if (key == "grid_nodes") c.grid_nodes = v.get<std::size_t>();
            else if (key == "tol") c.tol = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "max_sweeps") c.max_sweeps = v.get<std::size_t>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "decreasing") c.decreasing = v.get<bool>();
            else if (key == "clamp_unit") c.clamp_unit = v.get<bool>();
            else if (key == "replicates") c.replicates = v.get<std::size_t>();
            else if (key == "bootstrap_replicates") c.bootstrap_replicates = v.get<std::size_t>();
            else if (key == "level") c.level = v.get<double>();
            else if (key == "catalog") c.catalog = v.get<std::string>();
            else if (key == "functions") c.functions = v.get<std::vector<std::string>>();
            else if (key == "sigmas") c.sigmas = v.get<std::vector<double>>();
            else if (key == "n") c.n = v.get<std::size_t>();
            else throw InvalidArgument("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config: ") + e.what());
    }
}

namespace {

class NonConvergence : public Error {
public:
    using Error::Error;
};

void validate(const RunConfig& c) {
    if (c.tol && !(*c.tol > 0.0)) throw InvalidArgument("--tol must be positive");
    if (c.max_sweeps && *c.max_sweeps == 0) throw InvalidArgument("--max-sweeps must be positive");
    if (c.grid_nodes == 1) throw InvalidArgument("--grid-nodes needs at least 2 nodes per axis");
    if (!(c.level > 0.0 && c.level < 1.0)) throw InvalidArgument("--level must lie in (0, 1)");
}

ProjectionOptions projection_options(const RunConfig& c, std::size_t default_sweeps = ProjectionOptions{}.max_sweeps) {
    ProjectionOptions o;
    o.tol = c.tol;
    o.max_sweeps = c.max_sweeps.value_or(default_sweeps);
    return o;
}

std::shared_ptr<const Grid> make_grid(const std::vector<Interval>& domain, std::size_t nodes) {
    return std::make_shared<const Grid>(Grid::uniform(domain, nodes ? nodes : Grid::default_nodes(domain.size())));
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

GridFunction negate_if(const GridFunction& f, bool flip) { return flip ? -f : f; }

GridFunction clamp_if(const GridFunction& f, bool clamp) {
    if (!clamp) return f;
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return f.with_values(std::move(v));
}

Dataset load_dataset(const RunConfig& c) {
    if (c.input.empty()) throw InvalidArgument("an input file is required");
    Dataset data = parse_dataset_csv(c.input);
    if (!c.decreasing) return data;
    std::vector<double> y(data.ys().begin(), data.ys().end());
    for (double& v : y) v = -v;
    return data.with_responses(std::move(y));
}

json grid_json(const Grid& g) {
    json j = json::array();
    for (std::size_t k = 0; k < g.dim(); ++k) j.push_back({{"lo", g.axis(k).front()}, {"hi", g.axis(k).back()}, {"nodes", g.extent(k)}});
    return j;
}

// ---------------------------------------------------------------------------

int cmd_fit(const RunConfig& c, std::ostream& out) {
    const Dataset data = load_dataset(c);
    const auto grid = make_grid(data.domain(), c.grid_nodes);
    const SmoothFit raw = [&] {
        try {
            return fit_smoother(data, c.smoother, grid);
        } catch (const InvalidArgument&) {
            throw;
        } catch (const Error& e) {
            throw NumericalError(std::string("smoother failed: ") + e.what());
        }
    }();
    const ProjectionResult proj = project_monotone_nd(raw.fit, projection_options(c));

    const GridFunction raw_out = clamp_if(negate_if(raw.fit, c.decreasing), c.clamp_unit);
    const GridFunction proj_out = clamp_if(negate_if(proj.projected, c.decreasing), c.clamp_unit);
    {
        auto f = open_output(c.out_dir / "raw_fit.csv");
        write_grid_function_csv(f, raw_out);
    }
    {
        auto f = open_output(c.out_dir / "projected_fit.csv");
        write_grid_function_csv(f, proj_out);
    }
    json j;
    j["config"] = to_json(c);
    j["n"] = data.size();
    j["dim"] = data.dim();
    j["grid"] = grid_json(*grid);
    j["smoother"] = smoother_to_json(c.smoother);
    j["smoother_diagnostics"] = diagnostics_to_json(raw.diagnostics);
    j["projection"] = projection_to_json(proj);
    j["output_violation"] = monotone_violation(c.decreasing ? -proj_out : proj_out).max_violation;
    write_json(c.out_dir / "diagnostics.json", j);
    out << "fit: n=" << data.size() << " sweeps=" << proj.sweeps << " violation=" << format_double(proj.final_violation)
        << " -> " << c.out_dir.string() << '\n';
    if (!proj.converged) throw NonConvergence("projection did not converge within " + std::to_string(proj.sweeps) + " sweeps");
    return kExitOk;
}

int cmd_project(const RunConfig& c, std::ostream& out) {
    if (c.input.empty()) throw InvalidArgument("an input grid CSV is required");
    const GridFunction f = negate_if(parse_grid_function_csv(c.input), c.decreasing);
    const ProjectionResult proj = project_monotone_nd(f, projection_options(c));
    {
        auto o = open_output(c.out_dir / "projected.csv");
        write_grid_function_csv(o, clamp_if(negate_if(proj.projected, c.decreasing), c.clamp_unit));
    }
    json j = projection_to_json(proj);
    j["config"] = to_json(c);
    write_json(c.out_dir / "projection.json", j);
    out << "project: sweeps=" << proj.sweeps << " violation=" << format_double(proj.final_violation) << " -> "
        << c.out_dir.string() << '\n';
    if (!proj.converged) throw NonConvergence("projection did not converge within " + std::to_string(proj.sweeps) + " sweeps");
    return kExitOk;
}

struct Bands {
    GridFunction estimate, lower, upper, raw;
};

// Undo the sign flip used for decreasing fits, then clamp.
Bands finish_bands(const BandEstimate& b, bool decreasing, bool clamp) {
    if (!decreasing)
        return {clamp_if(b.estimate, clamp), clamp_if(b.lower, clamp), clamp_if(b.upper, clamp), clamp_if(b.raw_fit, clamp)};
    return {clamp_if(-b.estimate, clamp), clamp_if(-b.upper, clamp), clamp_if(-b.lower, clamp), clamp_if(-b.raw_fit, clamp)};
}

json band_json(const RunConfig& c, const BandEstimate& b) {
    json j;
    j["config"] = to_json(c);
    j["smoother"] = smoother_to_json(c.smoother);
    j["grid"] = grid_json(b.estimate.grid());
    j["level"] = b.level;
    j["replicates"] = b.replicates;
    j["failed_replicates"] = b.failed_replicates;
    j["seed"] = b.seed;
    j["estimate_sweeps"] = b.estimate_sweeps;
    j["estimate_violation"] = b.estimate_violation;
    return j;
}

BootstrapOptions bootstrap_options(const RunConfig& c) {
    BootstrapOptions o;
    o.replicates = c.replicates.value_or(2000);
    o.level = c.level;
    o.seed = c.seed;
    o.projection = projection_options(c, kReplicateMaxSweeps);
    return o;
}

int cmd_bootstrap(const RunConfig& c, std::ostream& out) {
    const Dataset data = load_dataset(c);
    const auto grid = make_grid(data.domain(), c.grid_nodes);
    const BandEstimate band = bootstrap_bands(data, c.smoother, grid, bootstrap_options(c));
    const Bands b = finish_bands(band, c.decreasing, c.clamp_unit);
    {
        auto o = open_output(c.out_dir / "bands.csv");
        write_band_csv(o, b.estimate, b.lower, b.upper);
    }
    write_json(c.out_dir / "bootstrap.json", band_json(c, band));
    out << "bootstrap: B=" << band.replicates << " failed=" << band.failed_replicates << " -> " << c.out_dir.string() << '\n';
    return kExitOk;
}

int cmd_toxicology(const RunConfig& c, std::ostream& out) {
    // The 4x4 dose layout sits on grid nodes when the spacing divides 1.
    const Dataset data = c.input.empty() ? toxicology_dataset() : load_dataset(c);
    if (data.dim() != 2) throw InvalidArgument("toxicology data must have two predictors");
    const auto grid = make_grid(data.domain(), c.grid_nodes ? c.grid_nodes : 31);
    RunConfig rc = c;
    rc.clamp_unit = true;
    const BandEstimate band = bootstrap_bands(data, c.smoother, grid, bootstrap_options(rc));
    const Bands b = finish_bands(band, c.decreasing, true);
    {
        auto o = open_output(c.out_dir / "toxicology_bands.csv");
        write_band_csv(o, b.estimate, b.lower, b.upper);
    }

    json cells = json::array();
    std::size_t inside = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto x = data.point(i);
        const double y = c.decreasing ? -data.y(i) : data.y(i);
        const double fit = b.estimate.interpolate(x), lo = b.lower.interpolate(x), hi = b.upper.interpolate(x);
        const bool in = lo <= y && y <= hi;
        inside += in;
        cells.push_back({{"x1", x[0]}, {"x2", x[1]}, {"observed", y}, {"fitted", fit}, {"lower", lo}, {"upper", hi}, {"inside", in}});
    }
    const double corner_lo = b.estimate.interpolate(std::vector<double>{data.domain()[0].lo, data.domain()[1].lo});
    const double corner_hi = b.estimate.interpolate(std::vector<double>{data.domain()[0].hi, data.domain()[1].hi});
    json j = band_json(rc, band);
    j["cells"] = cells;
    j["inside_band"] = inside;
    j["n"] = data.size();
    j["fit_at_min_corner"] = corner_lo;
    j["fit_at_max_corner"] = corner_hi;
    j["output_violation"] = monotone_violation(c.decreasing ? -b.estimate : b.estimate).max_violation;
    write_json(c.out_dir / "toxicology_summary.json", j);
    out << "toxicology: " << inside << "/" << data.size() << " observed proportions inside the " << c.level * 100
        << "% bands (B=" << band.replicates << ", failed=" << band.failed_replicates << ") -> " << c.out_dir.string()
        << '\n';
    return kExitOk;
}

std::vector<MeanFunctionId> resolve_functions(const RunConfig& c, std::size_t dim, std::vector<MeanFunctionId> defaults) {
    if (c.functions.empty()) return defaults;
    std::vector<MeanFunctionId> ids;
    for (const auto& name : c.functions) {
        MeanFunctionId id = parse_mean_function(name);
        if (catalog_dim(id) != dim) throw InvalidArgument(name + " does not belong to the " + c.catalog + " catalog");
        ids.push_back(id);
    }
    return ids;
}

std::size_t catalog_dimension(const std::string& name) {
    if (name == "1d") return 1;
    if (name == "2d") return 2;
    if (name == "3d") return 3;
    throw InvalidArgument("--catalog must be one of 1d, 2d, 3d");
}

fs::path table_path(const RunConfig& c) { return c.out.empty() ? c.out_dir / (c.command + ".csv") : c.out; }

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    const std::size_t dim = catalog_dimension(c.catalog);
    const auto ids = resolve_functions(c, dim, catalog(dim));
    std::vector<double> sigmas = c.sigmas;
    if (sigmas.empty())
        for (int i = 0; i <= 13; ++i) sigmas.push_back(0.1 * i);
    for (double s : sigmas)
        if (!(s >= 0.0)) throw InvalidArgument("sigmas must be >= 0");

    const fs::path path = table_path(c);
    auto o = open_output(path);
    o << "function,smoother,sigma,n,replicates,failed,mean_rmse,sd_rmse,se_rmse,mean_raw_rmse\n";
    for (MeanFunctionId id : ids) {
        for (std::size_t si = 0; si < sigmas.size(); ++si) {
            ExperimentConfig e;
            e.mean_id = id;
            e.sigma = sigmas[si];
            e.n = c.n;
            e.replicates = c.replicates.value_or(50);
            e.smoother = c.smoother;
            // One stream family per (function, sigma) cell.
            e.seed = derive_seed(derive_seed(c.seed, static_cast<std::uint64_t>(id)), si);
            e.grid_nodes = c.grid_nodes;
            e.projection = projection_options(c, kReplicateMaxSweeps);
            const RmseSummary s = run_rmse_experiment(e);
            o << to_string(id) << ',' << smoother_name(c.smoother) << ',' << format_double(e.sigma) << ',' << e.n << ','
              << s.replicates << ',' << s.failed << ',' << format_double(s.mean) << ',' << format_double(s.sd) << ','
              << format_double(s.standard_error) << ',' << format_double(s.mean_raw) << '\n';
        }
    }
    out << "simulate: " << ids.size() << " functions x " << sigmas.size() << " sigmas -> " << path.string() << '\n';
    return kExitOk;
}

int cmd_coverage(const RunConfig& c, std::ostream& out) {
    const std::size_t dim = catalog_dimension(c.catalog);
    if (dim == 3) throw InvalidArgument("coverage is available for the 1d and 2d catalogs");
    const auto ids = resolve_functions(c, dim,
                                       dim == 1 ? std::vector{MeanFunctionId::F12, MeanFunctionId::F16}
                                                : std::vector{MeanFunctionId::F21, MeanFunctionId::F26});
    const double sigma = c.sigmas.empty() ? 1.0 : c.sigmas.front();
    if (c.sigmas.size() > 1) throw InvalidArgument("coverage takes a single sigma");
    const auto points = default_coverage_points(dim);

    const fs::path path = table_path(c);
    auto o = open_output(path);
    o << "function,sigma,n,replicates,failed,bootstrap_replicates,level";
    for (std::size_t k = 0; k < dim; ++k) o << ",x" << k + 1;
    o << ",coverage\n";
    for (MeanFunctionId id : ids) {
        ExperimentConfig e;
        e.mean_id = id;
        e.sigma = sigma;
        e.n = c.n;
        e.replicates = c.replicates.value_or(2000);
        e.smoother = c.smoother;
        e.seed = derive_seed(c.seed, static_cast<std::uint64_t>(id));
        e.grid_nodes = c.grid_nodes;
        e.projection = projection_options(c, kReplicateMaxSweeps);
        const CoverageResult r = run_coverage_experiment(e, points, c.bootstrap_replicates, c.level);
        for (std::size_t j = 0; j < points.size(); ++j) {
            o << to_string(id) << ',' << format_double(sigma) << ',' << e.n << ',' << r.replicates << ',' << r.failed
              << ',' << c.bootstrap_replicates << ',' << format_double(c.level);
            for (double v : points[j]) o << ',' << format_double(v);
            o << ',' << format_double(r.coverage[j]) << '\n';
        }
    }
    out << "coverage: " << ids.size() << " functions x " << points.size() << " points -> " << path.string() << '\n';
    return kExitOk;
}

std::optional<fs::path> find_config_flag(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return fs::path(args[i + 1]);
        if (args[i].rfind("--config=", 0) == 0) return fs::path(args[i].substr(9));
    }
    return std::nullopt;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    try {
        if (auto path = find_config_flag(args)) {
            std::ifstream in(*path);
            if (!in) throw InvalidArgument("cannot open config " + path->string());
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw InvalidArgument("config " + path->string() + " is not valid JSON: " + e.what());
            }
            apply_config_json(c, j);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    CLI::App app{"Monotone nonparametric regression by projection"};
    app.name("monoproj");
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, smoother_text;
    double tol = 0.0;
    std::size_t replicates = 0, max_sweeps = 0;
    std::string input;
    app.add_option("--config", config_path, "JSON file of run parameters; command-line flags take precedence");
    app.add_option("--seed", c.seed, "RNG seed");
    app.add_option("--grid-nodes", c.grid_nodes, "Grid nodes per axis (default 101/51/21 for 1/2/3 predictors)");
    auto* tol_opt = app.add_option("--tol", tol, "Projection stopping tolerance (default 1e-8 times the range)");
    auto* sweeps_opt = app.add_option("--max-sweeps", max_sweeps, "Projection sweep limit");
    app.add_option("--out-dir", c.out_dir, "Directory for output files");

    auto* fit = app.add_subcommand("fit", "Fit a smoother and project it onto the monotone cone");
    auto* project = app.add_subcommand("project", "Project a gridded function onto the monotone cone");
    auto* boot = app.add_subcommand("bootstrap", "Residual-bootstrap percentile bands around the projected fit");
    auto* simulate = app.add_subcommand("simulate", "RMSE experiments over the test-function catalog");
    auto* coverage = app.add_subcommand("coverage", "Pointwise coverage of bootstrap bands");
    auto* tox = app.add_subcommand("toxicology", "Analysis of the bundled DDT/TiO2 micronucleus data");

    std::vector<CLI::Option*> smoother_opts, replicate_opts;
    for (auto* sub : {fit, project, boot, tox}) {
        sub->add_option("input,--input,-i", input, sub == project ? "GridFunction CSV" : "Dataset CSV");
        sub->add_flag("--decreasing", c.decreasing, "Fit a non-increasing function instead");
        if (sub != tox) sub->add_flag("--clamp-unit", c.clamp_unit, "Clamp written surfaces to [0, 1]");
    }
    for (auto* sub : {fit, boot, simulate, coverage, tox})
        smoother_opts.push_back(sub->add_option("--smoother", smoother_text, "\"kernel\", \"spline\" or a JSON spec"));
    for (auto* sub : {boot, simulate, coverage, tox}) {
        replicate_opts.push_back(sub->add_option("--replicates", replicates, "Bootstrap or Monte Carlo replicates"));
        if (sub != simulate) sub->add_option("--level", c.level, "Nominal pointwise confidence level");
    }
    coverage->add_option("--bootstrap-replicates", c.bootstrap_replicates, "Bootstrap replicates per outer replicate");
    for (auto* sub : {simulate, coverage}) {
        sub->add_option("--catalog", c.catalog, "1d, 2d or 3d");
        sub->add_option("--functions", c.functions, "Comma-separated catalog ids, e.g. F11,F13")->delimiter(',');
        sub->add_option("--sigmas", c.sigmas, "Comma-separated noise levels")->delimiter(',');
        sub->add_option("--n", c.n, "Sample size");
        sub->add_option("--out", c.out, "Output CSV path");
    }

    std::vector<const char*> argv{"monoproj"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        auto* sub = app.get_subcommands().front();
        c.command = sub->get_name();
        if (tol_opt->count()) c.tol = tol;
        if (sweeps_opt->count()) c.max_sweeps = max_sweeps;
        if (!input.empty()) c.input = input;
        for (auto* o : smoother_opts)
            if (o->count()) c.smoother = parse_smoother(smoother_text);
        for (auto* o : replicate_opts)
            if (o->count()) c.replicates = replicates;
        validate(c);

        if (c.command == "fit") return cmd_fit(c, out);
        if (c.command == "project") return cmd_project(c, out);
        if (c.command == "bootstrap") return cmd_bootstrap(c, out);
        if (c.command == "simulate") return cmd_simulate(c, out);
        if (c.command == "coverage") return cmd_coverage(c, out);
        return cmd_toxicology(c, out);
    } catch (const NonConvergence& e) {
        err << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace monoproj
