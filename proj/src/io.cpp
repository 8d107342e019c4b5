#include "monoproj/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace monoproj {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;
};

double parse_cell(const std::string& cell, const std::string& source, std::size_t line, const std::string& column) {
    if (cell.empty()) throw ParseError(source, line, "empty cell in column '" + column + "'");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError(source, line, "non-numeric value '" + cell + "' in column '" + column + "'");
    if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value '" + cell + "' in column '" + column + "'");
    return v;
}

Table read_table(std::istream& in, const std::string& source) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto cells = split(stripped);
        if (!have_header) {
            std::set<std::string> seen;
            for (const auto& c : cells) {
                if (c.empty()) throw ParseError(source, lineno, "empty column name in header");
                if (!seen.insert(c).second) throw ParseError(source, lineno, "duplicate header '" + c + "'");
            }
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError(source, lineno, "expected " + std::to_string(t.header.size()) + " columns, found " +
                                                 std::to_string(cells.size()));
        std::vector<double> row;
        for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], source, lineno, t.header[c]));
        t.rows.push_back(std::move(row));
        t.row_lines.push_back(lineno);
    }
    if (!have_header) throw ParseError(source, lineno, "missing header row");
    return t;
}

// Number of leading x1..xp columns, checking they are followed by `last`.
std::size_t predictor_columns(const Table& t, const std::string& last, const std::string& source) {
    std::size_t p = 0;
    while (p < t.header.size() && t.header[p] == "x" + std::to_string(p + 1)) ++p;
    if (p == 0 || p > kMaxDim)
        throw ParseError(source, 0, "header must start with x1[,x2[,x3]] (found " + std::to_string(p) + " predictors)");
    if (p >= t.header.size() || t.header[p] != last)
        throw ParseError(source, 0, "expected column '" + last + "' after the predictor columns");
    return p;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    return in;
}

void write_row(std::ostream& out, const std::vector<double>& xs, std::initializer_list<double> values) {
    bool first = true;
    for (double v : xs) {
        if (!first) out << ',';
        out << format_double(v);
        first = false;
    }
    for (double v : values) out << ',' << format_double(v);
    out << '\n';
}

void write_header(std::ostream& out, std::size_t dim, std::initializer_list<const char*> tail) {
    for (std::size_t k = 0; k < dim; ++k) out << (k ? "," : "") << 'x' << k + 1;
    for (const char* c : tail) out << ',' << c;
    out << '\n';
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in, const std::string& source) {
    Table t = read_table(in, source);
    const std::size_t p = predictor_columns(t, "y", source);
    if (t.rows.size() < 2) throw ParseError(source, 0, "need at least 2 data rows");
    std::vector<double> x, y;
    for (const auto& row : t.rows) {
        x.insert(x.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(p));
        y.push_back(row[p]);
    }
    try {
        return Dataset::from_points(p, std::move(x), std::move(y));
    } catch (const InvalidArgument& e) {
        throw ParseError(source, 0, e.what());
    }
}

Dataset parse_dataset_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_dataset_csv(in, path.string());
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    write_header(out, data.dim(), {"y"});
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto pt = data.point(i);
        write_row(out, std::vector<double>(pt.begin(), pt.end()), {data.y(i)});
    }
}

GridFunction parse_grid_function_csv(std::istream& in, const std::string& source) {
    Table t = read_table(in, source);
    const std::size_t p = predictor_columns(t, "value", source);
    if (t.header.size() != p + 1) throw ParseError(source, 0, "grid function CSV has unexpected extra columns");
    std::vector<std::vector<double>> axes(p);
    for (std::size_t k = 0; k < p; ++k) {
        std::set<double> coords;
        for (const auto& row : t.rows) coords.insert(row[k]);
        axes[k].assign(coords.begin(), coords.end());
    }
    std::shared_ptr<const Grid> grid;
    try {
        grid = std::make_shared<const Grid>(std::move(axes));
    } catch (const InvalidArgument& e) {
        throw ParseError(source, 0, e.what());
    }
    if (t.rows.size() != grid->size())
        throw ParseError(source, 0, "expected " + std::to_string(grid->size()) + " rows for a full tensor grid, found " +
                                        std::to_string(t.rows.size()));
    std::vector<double> values(grid->size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto node = grid->node(r);
        for (std::size_t k = 0; k < p; ++k)
            if (t.rows[r][k] != node[k])
                throw ParseError(source, t.row_lines[r], "nodes are not in row-major grid order");
        values[r] = t.rows[r][p];
    }
    return GridFunction(std::move(grid), std::move(values));
}

GridFunction parse_grid_function_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_grid_function_csv(in, path.string());
}

void write_grid_function_csv(std::ostream& out, const GridFunction& f) {
    write_header(out, f.grid().dim(), {"value"});
    for (std::size_t i = 0; i < f.size(); ++i) write_row(out, f.grid().node(i), {f[i]});
}

void write_band_csv(std::ostream& out, const GridFunction& estimate, const GridFunction& lower,
                    const GridFunction& upper) {
    if (!estimate.same_grid(lower) || !estimate.same_grid(upper)) throw GridMismatch();
    write_header(out, estimate.grid().dim(), {"estimate", "lower", "upper"});
    for (std::size_t i = 0; i < estimate.size(); ++i)
        write_row(out, estimate.grid().node(i), {estimate[i], lower[i], upper[i]});
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const std::map<std::string, KernelFamily> kFamilies{
    {"gaussian", KernelFamily::gaussian},
    {"epanechnikov", KernelFamily::epanechnikov},
    {"uniform", KernelFamily::uniform},
};

}  // namespace

nlohmann::json smoother_to_json(const SmootherSpec& spec) {
    nlohmann::json j;
    if (const auto* k = std::get_if<KernelSpec>(&spec)) {
        j["type"] = "kernel";
        for (const auto& [name, fam] : kFamilies)
            if (fam == k->family) j["family"] = name;
        if (!k->bandwidth.empty()) j["bandwidth"] = k->bandwidth;
        j["degree"] = k->degree;
    } else {
        const auto& s = std::get<SplineSmootherSpec>(spec);
        j["type"] = "spline";
        j["interior_knots"] = s.interior_knots;
        if (s.lambda) j["lambda"] = *s.lambda;
    }
    return j;
}

SmootherSpec smoother_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw InvalidArgument("smoother spec must be an object with a string \"type\"");
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "kernel") {
            KernelSpec k;
            for (const auto& [key, val] : j.items())
                if (key != "type" && key != "family" && key != "bandwidth" && key != "degree")
                    throw InvalidArgument("unknown kernel smoother field '" + key + "'");
            if (j.contains("family")) {
                auto it = kFamilies.find(j["family"].get<std::string>());
                if (it == kFamilies.end()) throw InvalidArgument("unknown kernel family");
                k.family = it->second;
            }
            if (j.contains("bandwidth")) {
                if (j["bandwidth"].is_number())
                    k.bandwidth = {j["bandwidth"].get<double>()};
                else
                    k.bandwidth = j["bandwidth"].get<std::vector<double>>();
                for (double h : k.bandwidth)
                    if (!(h > 0.0)) throw InvalidArgument("kernel bandwidth must be positive");
            }
            if (j.contains("degree")) k.degree = j["degree"].get<int>();
            if (k.degree < 0) throw InvalidArgument("local polynomial degree must be >= 0");
            return k;
        }
        if (type == "spline") {
            SplineSmootherSpec s;
            for (const auto& [key, val] : j.items())
                if (key != "type" && key != "interior_knots" && key != "lambda")
                    throw InvalidArgument("unknown spline smoother field '" + key + "'");
            if (j.contains("interior_knots")) s.interior_knots = j["interior_knots"].get<std::size_t>();
            if (j.contains("lambda") && !j["lambda"].is_null()) {
                s.lambda = j["lambda"].get<double>();
                if (!(*s.lambda > 0.0 && *s.lambda <= 1.0))
                    throw InvalidArgument("smoothing weight lambda must lie in (0, 1]");
            }
            return s;
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed smoother spec: ") + e.what());
    }
    throw InvalidArgument("unknown smoother type '" + type + "'");
}

SmootherSpec parse_smoother(const std::string& text) {
    if (text == "kernel") return KernelSpec{};
    if (text == "spline") return SplineSmootherSpec{};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("smoother spec is not valid JSON: ") + e.what());
    }
    return smoother_from_json(j);
}

nlohmann::json diagnostics_to_json(const SmootherDiagnostics& d) {
    nlohmann::json j;
    j["degree_fallbacks"] = d.degree_fallbacks;
    j["bandwidth_inflations"] = d.bandwidth_inflations;
    j["ridge_jitter"] = d.ridge_jitter;
    if (d.lambda) j["lambda"] = *d.lambda;
    if (!d.bandwidth.empty()) j["bandwidth"] = d.bandwidth;
    j["warnings"] = d.warnings;
    return j;
}

nlohmann::json projection_to_json(const ProjectionResult& r) {
    nlohmann::json j;
    j["sweeps"] = r.sweeps;
    j["final_violation"] = r.final_violation;
    j["converged"] = r.converged;
    j["norm_history"] = r.residual_norm_history;
    j["tol"] = r.tol;
    return j;
}

}  // namespace monoproj
