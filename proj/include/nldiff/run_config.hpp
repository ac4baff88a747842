#pragma once

// Run configuration: INI-style text with [section] headers or dotted keys.
//
//   seed = 42
//   [grid]
//   nx = 32          # ny, nz default to nx
//   length = 1.0     # or h = ...
//   boundary = free_decay
//   diffusivity.kind = power_law

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nldiff/diffusivity.hpp"
#include "nldiff/field_io.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/identities.hpp"
#include "nldiff/reference_solver.hpp"
#include "nldiff/scenarios.hpp"
#include "nldiff/taylor_stepper.hpp"

namespace nldiff::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& key, const std::string& msg)
        : std::runtime_error(format(source, line, key, msg)), line_(line), key_(key) {}

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    static std::string format(const std::string& source, int line, const std::string& key, const std::string& msg) {
        std::string s = source.empty() ? "config" : source;
        if (line > 0) s += ":" + std::to_string(line);
        if (!key.empty()) s += ": key '" + key + "'";
        return s + ": " + msg;
    }

    int line_;
    std::string key_;
};

struct Entry {
    std::string value;
    int line = 0;
};

/// Flat `section.key -> value` map that remembers line numbers.
class KeyValues {
public:
    static KeyValues parse(std::istream& is, std::string source = "config") {
        KeyValues kv;
        kv.source_ = std::move(source);
        std::string raw, section;
        int lineno = 0;
        while (std::getline(is, raw)) {
            ++lineno;
            std::string line = trim(strip_comment(raw));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(kv.source_, lineno, "", "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw ConfigError(kv.source_, lineno, "", "empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(kv.source_, lineno, "", "expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(kv.source_, lineno, "", "missing key before '='");
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
            const std::string full = section.empty() ? key : section + "." + key;
            if (kv.entries_.count(full)) {
                throw ConfigError(kv.source_, lineno, full,
                                  "duplicate key (first set on line " + std::to_string(kv.entries_[full].line) + ")");
            }
            kv.entries_[full] = {value, lineno};
            kv.order_.push_back(full);
        }
        return kv;
    }

    static KeyValues parse_string(const std::string& text, std::string source = "config") {
        std::istringstream is(text);
        return parse(is, std::move(source));
    }

    const std::string& source() const { return source_; }
    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const std::vector<std::string>& keys() const { return order_; }
    const Entry& entry(const std::string& key) const { return entries_.at(key); }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    ConfigError error(const std::string& key, const std::string& msg) const {
        return ConfigError(source_, line(key), key, msg);
    }

    std::string get_string(const std::string& key, const std::string& def) const {
        return has(key) ? entries_.at(key).value : def;
    }

    std::string require_string(const std::string& key) const {
        if (!has(key)) throw ConfigError(source_, 0, key, "required key missing");
        return entries_.at(key).value;
    }

    double get_double(const std::string& key, double def) const { return has(key) ? to_double(key) : def; }
    double require_double(const std::string& key) const {
        require_string(key);
        return to_double(key);
    }

    long get_int(const std::string& key, long def) const {
        if (!has(key)) return def;
        const std::string& v = entries_.at(key).value;
        try {
            std::size_t used = 0;
            const long r = std::stol(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw error(key, "expected an integer, got '" + v + "'");
        }
    }

    bool get_bool(const std::string& key, bool def) const {
        if (!has(key)) return def;
        std::string v = lower(entries_.at(key).value);
        if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "off" || v == "no" || v == "0") return false;
        throw error(key, "expected a boolean (true/false/on/off), got '" + entries_.at(key).value + "'");
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> def) const {
        if (!has(key)) return def;
        std::vector<double> out;
        for (const auto& item : split_list(entries_.at(key).value)) {
            out.push_back(parse_double(key, item));
        }
        return out;
    }

    std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> def) const {
        return has(key) ? split_list(entries_.at(key).value) : def;
    }

    static std::string lower(std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
        return s;
    }

    static std::vector<std::string> split_list(const std::string& v) {
        std::vector<std::string> out;
        std::string cur;
        std::string body = trim(v);
        if (body.size() >= 2 && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
        std::istringstream is(body);
        while (std::getline(is, cur, ',')) {
            cur = trim(cur);
            if (!cur.empty()) out.push_back(cur);
        }
        return out;
    }

private:
    static std::string strip_comment(const std::string& s) {
        const auto p = s.find_first_of("#;");
        return p == std::string::npos ? s : s.substr(0, p);
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    double parse_double(const std::string& key, const std::string& v) const {
        try {
            std::size_t used = 0;
            const double r = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw error(key, "expected a number, got '" + v + "'");
        }
    }

    double to_double(const std::string& key) const { return parse_double(key, entries_.at(key).value); }

    std::string source_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// typed blocks

struct GridSpec {
    int nx = 32, ny = 32, nz = 32;
    double h = 1.0 / 32.0;
    Boundary boundary = Boundary::FreeDecay;
};

struct DiffusivitySpec {
    std::string kind = "constant";
    double d0 = 1.0;
    double m = 1.0;
    double beta = 1.0;
    double c_ref = 0.0;
    double c_min = 1e-12;
    std::string table_file;
};

struct InitialSpec {
    std::string kind = "gaussian";
    double amplitude = 1.0;
    double sigma = 0.125;
    double background = 0.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double inside = 1.0, outside = 0.0, half_width = 0.25;  // step
    double epsilon = 0.1;                                   // eigenmode
    int wavenumber = 1;
    double mass = 0.05, t0 = 0.005;                         // barenblatt
    std::string file;                                       // from_file
};

struct SeriesSpec {
    int order = kDefaultSeriesOrder;
    std::vector<double> eval_times;
    bool emit_coefficients = false;
};

struct SolverSpec {
    Scheme scheme = Scheme::ExplicitFluxForm;
    FaceAverage face_average = FaceAverage::Arithmetic;
    double cfl_safety = 0.5;
    double t_end = 0.0;
    std::vector<double> snapshots;
    double l1_threshold = 0.05;      // vs analytic profile, when one exists
    double mass_threshold = 1e-12;   // periodic runs
};

struct IdentitiesSpec {
    std::vector<EquationId> equations{EquationId::E2200, EquationId::E3090, EquationId::E4710, EquationId::E4720,
                                      EquationId::E5020, EquationId::E5120, EquationId::E5200, EquationId::E5680};
    int levels = 2;
    double t = 0.002;
    double snapshot_dt = 2e-4;  // on the base grid, scaled with h
    int derivative_order = 1;   // N for E6690
    double min_order = 1.8;
};

struct PoissonSpec {
    std::string source = "random";  // random | gaussian
    double sigma = 0.2;
    double tolerance = 1e-10;
    double min_order = 1.8;
};

struct CompareSpec {
    std::vector<double> fractions{0.25};  // of the series convergence radius
    double tolerance = 1e-3;
};

struct OutputSpec {
    std::string directory = "out";
    bool csv = true;
    bool vtk = false;
    bool report = true;
};

struct RunConfig {
    std::uint64_t seed = 42;
    GridSpec grid;
    DiffusivitySpec diffusivity;
    InitialSpec initial;
    SeriesSpec series;
    SolverSpec solver;
    IdentitiesSpec identities;
    PoissonSpec poisson;
    CompareSpec compare;
    OutputSpec output;
    std::filesystem::path base_dir;  // relative file paths resolve here
    std::vector<std::pair<std::string, std::string>> echo;  // key = value as read
    std::vector<std::string> warnings;
};

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "seed",
        "grid.nx", "grid.ny", "grid.nz", "grid.n", "grid.h", "grid.length", "grid.boundary",
        "diffusivity.kind", "diffusivity.d0", "diffusivity.m", "diffusivity.beta", "diffusivity.c_ref",
        "diffusivity.c_min", "diffusivity.table_file",
        "initial.kind", "initial.amplitude", "initial.sigma", "initial.background", "initial.center",
        "initial.inside", "initial.outside", "initial.half_width", "initial.epsilon", "initial.wavenumber",
        "initial.mass", "initial.t0", "initial.file",
        "series.order", "series.eval_times", "series.emit_coefficients",
        "solver.scheme", "solver.face_average", "solver.cfl_safety", "solver.t_end", "solver.snapshots",
        "solver.l1_threshold", "solver.mass_threshold",
        "identities.equations", "identities.levels", "identities.t", "identities.snapshot_dt",
        "identities.derivative_order", "identities.min_order",
        "poisson.source", "poisson.sigma", "poisson.tolerance", "poisson.min_order",
        "compare.fractions", "compare.tolerance",
        "output.directory", "output.formats", "output.report",
    };
    return keys;
}

namespace detail {

template <typename T>
T pick(const KeyValues& kv, const std::string& key, const std::vector<std::pair<std::string, T>>& choices, T def) {
    if (!kv.has(key)) return def;
    const std::string v = KeyValues::lower(kv.get_string(key, ""));
    std::string names;
    for (const auto& [name, value] : choices) {
        if (v == name) return value;
        names += (names.empty() ? "" : "|") + name;
    }
    throw kv.error(key, "unknown value '" + kv.get_string(key, "") + "' (expected " + names + ")");
}

}  // namespace detail

inline RunConfig parse_run_config(const KeyValues& kv, bool strict = true, std::filesystem::path base_dir = {}) {
    RunConfig rc;
    rc.base_dir = std::move(base_dir);
    for (const auto& key : kv.keys()) {
        rc.echo.emplace_back(key, kv.entry(key).value);
        if (!known_keys().count(key)) {
            if (strict) throw kv.error(key, "unknown key");
            rc.warnings.push_back("ignored unknown key '" + key + "' (line " + std::to_string(kv.line(key)) + ")");
        }
    }

    const long seed = kv.get_int("seed", 42);
    if (seed < 0) throw kv.error("seed", "must be >= 0");
    rc.seed = static_cast<std::uint64_t>(seed);

    // grid
    auto& g = rc.grid;
    const long n = kv.get_int("grid.n", kv.get_int("grid.nx", 32));
    g.nx = static_cast<int>(kv.get_int("grid.nx", n));
    g.ny = static_cast<int>(kv.get_int("grid.ny", n));
    g.nz = static_cast<int>(kv.get_int("grid.nz", n));
    for (const char* k : {"grid.nx", "grid.ny", "grid.nz"}) {
        if (kv.get_int(k, 3) < 3) throw kv.error(k, "must be >= 3");
    }
    if (kv.has("grid.h") && kv.has("grid.length")) throw kv.error("grid.length", "give either grid.h or grid.length");
    g.h = kv.has("grid.h") ? kv.get_double("grid.h", 0.0) : kv.get_double("grid.length", 1.0) / g.nx;
    if (!(g.h > 0.0)) throw kv.error(kv.has("grid.h") ? "grid.h" : "grid.length", "must be positive");
    g.boundary = detail::pick<Boundary>(kv, "grid.boundary",
                                        {{"free_decay", Boundary::FreeDecay}, {"periodic", Boundary::Periodic}},
                                        Boundary::FreeDecay);

    // diffusivity
    auto& d = rc.diffusivity;
    d.kind = KeyValues::lower(kv.get_string("diffusivity.kind", "constant"));
    if (d.kind != "constant" && d.kind != "power_law" && d.kind != "exponential" && d.kind != "tabulated") {
        throw kv.error("diffusivity.kind", "unknown value '" + d.kind + "' (expected constant|power_law|exponential|tabulated)");
    }
    d.d0 = kv.get_double("diffusivity.d0", 1.0);
    d.m = kv.get_double("diffusivity.m", 1.0);
    d.beta = kv.get_double("diffusivity.beta", 1.0);
    d.c_ref = kv.get_double("diffusivity.c_ref", 0.0);
    d.c_min = kv.get_double("diffusivity.c_min", 1e-12);
    d.table_file = kv.get_string("diffusivity.table_file", "");
    if (d.kind == "tabulated" && d.table_file.empty()) throw kv.error("diffusivity.table_file", "required for tabulated diffusivity");
    if (!(d.d0 > 0.0)) throw kv.error("diffusivity.d0", "must be positive");
    if (d.kind == "power_law" && !(d.m > -1.0)) throw kv.error("diffusivity.m", "power-law exponent must be > -1");
    if (!(d.c_min > 0.0)) throw kv.error("diffusivity.c_min", "must be positive");

    // initial condition
    auto& ic = rc.initial;
    ic.kind = KeyValues::lower(kv.get_string("initial.kind", "gaussian"));
    if (ic.kind != "gaussian" && ic.kind != "step" && ic.kind != "eigenmode" && ic.kind != "barenblatt" &&
        ic.kind != "from_file") {
        throw kv.error("initial.kind", "unknown value '" + ic.kind + "' (expected gaussian|step|eigenmode|barenblatt|from_file)");
    }
    ic.amplitude = kv.get_double("initial.amplitude", ic.amplitude);
    ic.sigma = kv.get_double("initial.sigma", ic.sigma);
    ic.background = kv.get_double("initial.background", ic.background);
    const auto centre = kv.get_doubles("initial.center", {0.0, 0.0, 0.0});
    if (centre.size() != 3) throw kv.error("initial.center", "expected three numbers");
    ic.center = {centre[0], centre[1], centre[2]};
    ic.inside = kv.get_double("initial.inside", ic.inside);
    ic.outside = kv.get_double("initial.outside", ic.outside);
    ic.half_width = kv.get_double("initial.half_width", ic.half_width);
    ic.epsilon = kv.get_double("initial.epsilon", ic.epsilon);
    ic.wavenumber = static_cast<int>(kv.get_int("initial.wavenumber", ic.wavenumber));
    ic.mass = kv.get_double("initial.mass", ic.mass);
    ic.t0 = kv.get_double("initial.t0", ic.t0);
    ic.file = kv.get_string("initial.file", "");
    if (ic.kind == "from_file" && ic.file.empty()) throw kv.error("initial.file", "required for from_file initial data");
    if (ic.kind == "barenblatt" && d.kind != "power_law") {
        throw kv.error("initial.kind", "barenblatt initial data needs diffusivity.kind = power_law");
    }
    if (!(ic.sigma > 0.0)) throw kv.error("initial.sigma", "must be positive");
    if (!(ic.half_width > 0.0)) throw kv.error("initial.half_width", "must be positive");
    if (!(ic.mass > 0.0)) throw kv.error("initial.mass", "must be positive");
    if (!(ic.t0 > 0.0)) throw kv.error("initial.t0", "must be positive");
    if (ic.kind == "barenblatt" && !(d.m > 0.0)) throw kv.error("diffusivity.m", "barenblatt initial data needs m > 0");

    // series
    rc.series.order = static_cast<int>(kv.get_int("series.order", kDefaultSeriesOrder));
    if (rc.series.order < 0 || rc.series.order > kMaxSeriesOrder) {
        throw kv.error("series.order", "must be in [0, " + std::to_string(kMaxSeriesOrder) + "]");
    }
    rc.series.eval_times = kv.get_doubles("series.eval_times", {});
    for (double t : rc.series.eval_times) {
        if (t < 0.0) throw kv.error("series.eval_times", "times must be >= 0");
    }
    rc.series.emit_coefficients = kv.get_bool("series.emit_coefficients", false);

    // solver
    auto& s = rc.solver;
    s.scheme = detail::pick<Scheme>(kv, "solver.scheme",
                                    {{"flux_form", Scheme::ExplicitFluxForm}, {"kirchhoff", Scheme::KirchhoffExplicit}},
                                    Scheme::ExplicitFluxForm);
    s.face_average = detail::pick<FaceAverage>(
        kv, "solver.face_average", {{"arithmetic", FaceAverage::Arithmetic}, {"harmonic", FaceAverage::Harmonic}},
        FaceAverage::Arithmetic);
    s.cfl_safety = kv.get_double("solver.cfl_safety", 0.5);
    if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) throw kv.error("solver.cfl_safety", "must be in (0, 1]");
    s.snapshots = kv.get_doubles("solver.snapshots", {});
    s.t_end = kv.get_double("solver.t_end", s.snapshots.empty() ? 0.0 : s.snapshots.back());
    if (s.snapshots.empty() && s.t_end > 0.0) s.snapshots = {0.0, s.t_end};
    {
        SolverConfig probe;
        probe.cfl_safety = s.cfl_safety;
        probe.t_end = s.t_end;
        probe.snapshot_times = s.snapshots;
        try {
            probe.validate();
        } catch (const std::invalid_argument& e) {
            throw kv.error("solver.snapshots", e.what());
        }
    }
    s.l1_threshold = kv.get_double("solver.l1_threshold", s.l1_threshold);
    s.mass_threshold = kv.get_double("solver.mass_threshold", s.mass_threshold);

    // identities
    auto& id = rc.identities;
    if (kv.has("identities.equations")) {
        id.equations.clear();
        for (const auto& name : kv.get_strings("identities.equations", {})) {
            const auto e = equation_from_string(name);
            if (!e) throw kv.error("identities.equations", "unknown equation '" + name + "'");
            id.equations.push_back(*e);
        }
    }
    id.levels = static_cast<int>(kv.get_int("identities.levels", id.levels));
    if (id.levels < 1 || id.levels > 4) throw kv.error("identities.levels", "must be in [1, 4]");
    id.t = kv.get_double("identities.t", id.t);
    id.snapshot_dt = kv.get_double("identities.snapshot_dt", id.snapshot_dt);
    if (!(id.t > 0.0) || !(id.snapshot_dt > 0.0) || id.snapshot_dt > id.t) {
        throw kv.error("identities.snapshot_dt", "need 0 < snapshot_dt <= identities.t");
    }
    id.derivative_order = static_cast<int>(kv.get_int("identities.derivative_order", id.derivative_order));
    id.min_order = kv.get_double("identities.min_order", id.min_order);

    // poisson
    rc.poisson.source = KeyValues::lower(kv.get_string("poisson.source", "random"));
    if (rc.poisson.source != "random" && rc.poisson.source != "gaussian") {
        throw kv.error("poisson.source", "unknown value '" + rc.poisson.source + "' (expected random|gaussian)");
    }
    rc.poisson.sigma = kv.get_double("poisson.sigma", rc.poisson.sigma);
    rc.poisson.tolerance = kv.get_double("poisson.tolerance", rc.poisson.tolerance);
    rc.poisson.min_order = kv.get_double("poisson.min_order", rc.poisson.min_order);

    // compare
    rc.compare.fractions = kv.get_doubles("compare.fractions", rc.compare.fractions);
    for (double f : rc.compare.fractions) {
        if (!(f > 0.0)) throw kv.error("compare.fractions", "fractions must be positive");
    }
    rc.compare.tolerance = kv.get_double("compare.tolerance", rc.compare.tolerance);

    // output
    rc.output.directory = kv.get_string("output.directory", "out");
    if (kv.has("output.formats")) {
        rc.output.csv = rc.output.vtk = false;
        for (const auto& f : kv.get_strings("output.formats", {})) {
            const std::string v = KeyValues::lower(f);
            if (v == "csv") rc.output.csv = true;
            else if (v == "vtk") rc.output.vtk = true;
            else throw kv.error("output.formats", "unknown format '" + f + "' (expected csv|vtk)");
        }
    }
    rc.output.report = kv.get_bool("output.report", true);
    return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path, bool strict = true) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path.string(), 0, "", "cannot open config file");
    const KeyValues kv = KeyValues::parse(is, path.string());
    return parse_run_config(kv, strict, path.parent_path());
}

// ---------------------------------------------------------------------------
// builders

inline std::filesystem::path resolve(const RunConfig& rc, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() || rc.base_dir.empty() ? p : rc.base_dir / p;
}

/// Grid centred on the origin (cell centres for periodic, nodes for free decay).
inline Grid3 make_grid(const GridSpec& s, int refine = 0) {
    Grid3 g;
    const int f = 1 << refine;
    g.nx = s.nx * f;
    g.ny = s.ny * f;
    g.nz = s.nz * f;
    g.h = s.h / f;
    g.boundary = s.boundary;
    const int n[3] = {g.nx, g.ny, g.nz};
    for (int a = 0; a < 3; ++a) {
        g.origin[a] = s.boundary == Boundary::Periodic ? -0.5 * n[a] * g.h : -0.5 * (n[a] - 1) * g.h;
    }
    g.validate();
    return g;
}

/// Reads `c,D` rows (header line first) for a tabulated law.
inline std::vector<std::pair<double, double>> read_table(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open diffusivity table " + path.string());
    std::string line;
    std::getline(is, line);
    std::vector<std::pair<double, double>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 'c,D'");
        }
        rows.emplace_back(std::stod(a), std::stod(b));
    }
    return rows;
}

inline DiffusivityModel make_model(const RunConfig& rc) {
    const auto& d = rc.diffusivity;
    if (d.kind == "constant") return DiffusivityModel::constant(d.d0, d.c_ref);
    if (d.kind == "power_law") return DiffusivityModel::power_law(d.d0, d.m, d.c_ref, d.c_min);
    if (d.kind == "exponential") return DiffusivityModel::exponential(d.d0, d.beta, d.c_ref);
    return DiffusivityModel::tabulated(read_table(resolve(rc, d.table_file)), d.c_ref);
}

inline analytic::BarenblattPattle barenblatt_of(const RunConfig& rc) {
    return {rc.diffusivity.d0, rc.diffusivity.m, rc.initial.mass, rc.initial.t0, rc.initial.center};
}

inline ScalarField3 make_initial(const RunConfig& rc, const Grid3& g) {
    const auto& ic = rc.initial;
    if (ic.kind == "gaussian") return scenario::gaussian(g, ic.amplitude, ic.sigma, ic.background, ic.center);
    if (ic.kind == "step") return scenario::step(g, ic.inside, ic.outside, ic.half_width, ic.center);
    if (ic.kind == "eigenmode") return scenario::eigenmode(g, ic.background, ic.epsilon, ic.wavenumber);
    if (ic.kind == "barenblatt") return scenario::barenblatt(g, barenblatt_of(rc));
    const auto path = resolve(rc, ic.file);
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open initial field " + path.string());
    if (path.extension() == ".vtk") {
        ScalarField3 f = io::read_vtk(is, g.boundary);
        if (!(f.grid() == g)) throw ShapeError("initial field grid " + f.grid().str() + " differs from " + g.str());
        return f;
    }
    return io::read_csv(is, g);
}

}  // namespace nldiff::config
