// nldiff: configuration-driven runs of the series solver, reference solver,
// Poisson checks and identity residual suite.
//
// Exit status: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 series divergence or solver instability.

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nldiff/field_io.hpp"
#include "nldiff/identities.hpp"
#include "nldiff/poisson.hpp"
#include "nldiff/reference_solver.hpp"
#include "nldiff/run_config.hpp"
#include "nldiff/scenarios.hpp"
#include "nldiff/taylor_stepper.hpp"

#ifndef NLDIFF_VERSION
#define NLDIFF_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace nldiff;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kDiverged = 3 };

/// Setup failures caused by config values (bad law parameters, missing files).
struct SetupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Report {
public:
    Report(const std::string& subcommand, const config::RunConfig& rc) {
        doc_["tool"] = "nldiff";
        doc_["version"] = NLDIFF_VERSION;
        doc_["subcommand"] = subcommand;
        json echo = json::object();
        for (const auto& [k, v] : rc.echo) echo[k] = v;
        doc_["config"] = echo;
        doc_["seed"] = rc.seed;
        doc_["phases"] = json::array();
        doc_["checks"] = json::array();
        doc_["results"] = json::object();
        doc_["warnings"] = json::array();
        for (const auto& w : rc.warnings) warn(w);
    }

    template <typename F>
    auto phase(const std::string& name, F&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        struct Stamp {
            Report* r;
            std::string name;
            std::chrono::steady_clock::time_point t0;
            ~Stamp() {
                const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                r->doc_["phases"].push_back({{"name", name}, {"seconds", s}});
            }
        } stamp{this, name, t0};
        return body();
    }

    /// measured <= threshold (or >= when at_least).
    bool check(const std::string& name, double measured, double threshold, bool at_least = false) {
        const bool pass = std::isfinite(measured) ? (at_least ? measured >= threshold : measured <= threshold)
                                                  : (at_least && measured > 0.0);
        doc_["checks"].push_back({{"name", name},
                                  {"measured", measured},
                                  {"threshold", threshold},
                                  {"comparison", at_least ? ">=" : "<="},
                                  {"pass", pass}});
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << std::setprecision(6) << measured
                  << (at_least ? " >= " : " <= ") << threshold << '\n';
        all_pass_ = all_pass_ && pass;
        return pass;
    }

    void warn(const std::string& w) {
        doc_["warnings"].push_back(w);
        std::cerr << "warning: " << w << '\n';
    }

    json& results() { return doc_["results"]; }
    bool all_pass() const { return all_pass_; }

    void finish(const std::string& status, const fs::path& path, bool write) {
        doc_["status"] = status;
        if (!write) return;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        os << doc_.dump(2) << '\n';
    }

private:
    json doc_;
    bool all_pass_ = true;
};

struct Context {
    config::RunConfig rc;
    fs::path out;
    Report* report = nullptr;
};

void write_field(const Context& ctx, const std::string& stem, const ScalarField3& f) {
    if (ctx.rc.output.csv) io::write_csv_file((ctx.out / (stem + ".csv")).string(), f);
    if (ctx.rc.output.vtk) io::write_vtk_file((ctx.out / (stem + ".vtk")).string(), f, stem);
}

std::ofstream open_csv(const Context& ctx, const std::string& name) {
    std::ofstream os(ctx.out / name);
    if (!os) throw std::runtime_error("cannot write " + (ctx.out / name).string());
    os << std::setprecision(io::kDigits);
    return os;
}

struct Setup {
    Grid3 grid;
    DiffusivityModel model;
    ScalarField3 c0;
};

Setup build_setup(const config::RunConfig& rc, int refine = 0) {
    try {
        Grid3 g = config::make_grid(rc.grid, refine);
        DiffusivityModel m = config::make_model(rc);
        ScalarField3 c0 = config::make_initial(rc, g);
        return {g, std::move(m), std::move(c0)};
    } catch (const DivergenceError&) {
        throw;
    } catch (const std::exception& e) {
        throw SetupError(e.what());
    }
}

std::string index_stem(const std::string& prefix, std::size_t k) {
    std::ostringstream s;
    s << prefix << '_' << std::setw(3) << std::setfill('0') << k;
    return s.str();
}

// ---------------------------------------------------------------------------

void run_series(Context& ctx) {
    Report& rep = *ctx.report;
    const auto& rc = ctx.rc;
    const Setup s = rep.phase("setup", [&] { return build_setup(rc); });
    const TaylorState st = rep.phase("build_series", [&] { return build_series(s.c0, s.model, rc.series.order); });

    double coupling = 0.0;
    auto table = open_csv(ctx, "series_coefficients.csv");
    table << "n,a_linf,a_l2,f_linf,d_linf,a_sum\n";
    json norms = json::array();
    for (std::size_t n = 0; n < st.a.size(); ++n) {
        const double dl = n < st.d.size() ? norm_linf(st.d[n]) : 0.0;
        table << n << ',' << norm_linf(st.a[n]) << ',' << norm_l2(st.a[n]) << ',' << norm_linf(st.f[n]) << ',' << dl
              << ',' << sum(st.a[n]) << '\n';
        norms.push_back({{"n", n}, {"a_linf", norm_linf(st.a[n])}, {"a_l2", norm_l2(st.a[n])}});
        if (n + 1 < st.a.size()) {
            const ScalarField3 lap = laplacian(st.f[n]);
            ScalarField3 gap = st.a[n + 1] * static_cast<double>(n + 1) - lap;
            const double scale = norm_linf(lap);
            coupling = std::max(coupling, scale > 0.0 ? norm_linf(gap) / scale : norm_linf(gap));
        }
    }
    rep.results()["coefficients"] = norms;
    rep.results()["order"] = st.order;
    rep.results()["clamped_cells"] = st.clamping.clamped;
    rep.check("series.coupling_identity", coupling, 1e-12);

    if (st.order >= 4) {
        const double radius = convergence_radius(st);
        rep.results()["convergence_radius"] = std::isfinite(radius) ? json(radius) : json("infinity");
    }
    if (rc.series.emit_coefficients) {
        rep.phase("write_coefficients", [&] {
            for (std::size_t n = 0; n < st.a.size(); ++n) write_field(ctx, index_stem("series_a", n), st.a[n]);
            return 0;
        });
    }

    json evals = json::array();
    rep.phase("evaluate", [&] {
        for (std::size_t k = 0; k < rc.series.eval_times.size(); ++k) {
            const double t = rc.series.eval_times[k];
            const ScalarField3 c = evaluate(st, t);
            write_field(ctx, index_stem("series_c", k), c);
            evals.push_back({{"t", t},
                             {"c_linf", norm_linf(c)},
                             {"remainder_linf", remainder_estimate(st, t).linf},
                             {"next_term_linf", next_term_estimate(st, t).linf}});
        }
        return 0;
    });
    rep.results()["evaluations"] = evals;
}

// ---------------------------------------------------------------------------

std::optional<analytic::AnalyticSolution> oracle_for(const config::RunConfig& rc) {
    const auto& ic = rc.initial;
    if (ic.kind == "barenblatt") return analytic::AnalyticSolution(config::barenblatt_of(rc));
    if (ic.kind == "gaussian" && rc.diffusivity.kind == "constant" && ic.background == 0.0 &&
        rc.diffusivity.c_ref == 0.0) {
        // amplitude * exp(-r^2 / sigma^2) is a heat kernel with variance sigma^2 / 2
        const double mass = ic.amplitude * std::pow(std::sqrt(std::numbers::pi) * ic.sigma, 3);
        return analytic::AnalyticSolution(
            analytic::HeatGaussian{rc.diffusivity.d0, mass, 0.5 * ic.sigma * ic.sigma, ic.center});
    }
    return std::nullopt;
}

SolverConfig solver_config(const config::SolverSpec& s) {
    SolverConfig cfg;
    cfg.cfl_safety = s.cfl_safety;
    cfg.t_end = s.t_end;
    cfg.snapshot_times = s.snapshots;
    cfg.scheme = s.scheme;
    cfg.face_average = s.face_average;
    return cfg;
}

void run_reference(Context& ctx) {
    Report& rep = *ctx.report;
    const auto& rc = ctx.rc;
    if (rc.solver.snapshots.empty()) {
        throw config::ConfigError("config", 0, "solver.t_end", "reference run needs solver.t_end > 0 or solver.snapshots");
    }
    const Setup s = rep.phase("setup", [&] { return build_setup(rc); });
    SolverStats stats;
    const Trajectory tr = rep.phase("solve", [&] { return solve(s.c0, s.model, solver_config(rc.solver), &stats); });
    rep.results()["steps"] = stats.steps;
    rep.results()["min_dt"] = stats.min_dt;
    rep.results()["max_dt"] = stats.max_dt;
    rep.results()["clamped_cells"] = stats.clamping.clamped;

    rep.phase("write_fields", [&] {
        for (std::size_t k = 0; k < tr.size(); ++k) write_field(ctx, index_stem("reference_c", k), tr.fields[k]);
        return 0;
    });

    const std::vector<ErrorRow> self = compare(tr, tr);
    double drift = 0.0;
    for (const auto& row : self) drift = std::max(drift, std::abs(row.mass_drift));
    rep.results()["max_mass_drift"] = drift;
    if (s.grid.boundary == Boundary::Periodic) rep.check("reference.mass_drift", drift, rc.solver.mass_threshold);

    const double c0_max = norm_linf(s.c0);
    double c0_min = s.c0[0];
    for (double v : s.c0.values()) c0_min = std::min(c0_min, v);
    if (rc.solver.scheme == Scheme::ExplicitFluxForm && rc.solver.cfl_safety <= 0.5 && c0_min >= 0.0) {
        double lowest = 0.0;
        for (const auto& f : tr.fields)
            for (double v : f.values()) lowest = std::min(lowest, v);
        rep.check("reference.positivity", std::max(0.0, -lowest), 1e-12 * c0_max);
    }

    if (const auto sol = oracle_for(rc)) {
        const std::vector<ErrorRow> rows = rep.phase("compare", [&] { return compare(tr, *sol); });
        auto os = open_csv(ctx, "reference_errors.csv");
        os << "t,l1,l2,linf,rel_l1,rel_l2,rel_linf,mass_error,mass_drift\n";
        for (const auto& r : rows) {
            os << r.t << ',' << r.l1 << ',' << r.l2 << ',' << r.linf << ',' << r.rel_l1 << ',' << r.rel_l2 << ','
               << r.rel_linf << ',' << r.mass_error << ',' << r.mass_drift << '\n';
        }
        rep.results()["oracle"] = std::holds_alternative<analytic::BarenblattPattle>(*sol) ? "barenblatt" : "heat_gaussian";
        rep.check("reference.rel_l1_vs_analytic", rows.back().rel_l1, rc.solver.l1_threshold);
    }
}

// ---------------------------------------------------------------------------

void run_identities(Context& ctx) {
    Report& rep = *ctx.report;
    const auto& rc = ctx.rc;
    const auto& ids = rc.identities;
    if (rc.diffusivity.kind == "constant") {
        for (EquationId e : ids.equations) {
            if (e == EquationId::E5680 || e == EquationId::E6690) {
                throw config::ConfigError("config", 0, "identities.equations",
                                          std::string(to_string(e)) + " needs a nonlinear diffusivity");
            }
        }
    }

    auto os = open_csv(ctx, "identities.csv");
    os << "equation,t,h,dt,norm_l2,norm_linf,normalization,order_estimate\n";
    std::vector<double> previous(ids.equations.size(), 0.0);
    json levels = json::array();
    for (int level = 0; level < ids.levels; ++level) {
        const std::string tag = "level" + std::to_string(level);
        const Setup s = rep.phase(tag + ".setup", [&] { return build_setup(rc, level); });
        const double ds = ids.snapshot_dt / (1 << level);
        const auto m = static_cast<int>(std::lround(ids.t / ds));
        SolverConfig cfg = solver_config(rc.solver);
        cfg.snapshot_times.clear();
        for (int k = 0; k <= m + 1; ++k) cfg.snapshot_times.push_back(k * ds);
        cfg.t_end = cfg.snapshot_times.back();
        const Trajectory tr = rep.phase(tag + ".solve", [&] { return solve(s.c0, s.model, cfg); });

        IdentityChecker chk(tr);
        json rows = json::array();
        rep.phase(tag + ".residuals", [&] {
            for (std::size_t e = 0; e < ids.equations.size(); ++e) {
                const EquationId id = ids.equations[e];
                const ResidualReport r = chk.residual(id, static_cast<std::size_t>(m), ids.derivative_order);
                for (const auto& w : r.warnings) rep.warn(std::string(to_string(id)) + ": " + w);
                const double v = r.normalized_l2();
                os << to_string(id) << ',' << r.t << ',' << r.h << ',' << r.dt << ',' << r.norm_l2 << ',' << r.norm_linf
                   << ',' << r.normalization << ',';
                json row{{"equation", to_string(id)}, {"normalized_l2", v}};
                if (level > 0) {
                    const double order = order_estimate(previous[e], v);
                    os << order;
                    row["order_estimate"] = order;
                    if (level == ids.levels - 1) {
                        rep.check(std::string("identities.") + to_string(id) + ".order", order, ids.min_order, true);
                    }
                }
                os << '\n';
                rows.push_back(row);
                previous[e] = v;
            }
            return 0;
        });
        levels.push_back({{"h", s.grid.h}, {"n", s.grid.nx}, {"snapshot_dt", ds}, {"residuals", rows}});
    }
    rep.results()["levels"] = levels;
}

// ---------------------------------------------------------------------------

ScalarField3 poisson_source(const config::RunConfig& rc, const Grid3& g) {
    const double sigma = rc.poisson.sigma;
    if (rc.poisson.source == "gaussian") return scenario::gaussian(g, 1.0, sigma);
    std::mt19937_64 rng(rc.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return ScalarField3::sample(g, [&](double x, double y, double z) {
        return u(rng) * std::exp(-(x * x + y * y + z * z) / (sigma * sigma));
    });
}

void run_poisson(Context& ctx) {
    Report& rep = *ctx.report;
    const auto& rc = ctx.rc;
    if (rc.grid.boundary != Boundary::FreeDecay) {
        throw config::ConfigError("config", 0, "grid.boundary", "poisson-test needs free_decay");
    }
    const Grid3 g = config::make_grid(rc.grid);
    const ScalarField3 k = poisson_source(rc, g);
    const PoissonSolution direct = rep.phase("direct", [&] { return greens_direct(k); });
    const PoissonSolution fft = rep.phase("fft", [&] { return greens_fft(k); });
    for (const auto& w : fft.warnings) rep.warn(w);
    const double diff = norm_linf(direct.V - fft.V) / norm_linf(direct.V);
    rep.results()["direct_vs_fft_max_rel"] = diff;
    rep.check("poisson.direct_vs_fft", diff, rc.poisson.tolerance);
    write_field(ctx, "poisson_source", k);
    write_field(ctx, "poisson_V", fft.V);

    // second-order check on a smooth Gaussian source at h and h/2
    auto os = open_csv(ctx, "poisson_residuals.csv");
    os << "n,h,residual_linf,relative,face_ratio\n";
    std::vector<double> rel;
    rep.phase("refinement", [&] {
        for (int level = 0; level < 2; ++level) {
            const Grid3 gl = config::make_grid(rc.grid, level);
            const ScalarField3 src = scenario::gaussian(gl, 1.0, rc.poisson.sigma);
            const PoissonSolution sol = greens_fft(src);
            rel.push_back(sol.residual_linf / norm_linf(src));
            os << gl.nx << ',' << gl.h << ',' << sol.residual_linf << ',' << rel.back() << ',' << sol.face_ratio << '\n';
        }
        return 0;
    });
    const double order = order_estimate(rel[0], rel[1]);
    rep.results()["residual_order"] = order;
    rep.check("poisson.residual_order", order, rc.poisson.min_order, true);
}

// ---------------------------------------------------------------------------

void run_compare(Context& ctx) {
    Report& rep = *ctx.report;
    const auto& rc = ctx.rc;
    const Setup s = rep.phase("setup", [&] { return build_setup(rc); });
    const TaylorState st = rep.phase("build_series", [&] { return build_series(s.c0, s.model, rc.series.order); });
    if (st.order < 4) throw config::ConfigError("config", 0, "series.order", "compare needs series.order >= 4");
    const double radius = convergence_radius(st);
    if (!std::isfinite(radius)) {
        rep.warn("stationary initial data: nothing to compare");
        return;
    }
    rep.results()["convergence_radius"] = radius;

    auto os = open_csv(ctx, "compare.csv");
    os << "fraction,t,rel_l2,linf,remainder_linf\n";
    for (std::size_t k = 0; k < rc.compare.fractions.size(); ++k) {
        const double frac = rc.compare.fractions[k];
        const double t = frac * radius;
        SolverConfig cfg = solver_config(rc.solver);
        cfg.t_end = t;
        cfg.snapshot_times = {t};
        const Trajectory tr = rep.phase("reference_" + std::to_string(k), [&] { return solve(s.c0, s.model, cfg); });
        const ScalarField3 series = evaluate(st, t);
        const ScalarField3 diff = series - tr.fields[0];
        const double rel = norm_l2(diff) / norm_l2(tr.fields[0]);
        os << frac << ',' << t << ',' << rel << ',' << norm_linf(diff) << ',' << remainder_estimate(st, t).linf << '\n';
        std::ostringstream name;
        name << "compare.rel_l2_at_" << frac << "_radius";
        rep.check(name.str(), rel, rc.compare.tolerance);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nldiff: nonlinear diffusion series, reference and identity runs"};
    app.set_version_flag("--version", std::string(NLDIFF_VERSION));
    std::string config_path, out_dir;
    int threads = 0;
    bool strict = true;
    app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
    app.add_option("--threads", threads, "Worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
    app.add_flag("--strict,!--no-strict", strict, "Reject unknown config keys (default on)");
    app.require_subcommand(1);
    app.fallthrough();

    using Runner = void (*)(Context&);
    const std::vector<std::tuple<std::string, std::string, Runner>> commands{
        {"series", "Build the Taylor series and evaluate it", run_series},
        {"reference", "Run the explicit reference solver", run_reference},
        {"identities", "Residuals of the derived identities under grid refinement", run_identities},
        {"poisson-test", "Direct vs FFT free-space Poisson solve and residual order", run_poisson},
        {"compare", "Series vs reference solver inside the convergence horizon", run_compare},
    };
    for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    Context ctx;
    try {
        ctx.rc = config::load_run_config(config_path, strict);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    ctx.out = out_dir.empty() ? fs::path(ctx.rc.output.directory) : fs::path(out_dir);
    fs::create_directories(ctx.out);

    std::string sub;
    Runner runner = nullptr;
    for (const auto& [name, help, fn] : commands) {
        if (app.got_subcommand(name)) {
            sub = name;
            runner = fn;
        }
    }
    Report report(sub, ctx.rc);
    ctx.report = &report;
    const fs::path report_path = ctx.out / "report.json";

    int code = kOk;
    std::string status = "ok";
    try {
        runner(ctx);
        if (!report.all_pass()) {
            code = kCheckFailed;
            status = "check_failed";
        }
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        code = kConfigError;
        status = "config_error";
    } catch (const SetupError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        code = kConfigError;
        status = "config_error";
    } catch (const DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        report.results()["diverged_at_order"] = e.order();
        code = kDiverged;
        status = "diverged";
    } catch (const InstabilityError& e) {
        std::cerr << "unstable: " << e.what() << '\n';
        report.results()["unstable_at_step"] = e.step();
        code = kDiverged;
        status = "unstable";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kCheckFailed;
        status = "error";
    }
    try {
        report.finish(status, report_path, ctx.rc.output.report);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (code == kOk) code = kCheckFailed;
    }
    return code;
}
