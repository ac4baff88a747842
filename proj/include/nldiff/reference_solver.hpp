#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "nldiff/diffusivity.hpp"
#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

enum class Scheme { ExplicitFluxForm, KirchhoffExplicit };

inline const char* to_string(Scheme s) {
    return s == Scheme::ExplicitFluxForm ? "flux_form" : "kirchhoff";
}

struct SolverConfig {
    double cfl_safety = 0.5;
    double t_end = 0.0;
    std::vector<double> snapshot_times;
    Scheme scheme = Scheme::ExplicitFluxForm;
    FaceAverage face_average = FaceAverage::Arithmetic;

    void validate() const {
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
            throw std::invalid_argument("solver: cfl_safety must be in (0, 1]");
        }
        if (!(t_end >= 0.0)) {
            throw std::invalid_argument("solver: t_end must be >= 0");
        }
        for (std::size_t n = 0; n < snapshot_times.size(); ++n) {
            const double t = snapshot_times[n];
            if (t < 0.0 || t > t_end) {
                throw std::invalid_argument("solver: snapshot time outside [0, t_end]");
            }
            if (n > 0 && !(t > snapshot_times[n - 1])) {
                throw std::invalid_argument("solver: snapshot times must be strictly increasing");
            }
        }
    }
};

struct SolverStats {
    long steps = 0;
    double min_dt = std::numeric_limits<double>::infinity();
    double max_dt = 0.0;
    ClampStats clamping;
};

/// Forward Euler method of lines for dc/dt = div(D(c) grad c).
///
/// dt = cfl_safety * h^2 / (6 max D) is recomputed every step; snapshots are
/// linearly interpolated between the two steps that bracket them.
inline Trajectory solve(const ScalarField3& c0, const DiffusivityModel& model, const SolverConfig& cfg,
                        SolverStats* stats = nullptr) {
    cfg.validate();
    if (!all_finite(c0)) {
        throw std::invalid_argument("solve: initial field has non-finite values");
    }
    const Grid3& g = c0.grid();
    SolverStats local;
    SolverStats& st = stats ? *stats : local;

    Trajectory tr{model, g, {}, {}, TrajectorySource::ReferenceSolver};
    std::size_t next = 0;
    ScalarField3 c = c0;
    double t = 0.0;
    while (next < cfg.snapshot_times.size() && cfg.snapshot_times[next] <= 0.0) {
        tr.times.push_back(cfg.snapshot_times[next]);
        tr.fields.push_back(c);
        ++next;
    }

    while (next < cfg.snapshot_times.size()) {
        const ScalarField3 d = diffusivity_field(c, model, &st.clamping);
        const double dmax = norm_linf(d);
        const double remaining = cfg.snapshot_times.back() - t;
        double dt = dmax > 0.0 ? cfg.cfl_safety * g.h * g.h / (6.0 * dmax) : remaining;
        dt = std::min(dt, remaining > 0.0 ? remaining : dt);

        ScalarField3 rate = cfg.scheme == Scheme::ExplicitFluxForm ? div_D_grad(c, d, cfg.face_average)
                                                                   : laplacian(kirchhoff_field(c, model));
        ScalarField3 c_new = c;
        c_new.axpy(dt, rate);
        ++st.steps;
        st.min_dt = std::min(st.min_dt, dt);
        st.max_dt = std::max(st.max_dt, dt);
        if (!all_finite(c_new)) {
            throw InstabilityError(st.steps, "reference solver: non-finite values at step " + std::to_string(st.steps));
        }
        const double t_new = t + dt;
        while (next < cfg.snapshot_times.size() && cfg.snapshot_times[next] <= t_new) {
            const double ts = cfg.snapshot_times[next];
            const double w = (ts - t) / dt;
            ScalarField3 snap = c;
            if (w == 1.0) {
                snap = c_new;
            } else {
                for (std::size_t p = 0; p < snap.size(); ++p) snap[p] += w * (c_new[p] - c[p]);
            }
            tr.times.push_back(ts);
            tr.fields.push_back(std::move(snap));
            ++next;
        }
        c = std::move(c_new);
        t = t_new;
    }
    return tr;
}

// ---------------------------------------------------------------------------
// analytic solutions

namespace analytic {

/// Spreading Gaussian for constant D; variance sigma0_sq at t = 0.
struct HeatGaussian {
    double d0;
    double mass;
    double sigma0_sq;
    std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// Self-similar compact-support solution of dc/dt = div(D0 c^m grad c) in 3D:
///   c = s^{-alpha} (C - k r^2 s^{-2 beta})_+^{1/m},   s = D0 (t + t0) / (m + 1)
/// with alpha = 3/(3m+2), beta = 1/(3m+2), k = m / (2 (m+1) (3m+2)) and C fixed
/// by the mass.
struct BarenblattPattle {
    double d0;
    double m;
    double mass;
    double t0;
    std::array<double, 3> center{0.0, 0.0, 0.0};

    double alpha() const { return 3.0 / (3.0 * m + 2.0); }
    double beta() const { return 1.0 / (3.0 * m + 2.0); }
    double k() const { return m / (2.0 * (m + 1.0) * (3.0 * m + 2.0)); }

    /// C = [M k^{3/2} / (2 pi B(3/2, 1 + 1/m))]^{1 / (1/m + 3/2)}
    double big_c() const {
        const double b = std::beta(1.5, 1.0 + 1.0 / m);
        return std::pow(mass * std::pow(k(), 1.5) / (2.0 * std::numbers::pi * b), 1.0 / (1.0 / m + 1.5));
    }

    double similarity_time(double t) const { return d0 * (t + t0) / (m + 1.0); }

    /// Front position.
    double radius(double t) const { return std::sqrt(big_c() / k()) * std::pow(similarity_time(t), beta()); }

    double value(double r, double t) const {
        const double s = similarity_time(t);
        const double inner = big_c() - k() * r * r * std::pow(s, -2.0 * beta());
        if (inner <= 0.0) return 0.0;
        return std::pow(s, -alpha()) * std::pow(inner, 1.0 / m);
    }
};

using AnalyticSolution = std::variant<HeatGaussian, BarenblattPattle>;

inline void validate(const AnalyticSolution& sol) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, HeatGaussian>) {
                if (!(s.d0 > 0 && s.mass > 0 && s.sigma0_sq > 0)) {
                    throw std::invalid_argument("HeatGaussian: parameters must be positive");
                }
            } else {
                if (!(s.d0 > 0 && s.m > 0 && s.mass > 0 && s.t0 > 0)) {
                    throw std::invalid_argument("BarenblattPattle: parameters must be positive");
                }
            }
        },
        sol);
}

inline double value_at(const AnalyticSolution& sol, double x, double y, double z, double t) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            const double dx = x - s.center[0], dy = y - s.center[1], dz = z - s.center[2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            if constexpr (std::is_same_v<T, HeatGaussian>) {
                const double tt = t + s.sigma0_sq / (2.0 * s.d0);
                const double four_dt = 4.0 * s.d0 * tt;
                return s.mass * std::pow(std::numbers::pi * four_dt, -1.5) * std::exp(-r2 / four_dt);
            } else {
                return s.value(std::sqrt(r2), t);
            }
        },
        sol);
}

inline ScalarField3 analytic_eval(const AnalyticSolution& sol, const Grid3& g, double t) {
    validate(sol);
    std::visit(
        [t](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, HeatGaussian>) {
                if (t < 0.0) throw std::invalid_argument("HeatGaussian: t must be >= 0");
            } else {
                if (!(t + s.t0 > 0.0)) throw std::invalid_argument("BarenblattPattle: t + t0 must be > 0");
            }
        },
        sol);
    return ScalarField3::sample(g, [&](double x, double y, double z) { return value_at(sol, x, y, z, t); });
}

/// Diffusion law the analytic solution belongs to.
inline DiffusivityModel matching_model(const AnalyticSolution& sol) {
    return std::visit(
        [](const auto& s) -> DiffusivityModel {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, HeatGaussian>) {
                return DiffusivityModel::constant(s.d0);
            } else {
                return DiffusivityModel::power_law(s.d0, s.m);
            }
        },
        sol);
}

inline Trajectory sample_trajectory(const AnalyticSolution& sol, const Grid3& g, const std::vector<double>& times) {
    Trajectory tr{matching_model(sol), g, times, {}, TrajectorySource::Analytic};
    for (double t : times) tr.fields.push_back(analytic_eval(sol, g, t));
    tr.validate();
    return tr;
}

}  // namespace analytic

// ---------------------------------------------------------------------------
// comparison

struct ErrorRow {
    double t = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double rel_l1 = 0.0;    // l1 / ||oracle||_1
    double rel_l2 = 0.0;    // l2 / ||oracle||_2
    double rel_linf = 0.0;  // linf / ||oracle||_inf
    double mass_error = 0.0;  // (M - M_oracle) / |M_oracle|
    double mass_drift = 0.0;  // (M(t) - M(t_0)) / |M(t_0)| of the compared trajectory
};

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

inline std::vector<ErrorRow> compare(const Trajectory& traj, const Trajectory& oracle) {
    traj.validate();
    oracle.validate();
    if (!(traj.grid == oracle.grid)) {
        throw ShapeError("compare: grids differ (" + traj.grid.str() + " vs " + oracle.grid.str() + ")");
    }
    if (traj.times.size() != oracle.times.size()) {
        throw ShapeError("compare: snapshot counts differ");
    }
    std::vector<ErrorRow> rows;
    const double m0 = traj.fields.empty() ? 0.0 : total_mass(traj.fields.front());
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
        const double scale = std::max({1.0, std::abs(traj.times[n]), std::abs(oracle.times[n])});
        if (std::abs(traj.times[n] - oracle.times[n]) > 1e-12 * scale) {
            throw ShapeError("compare: snapshot times differ at index " + std::to_string(n));
        }
        const ScalarField3 diff = traj.fields[n] - oracle.fields[n];
        ErrorRow r;
        r.t = traj.times[n];
        r.l1 = norm_l1(diff);
        r.l2 = norm_l2(diff);
        r.linf = norm_linf(diff);
        r.rel_l1 = safe_ratio(r.l1, norm_l1(oracle.fields[n]));
        r.rel_l2 = safe_ratio(r.l2, norm_l2(oracle.fields[n]));
        r.rel_linf = safe_ratio(r.linf, norm_linf(oracle.fields[n]));
        const double m = total_mass(traj.fields[n]);
        const double mo = total_mass(oracle.fields[n]);
        r.mass_error = safe_ratio(m - mo, std::abs(mo));
        r.mass_drift = safe_ratio(m - m0, std::abs(m0));
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<ErrorRow> compare(const Trajectory& traj, const analytic::AnalyticSolution& sol) {
    return compare(traj, analytic::sample_trajectory(sol, traj.grid, traj.times));
}

}  // namespace nldiff
