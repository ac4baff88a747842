#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nldiff/diffusivity.hpp"
#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

inline constexpr int kDefaultSeriesOrder = 12;
inline constexpr int kMaxSeriesOrder = 30;

/// Taylor coefficients about t = 0 of c(t), F(c(t)) and D(c(t)) on every cell.
///
/// Monomial normalisation: c(t) = sum_n a[n] t^n, F = sum_n f[n] t^n,
/// D = sum_n d[n] t^n. Holds a[0..N+1], f[0..N+1] and d[0..N]; the extra
/// f[N+1] gives the magnitude of the first term left out.
struct TaylorState {
    DiffusivityModel model;
    Grid3 grid;
    int order = 0;
    std::vector<ScalarField3> a;
    std::vector<ScalarField3> f;
    std::vector<ScalarField3> d;
    ClampStats clamping;
};

struct RemainderEstimate {
    ScalarField3 field;
    double linf = 0.0;
};

namespace detail {

/// Characteristic explicit time scale h^2 / (6 max D) used in the overflow test.
inline double series_time_scale(const ScalarField3& d0) {
    const double dmax = norm_linf(d0);
    const double h = d0.grid().h;
    return h * h / (6.0 * (dmax > 0.0 ? dmax : 1.0));
}

inline void check_divergence(const ScalarField3& an, int n, double tau) {
    const double m = norm_linf(an);
    if (!std::isfinite(m) || m * std::pow(tau, n) > 1e100) {
        throw DivergenceError(n, "Taylor series diverged: coefficient a_" + std::to_string(n) +
                                     " overflowed (|a_n| tau^n > 1e100)");
    }
}

}  // namespace detail

/// Propagates the coefficients order by order:
///   a[n+1] = laplacian(f[n]) / (n+1)
///   d[0..n+1] = Taylor composition of D with a[0..n+1]
///   f[n+1] = 1/(n+1) * sum_{k<=n} d[n-k] (k+1) a[k+1]      (F' = D c')
inline TaylorState build_series(const ScalarField3& c0, const DiffusivityModel& model, int order = kDefaultSeriesOrder) {
    if (order < 0 || order > kMaxSeriesOrder) {
        throw std::invalid_argument("series order must be in [0, " + std::to_string(kMaxSeriesOrder) + "], got " +
                                    std::to_string(order));
    }
    if (model.max_order() >= 0 && order > model.max_order()) {
        throw UnsupportedOrderError(std::string(to_string(model.kind())) + " diffusivity supports series order <= " +
                                    std::to_string(model.max_order()) + ", got " + std::to_string(order));
    }
    if (!all_finite(c0)) {
        throw std::invalid_argument("build_series: initial field has non-finite values");
    }
    const Grid3& g = c0.grid();
    const std::size_t cells = g.size();
    const auto N = static_cast<std::size_t>(order);

    TaylorState s{model, g, order, {}, {}, {}, {}};
    s.a.reserve(N + 2);
    s.f.reserve(N + 2);
    s.d.reserve(N + 1);

    s.a.push_back(c0);
    s.f.push_back(kirchhoff_field(c0, model, &s.clamping));
    s.d.push_back(diffusivity_field(c0, model));
    const double tau = detail::series_time_scale(s.d[0]);

    std::vector<double> a_loc(N + 2), d_loc(N + 2);
    for (std::size_t n = 0; n <= N; ++n) {
        ScalarField3 next = laplacian(s.f[n]);
        next *= 1.0 / static_cast<double>(n + 1);
        detail::check_divergence(next, static_cast<int>(n + 1), tau);
        s.a.push_back(std::move(next));

        if (n + 1 <= N) {
            ScalarField3 dn(g);
            for (std::size_t p = 0; p < cells; ++p) {
                for (std::size_t k = 0; k <= n + 1; ++k) a_loc[k] = s.a[k][p];
                a_loc[0] = model.clamp(a_loc[0]);
                model.compose_taylor(std::span<const double>(a_loc.data(), n + 2), std::span<double>(d_loc.data(), n + 2));
                dn[p] = d_loc[n + 1];
            }
            s.d.push_back(std::move(dn));
        }

        ScalarField3 fn(g);
        const double inv = 1.0 / static_cast<double>(n + 1);
        for (std::size_t p = 0; p < cells; ++p) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                acc += s.d[n - k][p] * (static_cast<double>(k + 1) * s.a[k + 1][p]);
            }
            fn[p] = acc * inv;
        }
        s.f.push_back(std::move(fn));
    }
    return s;
}

namespace detail {

inline ScalarField3 horner(const std::vector<ScalarField3>& coeffs, std::size_t last, double t) {
    ScalarField3 r = coeffs[last];
    for (std::size_t n = last; n-- > 0;) {
        const ScalarField3& c = coeffs[n];
        for (std::size_t p = 0; p < r.size(); ++p) r[p] = r[p] * t + c[p];
    }
    return r;
}

}  // namespace detail

/// c(t) = sum_{n=0}^{N+1} a[n] t^n
inline ScalarField3 evaluate(const TaylorState& s, double t) {
    if (t < 0.0) throw std::invalid_argument("evaluate: t must be >= 0");
    return detail::horner(s.a, s.a.size() - 1, t);
}

/// F(c(t)) = sum_{n=0}^{N+1} f[n] t^n
inline ScalarField3 evaluate_F(const TaylorState& s, double t) {
    if (t < 0.0) throw std::invalid_argument("evaluate_F: t must be >= 0");
    return detail::horner(s.f, s.f.size() - 1, t);
}

/// dF/dt from the F-series.
inline ScalarField3 evaluate_dFdt(const TaylorState& s, double t) {
    ScalarField3 r(s.grid);
    for (std::size_t n = s.f.size() - 1; n >= 1; --n) {
        const ScalarField3& c = s.f[n];
        const double w = static_cast<double>(n);
        for (std::size_t p = 0; p < r.size(); ++p) r[p] = r[p] * t + w * c[p];
    }
    return r;
}

/// dc/dt from the c-series.
inline ScalarField3 evaluate_dcdt(const TaylorState& s, double t) {
    ScalarField3 r(s.grid);
    for (std::size_t n = s.a.size() - 1; n >= 1; --n) {
        const ScalarField3& c = s.a[n];
        const double w = static_cast<double>(n);
        for (std::size_t p = 0; p < r.size(); ++p) r[p] = r[p] * t + w * c[p];
    }
    return r;
}

/// Truncation remainder t^{N+1} laplacian(f[N]) / (N+1), i.e. t^{N+1} a[N+1].
inline RemainderEstimate remainder_estimate(const TaylorState& s, double t) {
    const auto N = static_cast<std::size_t>(s.order);
    ScalarField3 r = s.a[N + 1];
    r *= std::pow(t, static_cast<double>(N + 1));
    const double m = norm_linf(r);
    return {std::move(r), m};
}

/// Magnitude of the first omitted term, t^{N+2} laplacian(f[N+1]) / (N+2).
inline RemainderEstimate next_term_estimate(const TaylorState& s, double t) {
    const auto N = static_cast<std::size_t>(s.order);
    ScalarField3 r = laplacian(s.f[N + 1]);
    r *= std::pow(t, static_cast<double>(N + 2)) / static_cast<double>(N + 2);
    const double m = norm_linf(r);
    return {std::move(r), m};
}

/// Heuristic validity horizon: min over the last three orders of
/// ||a_n||_inf / ||a_{n+1}||_inf (ratio test on the monomial coefficients).
/// Returns +infinity for a stationary state.
inline double convergence_radius(const TaylorState& s) {
    if (s.order < 4) {
        throw std::invalid_argument("convergence_radius needs series order >= 4");
    }
    const auto N = static_cast<std::size_t>(s.order);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = N - 2; n <= N; ++n) {
        const double num = norm_linf(s.a[n]);
        const double den = norm_linf(s.a[n + 1]);
        if (den > 0.0) {
            best = std::min(best, num / den);
        }
    }
    return best;
}

/// Samples the series at the requested times.
inline Trajectory to_trajectory(const TaylorState& s, const std::vector<double>& times) {
    Trajectory tr{s.model, s.grid, times, {}, TrajectorySource::TaylorSeries};
    for (double t : times) tr.fields.push_back(evaluate(s, t));
    tr.validate();
    return tr;
}

}  // namespace nldiff
