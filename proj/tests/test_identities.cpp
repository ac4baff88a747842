#include <gtest/gtest.h>

#include <cmath>

#include "nldiff/identities.hpp"
#include "nldiff/reference_solver.hpp"
#include "nldiff/scenarios.hpp"

using namespace nldiff;

namespace {

Grid3 free_grid(int n) { return Grid3::centered_cube(n, 1.0, Boundary::FreeDecay); }

std::vector<DiffusivityModel> all_laws(double c) {
    return {DiffusivityModel::constant(1.5, c), DiffusivityModel::power_law(1.0, 2.0, c),
            DiffusivityModel::exponential(0.7, 1.3, c),
            DiffusivityModel::tabulated({{0.0, 1.0}, {0.5, 1.4}, {1.0, 2.5}}, c)};
}

/// c(t_j) = base + (t_j - t_mid) * rate on three equally spaced times.
Trajectory linear_in_time(const DiffusivityModel& m, const ScalarField3& base, const ScalarField3& rate, double dt) {
    Trajectory tr{m, base.grid(), {1.0 - dt, 1.0, 1.0 + dt}, {}, TrajectorySource::Analytic};
    for (double s : {-dt, 0.0, dt}) tr.fields.push_back(base + s * rate);
    return tr;
}

Trajectory reference_run(const DiffusivityModel& m, int n, int count, double step, double sigma = 0.125) {
    const auto c0 = scenario::gaussian(free_grid(n), 1.0, sigma);
    SolverConfig cfg;
    for (int k = 0; k < count; ++k) cfg.snapshot_times.push_back(k * step);
    cfg.t_end = cfg.snapshot_times.back();
    return solve(c0, m, cfg);
}

}  // namespace

TEST(Identities, EquationNames) {
    for (auto e : {EquationId::E2200, EquationId::E3090, EquationId::E4710, EquationId::E4720, EquationId::E5020,
                   EquationId::E5100, EquationId::E5120, EquationId::E5160, EquationId::E5200, EquationId::E5680,
                   EquationId::E6690}) {
        EXPECT_EQ(equation_from_string(to_string(e)), e);
    }
    EXPECT_FALSE(equation_from_string("E1234").has_value());
}

TEST(Identities, OrderEstimate) {
    EXPECT_DOUBLE_EQ(order_estimate(4.0, 1.0), 2.0);
    EXPECT_EQ(order_estimate(1.0, 0.0), std::numeric_limits<double>::infinity());
}

TEST(Identities, TimeDerivativeWeights) {
    const std::vector<double> t{0.0, 0.1, 0.3};
    // exact on quadratics, at every node
    auto q = [](double s) { return 2.0 - 3.0 * s + 5.0 * s * s; };
    for (std::size_t at = 0; at < 3; ++at) {
        const auto w = lagrange_derivative_weights(t, 0, at);
        const double d = w[0] * q(t[0]) + w[1] * q(t[1]) + w[2] * q(t[2]);
        EXPECT_NEAR(d, -3.0 + 10.0 * t[at], 1e-12);
    }
    const auto g = free_grid(3);
    std::vector<ScalarField3> two{ScalarField3(g), ScalarField3(g)};
    EXPECT_THROW(time_derivative(std::vector<double>{0.0, 1.0}, 0, [&](std::size_t i) -> const ScalarField3& { return two[i]; }),
                 InsufficientDataError);
}

TEST(Identities, StationaryStateGivesExactZeros) {
    const double c = 0.6;
    for (const auto& m : all_laws(c)) {
        const auto g = free_grid(8);
        Trajectory tr{m, g, {0.0, 0.1, 0.2, 0.3}, {}, TrajectorySource::Analytic};
        for (int k = 0; k < 4; ++k) tr.fields.emplace_back(g, c);
        IdentityChecker chk(tr);
        EXPECT_EQ(norm_linf(compute_phi(tr.fields[0], m).phi), 0.0);
        for (auto e : {EquationId::E2200, EquationId::E3090, EquationId::E4710, EquationId::E4720, EquationId::E5020,
                       EquationId::E5100, EquationId::E5120, EquationId::E5160, EquationId::E5200}) {
            for (std::size_t ti : {1u, 2u, 3u}) {
                const auto r = chk.residual(e, ti);
                EXPECT_EQ(r.norm_linf, 0.0) << to_string(e) << " " << m.describe();
                EXPECT_TRUE(r.warnings.empty()) << to_string(e);
            }
        }
        if (m.kind() == LawKind::Constant) {
            EXPECT_THROW(chk.residual_E5680(1), NonlinearityRequiredError);
            EXPECT_THROW(chk.residual_E6690(1, 2), NonlinearityRequiredError);
        } else {
            EXPECT_EQ(chk.residual_E5680(1).norm_linf, 0.0) << m.describe();
            EXPECT_EQ(chk.residual_E6690(2, 1).norm_linf, 0.0) << m.describe();
        }
    }
}

TEST(Identities, E2200NeedsTwoSnapshots) {
    const auto g = free_grid(4);
    Trajectory tr{DiffusivityModel::constant(1.0), g, {0.0, 1.0, 2.0}, {}, TrajectorySource::Analytic};
    for (int k = 0; k < 3; ++k) tr.fields.emplace_back(g, 0.0);
    EXPECT_THROW(residual_E2200(tr, 0), InsufficientDataError);
    EXPECT_THROW(residual_E2200(tr, 3), std::out_of_range);
}

TEST(Identities, DerivativeLawNeedsNonzeroHigherDerivative) {
    const auto g = free_grid(4);
    Trajectory tr{DiffusivityModel::power_law(1.0, 1.0), g, {0.0, 1.0, 2.0}, {}, TrajectorySource::Analytic};
    for (int k = 0; k < 3; ++k) tr.fields.emplace_back(g, 0.5);
    EXPECT_NO_THROW(residual_E6690(tr, 1, 0));
    EXPECT_THROW(residual_E6690(tr, 1, 1), NonlinearityRequiredError);  // D'' = 0
}

TEST(Identities, E2200TrapezoidIsSecondOrderInTime) {
    // c(t) = e^{-t} u with D = 1: the exact time integral of F is known, so
    // subtracting the exact-integral residual leaves only the trapezoid error
    const auto g = free_grid(12);
    const auto m = DiffusivityModel::constant(1.0);
    const auto u = scenario::gaussian(g, 1.0, 0.15);
    const double T = 0.5;
    auto quadrature_error = [&](int steps) {
        Trajectory tr{m, g, {}, {}, TrajectorySource::Analytic};
        for (int k = 0; k <= steps; ++k) {
            const double t = T * k / steps;
            tr.times.push_back(t);
            tr.fields.push_back(std::exp(-t) * u);
        }
        const auto r = residual_E2200(tr, static_cast<std::size_t>(steps));
        const double e = std::exp(-T) - 1.0;
        const auto exact = e * u + e * laplacian(u);
        return norm_l2(r.field - exact, interior_box(g));
    };
    EXPECT_NEAR(quadrature_error(8) / quadrature_error(16), 4.0, 0.2);
}

TEST(Identities, E3090ManufacturedRoundTrip) {
    const auto g = free_grid(48);
    const double d0 = 2.0;
    const auto m = DiffusivityModel::constant(d0);
    const auto F = scenario::gaussian(g, 1.0, 0.15);
    const auto tr = linear_in_time(m, F * (1.0 / d0), laplacian(F), 1e-3);
    const auto r = residual_E3090(tr, 1);
    EXPECT_LE(r.normalized_l2(), 0.01);
    const auto r5100 = residual_E5100(tr, 1);
    EXPECT_LE(norm_linf(r5100.field - r.field), 1e-12 * r.normalization);
}

TEST(Identities, E3090WarnsWhenFDoesNotDecay) {
    const auto g = free_grid(16);
    const auto m = DiffusivityModel::constant(1.0, 0.0);
    const auto c = scenario::gaussian(g, 1.0, 0.08, 0.5);  // far field 0.5 but c_ref 0
    const auto tr = linear_in_time(m, c, ScalarField3(g), 1e-3);
    EXPECT_FALSE(residual_E3090(tr, 1).warnings.empty());
    const auto ok = linear_in_time(m.with_c_ref(0.5), c, ScalarField3(g), 1e-3);
    EXPECT_TRUE(residual_E3090(ok, 1).warnings.empty());
}

TEST(Identities, E4710And4720Manufactured) {
    const auto g = free_grid(48);
    const double far = 0.2;
    const auto m = DiffusivityModel::exponential(1.0, 1.0, far);
    const auto c = scenario::gaussian(g, 0.5, 0.15, far);
    const auto dev = c.map([&](double v) { return v - far; });
    const auto gc = gradient(dev);
    const auto D = diffusivity_field(c, m);
    const auto Dp = c.map([&](double v) { return m.derivatives(v, 1)[1]; });
    const auto rate = D * laplacian(dev) + Dp * dot(gc, gc);
    const auto rep = residual_E4720(linear_in_time(m, c, rate, 1e-4), 1);
    EXPECT_LE(rep.differential.normalized_linf(), 1e-11);
    EXPECT_LE(rep.integral.normalized_l2(), 0.01);
}

TEST(Identities, E4720ConstantLawReducesToE3090) {
    const auto g = free_grid(24);
    const double d0 = 3.0;
    const auto m = DiffusivityModel::constant(d0);
    const auto c = scenario::gaussian(g, 1.0, 0.15);
    const auto tr = linear_in_time(m, c, d0 * laplacian(c), 1e-4);
    const auto a = residual_E4720(tr, 1).integral;
    const auto b = residual_E3090(tr, 1);
    // F = d0 c, so the E3090 residual is d0 times the E4720 one
    EXPECT_LE(norm_linf(b.field - d0 * a.field), 1e-12 * b.normalization);
}

TEST(Identities, SeriesFormsVanishAtOrigin) {
    const auto c0 = scenario::gaussian(free_grid(12), 1.0, 0.15, 0.1);
    for (const auto& m : {DiffusivityModel::power_law(1.0, 1.5), DiffusivityModel::exponential(1.0, 0.5)}) {
        const auto s = build_series(c0, m, 6);
        EXPECT_LE(residual_E5020(s, 0.0).normalized_linf(), 1e-13) << m.describe();
        EXPECT_LE(residual_E5120(s, 0.0).normalized_linf(), 1e-13) << m.describe();
    }
}

TEST(Identities, E5200ConstantLawClosedForm) {
    // D = 1, c(t) = 1 + u + t L u + t^2/2 L^2 u with L the discrete Laplacian.
    // phi = L(c - 1) is quadratic in t, so the 3-point derivative is exact and
    // the residual is the dropped cubic term: -(t^2/2) L^4 u.
    const auto g = free_grid(16);
    const auto m = DiffusivityModel::constant(1.0, 1.0);
    const auto u = scenario::gaussian(g, 0.1, 0.15);
    const auto l1 = laplacian(u);
    const auto l2 = laplacian(l1);
    Trajectory tr{m, g, {}, {}, TrajectorySource::Analytic};
    for (double t : {0.0, 1e-4, 2e-4}) {
        tr.times.push_back(t);
        tr.fields.push_back(ScalarField3(g, 1.0) + u + t * l1 + (0.5 * t * t) * l2);
    }
    const auto r = residual_E5200(tr);
    const auto expect = (-0.5 * 1e-8) * laplacian(laplacian(l2));
    EXPECT_LE(norm_linf(r.field - expect, interior_box(g)), 1e-9 * r.normalization);
}

TEST(Identities, E6690CollapsesOntoE5680ForExponential) {
    const double beta = 0.8;
    const auto m = DiffusivityModel::exponential(1.0, beta);
    const auto tr = reference_run(m, 16, 3, 2e-4);
    IdentityChecker chk(tr);
    const auto base = chk.residual_E5680(1);
    for (int n : {0, 1, 3}) {
        const auto r = chk.residual_E6690(1, n);
        const double s = std::pow(beta, n);
        EXPECT_LE(norm_linf(r.field - s * base.field), 1e-12 * s * base.normalization) << "N=" << n;
        EXPECT_NEAR(r.normalized_l2(), base.normalized_l2(), 1e-12 * base.normalized_l2());
    }
}

TEST(Identities, E5100MatchesE3090OnReferenceRun) {
    const auto tr = reference_run(DiffusivityModel::power_law(1.0, 1.0), 16, 5, 2e-4);
    IdentityChecker chk(tr);
    for (std::size_t ti : {1u, 2u, 4u}) {
        const auto a = chk.residual_E3090(ti);
        const auto b = chk.residual_E5100(ti);
        EXPECT_LE(norm_linf(a.field - b.field), 1e-12 * a.normalization);
    }
}

TEST(Identities, E2200BaselineOnPowerLawReference) {
    // snapshots every explicit step at the stability limit up to t ~ 0.004; the
    // residual is the O(h^2) flux-form vs Kirchhoff-Laplacian gap (1.51e-2 measured)
    const auto g = free_grid(32);
    const auto m = DiffusivityModel::power_law(1.0, 2.0);
    const double dt = 0.5 * g.h * g.h / 6.0;
    const auto tr = reference_run(m, 32, 50, dt, 0.2);
    const auto r = residual_E2200(tr, 49);
    EXPECT_LE(r.normalized_l2(), 2e-2);
    EXPECT_NEAR(r.normalized_l2(), 1.511e-2, 0.05 * 1.511e-2);
}

TEST(Identities, E5680SecondOrderOnPowerLawReference) {
    const auto m = DiffusivityModel::power_law(1.0, 2.0);
    auto residual = [&](int n) {
        const double ds = 2e-4 * 32.0 / n;
        const int steps = static_cast<int>(std::lround(0.002 / ds));
        const auto tr = reference_run(m, n, steps + 2, ds);
        return residual_E5680(tr, static_cast<std::size_t>(steps)).normalized_l2();
    };
    EXPECT_GE(order_estimate(residual(32), residual(64)), 1.8);
}
