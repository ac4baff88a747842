#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nldiff/reference_solver.hpp"
#include "nldiff/scenarios.hpp"
#include "oracles.hpp"

using namespace nldiff;

namespace {

Grid3 free_grid(int n) { return Grid3::centered_cube(n, 1.0, Boundary::FreeDecay); }
Grid3 periodic_grid(int n) { return Grid3::centered_cube(n, 1.0, Boundary::Periodic); }

SolverConfig config(double t_end, std::vector<double> snaps, double cfl = 0.5, Scheme s = Scheme::ExplicitFluxForm) {
    SolverConfig c;
    c.cfl_safety = cfl;
    c.t_end = t_end;
    c.snapshot_times = std::move(snaps);
    c.scheme = s;
    return c;
}

}  // namespace

TEST(ReferenceSolver, ConfigValidation) {
    const auto c0 = scenario::gaussian(free_grid(6), 1.0, 0.2);
    const auto m = DiffusivityModel::constant(1.0);
    EXPECT_THROW(solve(c0, m, config(1.0, {0.5}, 0.0)), std::invalid_argument);
    EXPECT_THROW(solve(c0, m, config(1.0, {0.5}, 1.5)), std::invalid_argument);
    EXPECT_THROW(solve(c0, m, config(1.0, {1.5})), std::invalid_argument);
    EXPECT_THROW(solve(c0, m, config(1.0, {0.5, 0.2})), std::invalid_argument);
}

TEST(ReferenceSolver, EigenmodeDecay) {
    const auto g = periodic_grid(16);
    const double eps = 0.2;
    const auto c0 = scenario::eigenmode(g, 1.0, eps);
    const double lam = scenario::eigenmode_eigenvalue(g);
    const double t1 = 1.0 / std::abs(lam);
    const auto tr = solve(c0, DiffusivityModel::constant(1.0), config(t1, {0.0, 0.3 * t1, t1}, 0.1));
    ASSERT_EQ(tr.size(), 3u);
    const auto mode = (c0 - ScalarField3(g, 1.0)) * (1.0 / eps);
    for (std::size_t n = 0; n < tr.size(); ++n) {
        const double amp = eps * std::exp(lam * tr.times[n]);
        const auto exact = ScalarField3(g, 1.0) + amp * mode;
        EXPECT_LE(norm_linf(tr.fields[n] - exact), 1e-4 * norm_linf(exact)) << "t=" << tr.times[n];
    }
}

TEST(ReferenceSolver, PeriodicMassConserved) {
    const auto g = periodic_grid(16);
    const auto c0 = scenario::gaussian(g, 1.0, 0.15, 0.05);
    const std::vector<DiffusivityModel> models{DiffusivityModel::power_law(1.0, 2.0), DiffusivityModel::exponential(0.3, 2.0),
                                               DiffusivityModel::tabulated({{0.0, 0.5}, {0.6, 1.0}, {1.2, 3.0}})};
    for (const auto& m : models) {
        for (auto s : {Scheme::ExplicitFluxForm, Scheme::KirchhoffExplicit}) {
            const auto tr = solve(c0, m, config(2e-3, {0.0, 1e-3, 2e-3}, 0.5, s));
            const double m0 = total_mass(tr.fields.front());
            for (const auto& f : tr.fields) EXPECT_NEAR(total_mass(f), m0, 1e-12 * m0) << m.describe();
            const auto rows = compare(tr, tr);
            EXPECT_EQ(rows.back().l2, 0.0);
            EXPECT_LE(std::abs(rows.back().mass_drift), 1e-12);
        }
    }
}

TEST(ReferenceSolver, StepDataStaysPositiveAndBounded) {
    const auto g = free_grid(16);
    const auto c0 = scenario::step(g, 1.0, 0.0, 0.2);
    SolverStats st;
    const auto tr = solve(c0, DiffusivityModel::power_law(1.0, 2.0), config(5e-3, {1e-3, 5e-3}), &st);
    EXPECT_GT(st.steps, 0);
    for (const auto& f : tr.fields) {
        double lo = 0.0, hi = 0.0;
        for (double v : f.values()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_GE(lo, -1e-12);
        EXPECT_LE(hi, 1.0 + 1e-12);
    }
}

TEST(ReferenceSolver, SnapshotsInterpolateLinearly) {
    // for constant D a single forward-Euler step is linear in dt
    const auto g = periodic_grid(8);
    const auto c0 = scenario::eigenmode(g, 0.0, 1.0);
    const auto m = DiffusivityModel::constant(1.0);
    SolverStats st;
    const double dt = 0.5 * g.h * g.h / 6.0;
    const auto tr = solve(c0, m, config(dt, {0.25 * dt, dt}), &st);
    EXPECT_EQ(st.steps, 1);
    const auto full = c0 + dt * laplacian(c0);
    const auto quarter = c0 + (0.25 * dt) * laplacian(c0);
    EXPECT_LE(norm_linf(tr.fields[0] - quarter), 1e-15);
    EXPECT_LE(norm_linf(tr.fields[1] - full), 1e-15);
}

TEST(ReferenceSolver, InstabilityReportsStep) {
    auto c0 = ScalarField3(free_grid(6), 1.0);
    c0(3, 3, 3) = 1e80;  // face flux overflows
    try {
        solve(c0, DiffusivityModel::power_law(1.0, 3.0), config(1.0, {1.0}));
        FAIL() << "expected InstabilityError";
    } catch (const InstabilityError& e) {
        EXPECT_EQ(e.step(), 1);
    }
}

TEST(ReferenceSolver, SchemesAgreeToSecondOrder) {
    const auto m = DiffusivityModel::power_law(1.0, 2.0);
    auto distance = [&](int n) {
        const auto g = free_grid(n);
        const auto c0 = scenario::gaussian(g, 1.0, 0.15);
        const auto a = solve(c0, m, config(1e-3, {1e-3}, 0.5, Scheme::ExplicitFluxForm));
        const auto b = solve(c0, m, config(1e-3, {1e-3}, 0.5, Scheme::KirchhoffExplicit));
        return norm_l2(a.fields[0] - b.fields[0], interior_box(g));
    };
    const double ratio = distance(16) / distance(32);
    EXPECT_GE(ratio, 3.0);
    EXPECT_LE(ratio, 5.0);
}

TEST(Analytic, HeatGaussianMass) {
    // variance stays <= 0.006, so the tails past the faces are ~1e-10
    const analytic::HeatGaussian hg{0.5, 2.0, 0.004};
    const auto g = free_grid(32);
    for (double t : {0.0, 0.001, 0.002}) {
        EXPECT_NEAR(total_mass(analytic::analytic_eval(hg, g, t)), 2.0, 2e-6 * 2.0);
    }
}

TEST(Analytic, HeatGaussianSolvesDiscreteEquation) {
    const analytic::HeatGaussian hg{1.0, 1.0, 0.01};
    const double t = 0.003, dt = 1e-6;
    auto residual = [&](int n) {
        const auto g = free_grid(n);
        const auto dcdt = (analytic::analytic_eval(hg, g, t + dt) - analytic::analytic_eval(hg, g, t - dt)) * (0.5 / dt);
        const auto r = dcdt - laplacian(analytic::analytic_eval(hg, g, t));
        return norm_linf(r, interior_box(g)) / norm_linf(dcdt, interior_box(g));
    };
    EXPECT_GE(std::log2(residual(16) / residual(32)), 1.8);
}

TEST(Analytic, BarenblattCompactSupportAndMass) {
    const analytic::BarenblattPattle b{1.0, 2.0, 0.05, 0.005};
    for (double t : {0.0, 0.005}) {
        const double R = b.radius(t);
        EXPECT_EQ(b.value(1.0001 * R, t), 0.0);
        EXPECT_EQ(b.value(3.0 * R, t), 0.0);
        EXPECT_GT(b.value(0.999 * R, t), 0.0);
        const double mass = oracle::trapezoid([&](double r) { return 4.0 * std::numbers::pi * r * r * b.value(r, t); },
                                              0.0, R, 400000);
        EXPECT_NEAR(mass, 0.05, 1e-7);
    }
    EXPECT_THROW(analytic::analytic_eval(analytic::BarenblattPattle{1.0, 2.0, 0.05, -1.0}, free_grid(4), 0.0),
                 std::invalid_argument);
}

TEST(Analytic, BarenblattMatchesRadialSolver) {
    const analytic::BarenblattPattle b{1.0, 2.0, 0.05, 0.005};
    const double t = 0.005, r_max = 0.4;
    const int cells = 400;
    const auto c = oracle::radial_nonlinear_diffusion([&](double r) { return b.value(r, 0.0); },
                                                      [](double v) { return v * v; }, r_max, cells, t);
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double r = (i + 0.5) * r_max / cells;
        const double e = b.value(r, t);
        err += r * r * std::abs(c[i] - e);
        ref += r * r * e;
    }
    EXPECT_LE(err / ref, 1e-3);
}

TEST(Analytic, MatchingModel) {
    EXPECT_EQ(analytic::matching_model(analytic::BarenblattPattle{2.0, 1.5, 1.0, 1.0}).kind(), LawKind::PowerLaw);
    EXPECT_EQ(analytic::matching_model(analytic::HeatGaussian{2.0, 1.0, 1.0}).kind(), LawKind::Constant);
}

TEST(Compare, NormsMatchHandSums) {
    const auto g = Grid3::centered_cube(3, 0.6, Boundary::FreeDecay);  // h = 0.2
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField3 a(g), b(g);
    for (std::size_t p = 0; p < a.size(); ++p) {
        a[p] = u(rng);
        b[p] = u(rng);
    }
    const auto m = DiffusivityModel::constant(1.0);
    const Trajectory ta{m, g, {0.0}, {a}, TrajectorySource::ReferenceSolver};
    const Trajectory tb{m, g, {0.0}, {b}, TrajectorySource::Analytic};
    const auto rows = compare(ta, tb);
    double l1 = 0, l2 = 0, li = 0, b1 = 0, mb = 0, ma = 0;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                const double d = a(i, j, k) - b(i, j, k);
                l1 += std::abs(d) * 0.008;
                l2 += d * d * 0.008;
                li = std::max(li, std::abs(d));
                b1 += std::abs(b(i, j, k)) * 0.008;
                ma += a(i, j, k) * 0.008;
                mb += b(i, j, k) * 0.008;
            }
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].l1, l1, 1e-14);
    EXPECT_NEAR(rows[0].l2, std::sqrt(l2), 1e-14);
    EXPECT_NEAR(rows[0].linf, li, 1e-15);
    EXPECT_NEAR(rows[0].rel_l1, l1 / b1, 1e-13);
    EXPECT_NEAR(rows[0].mass_error, (ma - mb) / std::abs(mb), 1e-12);
}

TEST(Compare, MismatchThrows) {
    const auto m = DiffusivityModel::constant(1.0);
    const Trajectory a{m, free_grid(4), {0.0}, {ScalarField3(free_grid(4))}, TrajectorySource::ReferenceSolver};
    const Trajectory b{m, free_grid(5), {0.0}, {ScalarField3(free_grid(5))}, TrajectorySource::ReferenceSolver};
    const Trajectory c{m, free_grid(4), {0.1}, {ScalarField3(free_grid(4))}, TrajectorySource::ReferenceSolver};
    EXPECT_THROW(compare(a, b), ShapeError);
    EXPECT_THROW(compare(a, c), ShapeError);
}
