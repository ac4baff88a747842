#pragma once

// Test-only reference computations, written independently of the library
// code paths they check.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "nldiff/grid.hpp"

namespace oracle {

/// Composite trapezoid with `panels` equal panels.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, long panels) {
    const double h = (b - a) / static_cast<double>(panels);
    double s = 0.5 * (f(a) + f(b));
    for (long i = 1; i < panels; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

/// 7-point Laplacian written out with explicit index arithmetic.
inline nldiff::ScalarField3 naive_laplacian(const nldiff::ScalarField3& f) {
    const auto& g = f.grid();
    nldiff::ScalarField3 out(g);
    auto val = [&](int i, int j, int k) -> double {
        if (g.boundary == nldiff::Boundary::Periodic) {
            i = (i % g.nx + g.nx) % g.nx;
            j = (j % g.ny + g.ny) % g.ny;
            k = (k % g.nz + g.nz) % g.nz;
            return f(i, j, k);
        }
        if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz) return 0.0;
        return f(i, j, k);
    };
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out(i, j, k) = (val(i + 1, j, k) + val(i - 1, j, k) + val(i, j + 1, k) + val(i, j - 1, k) +
                                val(i, j, k + 1) + val(i, j, k - 1) - 6.0 * val(i, j, k)) /
                               (g.h * g.h);
    return out;
}

/// Free-space potential of a radial source k(r): V(r) = (1/r) int_0^r k s^2 ds + int_r^inf k s ds.
inline double radial_potential(const std::function<double(double)>& k, double r, double r_max, long panels) {
    auto inner = [&](double s) { return k(s) * s * s; };
    auto outer = [&](double s) { return k(s) * s; };
    const long n_in = std::max(2L, static_cast<long>(panels * r / r_max));
    const long n_out = std::max(2L, panels - n_in);
    return trapezoid(inner, 0.0, r, n_in) / r + trapezoid(outer, r, r_max, n_out);
}

}  // namespace oracle

namespace oracle {

/// Radially symmetric dc/dt = r^-2 d/dr(r^2 D(c) dc/dr) on [0, r_max] with
/// zero flux at both ends; finite volumes in spherical shells, forward Euler.
/// Returns cell-centre values at t_end.
inline std::vector<double> radial_nonlinear_diffusion(const std::function<double(double)>& c_init,
                                                      const std::function<double(double)>& D, double r_max,
                                                      int cells, double t_end) {
    const double dr = r_max / cells;
    std::vector<double> c(cells), rc(cells), vol(cells), area(cells + 1);
    for (int i = 0; i < cells; ++i) {
        rc[i] = (i + 0.5) * dr;
        c[i] = c_init(rc[i]);
        const double a = i * dr, b = (i + 1) * dr;
        vol[i] = (b * b * b - a * a * a) / 3.0;
    }
    for (int i = 0; i <= cells; ++i) area[i] = (i * dr) * (i * dr);
    double t = 0.0;
    std::vector<double> flux(cells + 1, 0.0);
    while (t < t_end) {
        double dmax = 0.0;
        for (double v : c) dmax = std::max(dmax, D(v));
        double dt = 0.2 * dr * dr / dmax;
        if (t + dt > t_end) dt = t_end - t;
        for (int i = 1; i < cells; ++i) {
            const double df = 0.5 * (D(c[i - 1]) + D(c[i]));
            flux[i] = -area[i] * df * (c[i] - c[i - 1]) / dr;
        }
        for (int i = 0; i < cells; ++i) c[i] -= dt * (flux[i + 1] - flux[i]) / vol[i];
        t += dt;
    }
    return c;
}

}  // namespace oracle
