#pragma once

#include <cmath>
#include <numbers>

#include "nldiff/grid.hpp"
#include "nldiff/reference_solver.hpp"

namespace nldiff::scenario {

/// background + amplitude * exp(-|r - centre|^2 / sigma^2)
inline ScalarField3 gaussian(const Grid3& g, double amplitude, double sigma, double background = 0.0,
                             std::array<double, 3> centre = {0.0, 0.0, 0.0}) {
    return ScalarField3::sample(g, [&](double x, double y, double z) {
        const double dx = x - centre[0], dy = y - centre[1], dz = z - centre[2];
        return background + amplitude * std::exp(-(dx * dx + dy * dy + dz * dz) / (sigma * sigma));
    });
}

/// `inside` within |x - centre| < half_width on every axis, `outside` elsewhere.
inline ScalarField3 step(const Grid3& g, double inside, double outside, double half_width,
                         std::array<double, 3> centre = {0.0, 0.0, 0.0}) {
    return ScalarField3::sample(g, [&](double x, double y, double z) {
        const bool in = std::abs(x - centre[0]) < half_width && std::abs(y - centre[1]) < half_width &&
                        std::abs(z - centre[2]) < half_width;
        return in ? inside : outside;
    });
}

/// background + epsilon * sin(2 pi wavenumber (x - x0) / Lx): a discrete
/// Laplacian eigenfunction on a periodic grid.
inline ScalarField3 eigenmode(const Grid3& g, double background, double epsilon, int wavenumber = 1) {
    const double lx = g.nx * g.h;
    return ScalarField3::sample(g, [&](double x, double, double) {
        return background + epsilon * std::sin(2.0 * std::numbers::pi * wavenumber * (x - g.origin[0]) / lx);
    });
}

/// Eigenvalue of the 7-point Laplacian for eigenmode(): -(2 - 2cos(2 pi k h / L)) / h^2.
inline double eigenmode_eigenvalue(const Grid3& g, int wavenumber = 1) {
    const double lx = g.nx * g.h;
    return -(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * wavenumber * g.h / lx)) / (g.h * g.h);
}

inline ScalarField3 barenblatt(const Grid3& g, const analytic::BarenblattPattle& b) {
    return analytic::analytic_eval(b, g, 0.0);
}

}  // namespace nldiff::scenario
