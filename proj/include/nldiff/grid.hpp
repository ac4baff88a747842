#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nldiff/diffusivity.hpp"
#include "nldiff/errors.hpp"

namespace nldiff {

enum class Boundary { Periodic, FreeDecay };

inline const char* to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "free_decay"; }

/// Uniform Cartesian grid; point (i,j,k) sits at origin + h*(i,j,k).
struct Grid3 {
    int nx = 3;
    int ny = 3;
    int nz = 3;
    double h = 1.0;
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    Boundary boundary = Boundary::FreeDecay;

    /// Cube of n^3 points with edge length `length` (n*h), centred on 0.
    static Grid3 centered_cube(int n, double length, Boundary b) {
        Grid3 g;
        g.nx = g.ny = g.nz = n;
        g.h = length / n;
        const double o = b == Boundary::Periodic ? -0.5 * length : -0.5 * (n - 1) * g.h;
        g.origin = {o, o, o};
        g.boundary = b;
        g.validate();
        return g;
    }

    void validate() const {
        if (nx < 3 || ny < 3 || nz < 3) {
            throw std::invalid_argument("Grid3: nx, ny, nz must be >= 3");
        }
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw std::invalid_argument("Grid3: spacing h must be positive");
        }
    }

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
    }
    double x(int i) const { return origin[0] + h * i; }
    double y(int j) const { return origin[1] + h * j; }
    double z(int k) const { return origin[2] + h * k; }
    double cell_volume() const { return h * h * h; }
    std::array<double, 3> extent() const { return {nx * h, ny * h, nz * h}; }

    bool operator==(const Grid3&) const = default;

    std::string str() const {
        std::ostringstream os;
        os.precision(17);
        os << nx << "x" << ny << "x" << nz << " h=" << h << " " << to_string(boundary);
        return os.str();
    }
};

/// Index box [i0,i1) x [j0,j1) x [k0,k1).
struct Box {
    int i0, i1, j0, j1, k0, k1;
};

inline Box full_box(const Grid3& g) { return {0, g.nx, 0, g.ny, 0, g.nz}; }

/// Inner 60% of each axis for FreeDecay grids (whole grid when periodic).
inline Box interior_box(const Grid3& g) {
    if (g.boundary == Boundary::Periodic) {
        return full_box(g);
    }
    auto cut = [](int n) { return static_cast<int>(std::floor(0.2 * n)); };
    return {cut(g.nx), g.nx - cut(g.nx), cut(g.ny), g.ny - cut(g.ny), cut(g.nz), g.nz - cut(g.nz)};
}

class ScalarField3 {
public:
    ScalarField3() = default;
    explicit ScalarField3(const Grid3& g, double value = 0.0) : grid_(g), values_(g.size(), value) { g.validate(); }

    template <typename F>
    static ScalarField3 sample(const Grid3& g, F&& fn) {
        ScalarField3 f(g);
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) f(i, j, k) = fn(g.x(i), g.y(j), g.z(k));
        return f;
    }

    const Grid3& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double& operator()(int i, int j, int k) { return values_[grid_.index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }

    template <typename F>
    ScalarField3 map(F&& fn) const {
        ScalarField3 out(grid_);
        for (std::size_t n = 0; n < values_.size(); ++n) out.values_[n] = fn(values_[n]);
        return out;
    }

    ScalarField3& operator+=(const ScalarField3& o) { return zip_assign(o, std::plus<>{}); }
    ScalarField3& operator-=(const ScalarField3& o) { return zip_assign(o, std::minus<>{}); }
    ScalarField3& operator*=(const ScalarField3& o) { return zip_assign(o, std::multiplies<>{}); }
    ScalarField3& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

    friend ScalarField3 operator+(ScalarField3 a, const ScalarField3& b) { return a += b; }
    friend ScalarField3 operator-(ScalarField3 a, const ScalarField3& b) { return a -= b; }
    friend ScalarField3 operator*(ScalarField3 a, const ScalarField3& b) { return a *= b; }
    friend ScalarField3 operator*(double s, ScalarField3 a) { return a *= s; }
    friend ScalarField3 operator*(ScalarField3 a, double s) { return a *= s; }

    /// this += s * o
    ScalarField3& axpy(double s, const ScalarField3& o) {
        check_same(o);
        for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += s * o.values_[n];
        return *this;
    }

    void check_same(const ScalarField3& o) const {
        if (!(grid_ == o.grid_)) {
            throw ShapeError("field grids differ: " + grid_.str() + " vs " + o.grid_.str());
        }
    }

private:
    template <typename Op>
    ScalarField3& zip_assign(const ScalarField3& o, Op op) {
        check_same(o);
        for (std::size_t n = 0; n < values_.size(); ++n) values_[n] = op(values_[n], o.values_[n]);
        return *this;
    }

    Grid3 grid_;
    std::vector<double> values_;
};

struct VectorField3 {
    ScalarField3 x, y, z;

    explicit VectorField3(const Grid3& g) : x(g), y(g), z(g) {}
    const Grid3& grid() const { return x.grid(); }
};

// ---------------------------------------------------------------------------
// norms

inline double norm_linf(const ScalarField3& f, const Box& b) {
    double m = 0.0;
    for (int k = b.k0; k < b.k1; ++k)
        for (int j = b.j0; j < b.j1; ++j)
            for (int i = b.i0; i < b.i1; ++i) m = std::max(m, std::abs(f(i, j, k)));
    return m;
}
inline double norm_linf(const ScalarField3& f) { return norm_linf(f, full_box(f.grid())); }

/// Continuum-scaled L2: sqrt(h^3 * sum v^2) over the box.
inline double norm_l2(const ScalarField3& f, const Box& b) {
    double s = 0.0;
    for (int k = b.k0; k < b.k1; ++k)
        for (int j = b.j0; j < b.j1; ++j)
            for (int i = b.i0; i < b.i1; ++i) s += f(i, j, k) * f(i, j, k);
    return std::sqrt(s * f.grid().cell_volume());
}
inline double norm_l2(const ScalarField3& f) { return norm_l2(f, full_box(f.grid())); }

/// h^3 * sum |v|
inline double norm_l1(const ScalarField3& f, const Box& b) {
    double s = 0.0;
    for (int k = b.k0; k < b.k1; ++k)
        for (int j = b.j0; j < b.j1; ++j)
            for (int i = b.i0; i < b.i1; ++i) s += std::abs(f(i, j, k));
    return s * f.grid().cell_volume();
}
inline double norm_l1(const ScalarField3& f) { return norm_l1(f, full_box(f.grid())); }

inline double sum(const ScalarField3& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s;
}

/// h^3 * sum v
inline double total_mass(const ScalarField3& f) { return sum(f) * f.grid().cell_volume(); }

inline bool all_finite(const ScalarField3& f) {
    return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// boundary-aware neighbour access

namespace detail {

inline int wrap(int i, int n) { return i < 0 ? i + n : (i >= n ? i - n : i); }

/// Value at (i,j,k) where at most one index may be one step outside the grid.
inline double neighbour(const ScalarField3& f, int i, int j, int k) {
    const Grid3& g = f.grid();
    if (g.boundary == Boundary::Periodic) {
        return f(wrap(i, g.nx), wrap(j, g.ny), wrap(k, g.nz));
    }
    if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz) {
        return 0.0;
    }
    return f(i, j, k);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// operators

/// 7-point second-order Laplacian.
inline ScalarField3 laplacian(const ScalarField3& f) {
    const Grid3& g = f.grid();
    ScalarField3 out(g);
    const double inv_h2 = 1.0 / (g.h * g.h);
#pragma omp parallel for
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                using detail::neighbour;
                const double c = f(i, j, k);
                // pair opposite neighbours before summing so constant fields give exact zeros
                const double sx = (neighbour(f, i + 1, j, k) - c) + (neighbour(f, i - 1, j, k) - c);
                const double sy = (neighbour(f, i, j + 1, k) - c) + (neighbour(f, i, j - 1, k) - c);
                const double sz = (neighbour(f, i, j, k + 1) - c) + (neighbour(f, i, j, k - 1) - c);
                out(i, j, k) = (sx + sy + sz) * inv_h2;
            }
    return out;
}

/// Central-difference gradient.
inline VectorField3 gradient(const ScalarField3& f) {
    const Grid3& g = f.grid();
    VectorField3 out(g);
    const double inv_2h = 0.5 / g.h;
#pragma omp parallel for
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                using detail::neighbour;
                out.x(i, j, k) = (neighbour(f, i + 1, j, k) - neighbour(f, i - 1, j, k)) * inv_2h;
                out.y(i, j, k) = (neighbour(f, i, j + 1, k) - neighbour(f, i, j - 1, k)) * inv_2h;
                out.z(i, j, k) = (neighbour(f, i, j, k + 1) - neighbour(f, i, j, k - 1)) * inv_2h;
            }
    return out;
}

/// Central-difference divergence.
inline ScalarField3 divergence(const VectorField3& v) {
    const Grid3& g = v.grid();
    ScalarField3 out(g);
    const double inv_2h = 0.5 / g.h;
#pragma omp parallel for
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                using detail::neighbour;
                out(i, j, k) = ((neighbour(v.x, i + 1, j, k) - neighbour(v.x, i - 1, j, k)) +
                                (neighbour(v.y, i, j + 1, k) - neighbour(v.y, i, j - 1, k)) +
                                (neighbour(v.z, i, j, k + 1) - neighbour(v.z, i, j, k - 1))) *
                               inv_2h;
            }
    return out;
}

inline ScalarField3 dot(const VectorField3& a, const VectorField3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Counts of cells lifted to the law's floor while evaluating it on a field.
struct ClampStats {
    std::size_t clamped = 0;
    double lowest = std::numeric_limits<double>::infinity();

    void merge(const ClampStats& o) {
        clamped += o.clamped;
        lowest = std::min(lowest, o.lowest);
    }
};

/// D(c) per cell, clamping at the model floor first.
inline ScalarField3 diffusivity_field(const ScalarField3& c, const DiffusivityModel& model,
                                      ClampStats* stats = nullptr) {
    ScalarField3 out(c.grid());
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (stats && model.needs_clamp(c[n])) {
            ++stats->clamped;
            stats->lowest = std::min(stats->lowest, c[n]);
        }
        out[n] = model.diffusivity(model.clamp(c[n]));
    }
    return out;
}

/// F(c) per cell, clamping at the model floor first.
inline ScalarField3 kirchhoff_field(const ScalarField3& c, const DiffusivityModel& model,
                                    ClampStats* stats = nullptr) {
    ScalarField3 out(c.grid());
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (stats && model.needs_clamp(c[n])) {
            ++stats->clamped;
            stats->lowest = std::min(stats->lowest, c[n]);
        }
        out[n] = model.kirchhoff(model.clamp(c[n]));
    }
    return out;
}

/// c = F^{-1}(f) per cell.
inline ScalarField3 inverse_kirchhoff_field(const ScalarField3& f, const DiffusivityModel& model) {
    return f.map([&](double v) { return model.inverse_kirchhoff(v); });
}

enum class FaceAverage { Arithmetic, Harmonic };

/// Conservative flux form of div(D(c) grad c) with given cell diffusivities.
///
/// Each face flux is evaluated once per pair, with the lower-index cell first,
/// so that periodic sums telescope. Under FreeDecay the ghost value of c is
/// zero and the boundary face takes the interior cell's diffusivity.
inline ScalarField3 div_D_grad(const ScalarField3& c, const ScalarField3& d, FaceAverage avg = FaceAverage::Arithmetic) {
    c.check_same(d);
    const Grid3& g = c.grid();
    ScalarField3 out(g);
    const double inv_h2 = 1.0 / (g.h * g.h);
    const bool periodic = g.boundary == Boundary::Periodic;
    auto face = [avg](double da, double db) {
        if (avg == FaceAverage::Arithmetic) return 0.5 * (da + db);
        return (da + db) > 0.0 ? 2.0 * da * db / (da + db) : 0.0;
    };
    // flux from cell a (lower index) to cell b
    auto flux = [&](double ca, double cb, double da, double db) { return face(da, db) * (cb - ca); };

#pragma omp parallel for
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double cc = c(i, j, k);
                const double dc = d(i, j, k);
                double acc = 0.0;
                const int idx[3] = {i, j, k};
                const int n[3] = {g.nx, g.ny, g.nz};
                for (int axis = 0; axis < 3; ++axis) {
                    int lo[3] = {i, j, k};
                    int hi[3] = {i, j, k};
                    lo[axis] -= 1;
                    hi[axis] += 1;
                    // east/up face: this cell is the lower one
                    if (hi[axis] < n[axis] || periodic) {
                        const int hw[3] = {detail::wrap(hi[0], g.nx), detail::wrap(hi[1], g.ny), detail::wrap(hi[2], g.nz)};
                        acc += flux(cc, c(hw[0], hw[1], hw[2]), dc, d(hw[0], hw[1], hw[2]));
                    } else {
                        acc += flux(cc, 0.0, dc, dc);
                    }
                    // west/down face: neighbour is the lower one
                    if (idx[axis] - 1 >= 0 || periodic) {
                        const int lw[3] = {detail::wrap(lo[0], g.nx), detail::wrap(lo[1], g.ny), detail::wrap(lo[2], g.nz)};
                        acc -= flux(c(lw[0], lw[1], lw[2]), cc, d(lw[0], lw[1], lw[2]), dc);
                    } else {
                        acc -= flux(0.0, cc, dc, dc);
                    }
                }
                out(i, j, k) = acc * inv_h2;
            }
    return out;
}

/// div(D(c) grad c) for a diffusion law.
inline ScalarField3 div_D_grad(const ScalarField3& c, const DiffusivityModel& model,
                               FaceAverage avg = FaceAverage::Arithmetic, ClampStats* stats = nullptr) {
    return div_D_grad(c, diffusivity_field(c, model, stats), avg);
}

}  // namespace nldiff
