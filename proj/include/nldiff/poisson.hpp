#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/quadrature.hpp"

namespace nldiff {

enum class PoissonMethod { DirectSum, FftConvolution };

inline const char* to_string(PoissonMethod m) { return m == PoissonMethod::DirectSum ? "direct" : "fft"; }

/// Free-space solution of laplacian(V) = -k.
struct PoissonSolution {
    ScalarField3 V;
    PoissonMethod method = PoissonMethod::FftConvolution;
    double residual_linf = 0.0;  // ||laplacian(V) + k||_inf over the interior box
    double face_ratio = 0.0;     // max |k| on the box faces / max |k|
    std::vector<std::string> warnings;
};

inline constexpr double kFaceDecayThreshold = 1e-6;

/// Integral of 1/|r| over the unit cube centred on the origin.
///
/// Split into six pyramids with apex at the centre; for the face x = a the
/// pyramid contributes (a/2) * int_face dA / |r|, and the inner face integral
/// is closed form (asinh). The remaining 1D integral is smooth.
inline double unit_cube_inverse_distance_integral() {
    static const double value = [] {
        constexpr double a = 0.5;
        auto row = [](double y) {
            const double s = std::sqrt(a * a + y * y);
            return 2.0 * std::asinh(a / s) / 1.0;
        };
        const double face = quad::adaptive_simpson(row, -a, a, 1e-15);
        return 6.0 * 0.5 * a * face;
    }();
    return value;
}

/// S_cell = integral over one cell of 1 / (4 pi |r|); scales as h^2.
inline double self_cell_weight(double h) {
    return h * h * unit_cube_inverse_distance_integral() / (4.0 * std::numbers::pi);
}

namespace detail {

inline void require_free_decay(const Grid3& g, const char* who) {
    if (g.boundary != Boundary::FreeDecay) {
        throw UnsupportedBoundaryError(std::string(who) + ": free-space kernel needs a FreeDecay grid, got " +
                                       to_string(g.boundary));
    }
}

inline double face_ratio(const ScalarField3& k) {
    const Grid3& g = k.grid();
    const double kmax = norm_linf(k);
    if (kmax == 0.0) return 0.0;
    double fmax = 0.0;
    for (int kk = 0; kk < g.nz; ++kk)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const bool face = i == 0 || j == 0 || kk == 0 || i == g.nx - 1 || j == g.ny - 1 || kk == g.nz - 1;
                if (face) fmax = std::max(fmax, std::abs(k(i, j, kk)));
            }
    return fmax / kmax;
}

inline void finish(PoissonSolution& sol, const ScalarField3& k) {
    ScalarField3 r = laplacian(sol.V);
    r += k;
    sol.residual_linf = norm_linf(r, interior_box(k.grid()));
    sol.face_ratio = face_ratio(k);
    if (sol.face_ratio > kFaceDecayThreshold) {
        sol.warnings.push_back("source does not decay at the box faces (max face/max ratio " +
                               std::to_string(sol.face_ratio) + "); free-space result is approximate");
    }
}

/// Discrete kernel weight h^3 G(r) for integer offsets.
inline double kernel_weight(double h, int di, int dj, int dk, double self) {
    if (di == 0 && dj == 0 && dk == 0) return self;
    const double r = std::sqrt(static_cast<double>(di) * di + static_cast<double>(dj) * dj + static_cast<double>(dk) * dk);
    return h * h / (4.0 * std::numbers::pi * r);
}

}  // namespace detail

/// V_i = sum_j k_j h^3 / (4 pi |r_i - r_j|), self term k_i S_cell. O(N^2).
inline PoissonSolution greens_direct(const ScalarField3& k) {
    const Grid3& g = k.grid();
    detail::require_free_decay(g, "greens_direct");
    const double self = self_cell_weight(g.h);
    // kernel over absolute offsets
    std::vector<double> w(g.size());
    for (int dk = 0; dk < g.nz; ++dk)
        for (int dj = 0; dj < g.ny; ++dj)
            for (int di = 0; di < g.nx; ++di) w[g.index(di, dj, dk)] = detail::kernel_weight(g.h, di, dj, dk, self);

    PoissonSolution sol{ScalarField3(g), PoissonMethod::DirectSum, 0.0, 0.0, {}};
#pragma omp parallel for
    for (int kk = 0; kk < g.nz; ++kk)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double acc = 0.0;
                for (int sk = 0; sk < g.nz; ++sk)
                    for (int sj = 0; sj < g.ny; ++sj) {
                        const std::size_t row = g.index(0, std::abs(j - sj), std::abs(kk - sk));
                        for (int si = 0; si < g.nx; ++si) {
                            acc += k(si, sj, sk) * w[row + static_cast<std::size_t>(std::abs(i - si))];
                        }
                    }
                sol.V(i, j, kk) = acc;
            }
    detail::finish(sol, k);
    return sol;
}

/// Reusable aperiodic convolution with the free-space kernel on one grid.
///
/// The source is zero-padded to (2nx, 2ny, 2nz) so the circular transform
/// product equals the linear convolution restricted to the box.
class GreensConvolver {
public:
    explicit GreensConvolver(const Grid3& g) : grid_(g) {
        detail::require_free_decay(g, "GreensConvolver");
        n0_ = 2 * g.nz;
        n1_ = 2 * g.ny;
        n2_ = 2 * g.nx;
        real_size_ = static_cast<std::size_t>(n0_) * n1_ * n2_;
        complex_size_ = static_cast<std::size_t>(n0_) * n1_ * (n2_ / 2 + 1);
        real_.reset(fftw_alloc_real(real_size_));
        spec_.reset(fftw_alloc_complex(complex_size_));
        kernel_.resize(complex_size_);
        forward_ = fftw_plan_dft_r2c_3d(n0_, n1_, n2_, real_.get(), spec_.get(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_3d(n0_, n1_, n2_, spec_.get(), real_.get(), FFTW_ESTIMATE);

        const double self = self_cell_weight(g.h);
        auto fold = [](int p, int n) { return p <= n / 2 ? p : n - p; };
        for (int a = 0; a < n0_; ++a)
            for (int b = 0; b < n1_; ++b)
                for (int c = 0; c < n2_; ++c) {
                    real_[pad_index(a, b, c)] = detail::kernel_weight(g.h, fold(c, n2_), fold(b, n1_), fold(a, n0_), self);
                }
        fftw_execute(forward_);
        const double norm = 1.0 / static_cast<double>(real_size_);
        for (std::size_t n = 0; n < complex_size_; ++n) {
            kernel_[n] = std::complex<double>(spec_[n][0], spec_[n][1]) * norm;
        }
    }

    ~GreensConvolver() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    GreensConvolver(const GreensConvolver&) = delete;
    GreensConvolver& operator=(const GreensConvolver&) = delete;

    const Grid3& grid() const { return grid_; }

    /// (1/4pi) int k(r') / |r - r'| dr' sampled on the grid.
    ScalarField3 apply(const ScalarField3& k) {
        if (!(k.grid() == grid_)) {
            throw ShapeError("GreensConvolver: field grid " + k.grid().str() + " differs from " + grid_.str());
        }
        std::fill(real_.get(), real_.get() + real_size_, 0.0);
        for (int kk = 0; kk < grid_.nz; ++kk)
            for (int j = 0; j < grid_.ny; ++j)
                for (int i = 0; i < grid_.nx; ++i) real_[pad_index(kk, j, i)] = k(i, j, kk);
        fftw_execute(forward_);
        for (std::size_t n = 0; n < complex_size_; ++n) {
            const std::complex<double> v = std::complex<double>(spec_[n][0], spec_[n][1]) * kernel_[n];
            spec_[n][0] = v.real();
            spec_[n][1] = v.imag();
        }
        fftw_execute(backward_);
        ScalarField3 out(grid_);
        for (int kk = 0; kk < grid_.nz; ++kk)
            for (int j = 0; j < grid_.ny; ++j)
                for (int i = 0; i < grid_.nx; ++i) out(i, j, kk) = real_[pad_index(kk, j, i)];
        return out;
    }

private:
    struct FftwFree {
        void operator()(void* p) const { fftw_free(p); }
    };

    std::size_t pad_index(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * n1_ + static_cast<std::size_t>(b)) * n2_ + static_cast<std::size_t>(c);
    }

    Grid3 grid_;
    int n0_ = 0, n1_ = 0, n2_ = 0;
    std::size_t real_size_ = 0, complex_size_ = 0;
    std::unique_ptr<double[], FftwFree> real_;
    std::unique_ptr<fftw_complex[], FftwFree> spec_;
    std::vector<std::complex<double>> kernel_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

inline PoissonSolution greens_fft(const ScalarField3& k) {
    GreensConvolver conv(k.grid());
    PoissonSolution sol{conv.apply(k), PoissonMethod::FftConvolution, 0.0, 0.0, {}};
    detail::finish(sol, k);
    return sol;
}

/// F with laplacian(F) = dc/dt, decaying at infinity: F = -(1/4pi) int dcdt / |r - r'|.
inline ScalarField3 invert_for_F(const ScalarField3& dcdt) {
    return greens_fft(dcdt * -1.0).V;
}

}  // namespace nldiff
