#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nldiff {

/// Piecewise-cubic Hermite interpolant with Fritsch-Carlson slope limiting.
///
/// On every interval the interpolant is monotone and stays inside the range
/// of its two end values, so positive data give a positive interpolant.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size() || x_.size() < 2) {
            throw std::invalid_argument("MonotoneCubic: need at least two knots with matching sizes");
        }
        for (std::size_t k = 1; k < x_.size(); ++k) {
            if (!(x_[k] > x_[k - 1])) {
                throw std::invalid_argument("MonotoneCubic: knot abscissae must be strictly increasing");
            }
        }
        compute_slopes();
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    std::span<const double> knots() const { return x_; }
    std::span<const double> values() const { return y_; }

    /// Value and first two derivatives at x; `order` limits what is filled.
    void evaluate(double x, int order, double* out) const {
        const std::size_t k = interval(x);
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double y0 = y_[k];
        const double y1 = y_[k + 1];
        const double m0 = slopes_[k] * h;
        const double m1 = slopes_[k + 1] * h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        out[0] = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
                 (t3 - t2) * m1;
        if (order >= 1) {
            out[1] = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 +
                      (3 * t2 - 2 * t) * m1) /
                     h;
        }
        if (order >= 2) {
            out[2] = ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) /
                     (h * h);
        }
    }

    double operator()(double x) const {
        double v[1];
        evaluate(x, 0, v);
        return v[0];
    }

private:
    std::size_t interval(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(k, x_.size() - 2);
    }

    void compute_slopes() {
        const std::size_t n = x_.size();
        std::vector<double> secant(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            secant[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
        }
        slopes_.assign(n, 0.0);
        slopes_[0] = secant[0];
        slopes_[n - 1] = secant[n - 2];
        for (std::size_t k = 1; k + 1 < n; ++k) {
            slopes_[k] = secant[k - 1] * secant[k] <= 0.0 ? 0.0 : 0.5 * (secant[k - 1] + secant[k]);
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (secant[k] == 0.0) {
                slopes_[k] = 0.0;
                slopes_[k + 1] = 0.0;
                continue;
            }
            const double alpha = slopes_[k] / secant[k];
            const double beta = slopes_[k + 1] / secant[k];
            if (alpha < 0.0) slopes_[k] = 0.0;
            if (beta < 0.0) slopes_[k + 1] = 0.0;
            const double r2 = alpha * alpha + beta * beta;
            if (r2 > 9.0) {
                const double tau = 3.0 / std::sqrt(r2);
                slopes_[k] = tau * alpha * secant[k];
                slopes_[k + 1] = tau * beta * secant[k];
            }
        }
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slopes_;
};

}  // namespace nldiff
