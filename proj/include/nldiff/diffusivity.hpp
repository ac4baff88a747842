#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/monotone_cubic.hpp"
#include "nldiff/quadrature.hpp"

namespace nldiff {

/// Concentration-dependent diffusion laws D(c).
namespace law {

struct Constant {
    double d0;
};

/// D(c) = d0 * c^m
struct PowerLaw {
    double d0;
    double m;
};

/// D(c) = d0 * exp(beta * c)
struct Exponential {
    double d0;
    double beta;
};

/// Monotone cubic through (c_i, D_i) knots.
struct Tabulated {
    MonotoneCubic table;
    std::vector<double> cumulative;  // integral of the interpolant from the first knot
};

}  // namespace law

enum class LawKind { Constant, PowerLaw, Exponential, Tabulated };

inline const char* to_string(LawKind k) {
    switch (k) {
        case LawKind::Constant: return "constant";
        case LawKind::PowerLaw: return "powerlaw";
        case LawKind::Exponential: return "exponential";
        case LawKind::Tabulated: return "tabulated";
    }
    return "?";
}

/// Closed or open end points; infinite ends are always open.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = true;
    bool hi_open = true;

    bool contains(double c) const {
        const bool above = lo_open ? c > lo : c >= lo;
        const bool below = hi_open ? c < hi : c <= hi;
        return above && below;
    }

    std::string str() const {
        std::ostringstream os;
        os.precision(17);
        os << (lo_open ? '(' : '[') << lo << ", " << hi << (hi_open ? ')' : ']');
        return os.str();
    }
};

inline bool is_nonnegative_integer(double m) { return m >= 0.0 && std::floor(m) == m; }

/// Immutable diffusion law plus the Kirchhoff reference concentration c_ref.
///
/// F(c) = integral of D(s) ds from c_ref to c. Only differences and derivatives
/// of F enter the dynamics, so c_ref only shifts F by a constant.
class DiffusivityModel {
public:
    using Law = std::variant<law::Constant, law::PowerLaw, law::Exponential, law::Tabulated>;

    static constexpr double kDefaultCMin = 1e-12;

    static DiffusivityModel constant(double d0, double c_ref = 0.0) {
        if (!(d0 > 0.0) || !std::isfinite(d0)) {
            throw std::invalid_argument("constant diffusivity requires D0 > 0");
        }
        return DiffusivityModel(law::Constant{d0}, c_ref, kDefaultCMin);
    }

    static DiffusivityModel power_law(double d0, double m, double c_ref = 0.0,
                                      double c_min = kDefaultCMin) {
        if (!(d0 > 0.0) || !std::isfinite(d0)) {
            throw std::invalid_argument("power-law diffusivity requires D0 > 0");
        }
        if (!(m > -1.0) || !std::isfinite(m)) {
            throw std::invalid_argument("power-law exponent must satisfy m > -1");
        }
        if (!(c_min > 0.0)) {
            throw std::invalid_argument("c_min must be positive");
        }
        return DiffusivityModel(law::PowerLaw{d0, m}, c_ref, c_min);
    }

    static DiffusivityModel exponential(double d0, double beta, double c_ref = 0.0) {
        if (!(d0 > 0.0) || !std::isfinite(d0) || !std::isfinite(beta)) {
            throw std::invalid_argument("exponential diffusivity requires D0 > 0 and finite beta");
        }
        return DiffusivityModel(law::Exponential{d0, beta}, c_ref, kDefaultCMin);
    }

    static DiffusivityModel tabulated(const std::vector<std::pair<double, double>>& knots,
                                      double c_ref = 0.0) {
        std::vector<double> x, y;
        for (const auto& [c, d] : knots) {
            if (!(d > 0.0) || !std::isfinite(d) || !std::isfinite(c)) {
                throw std::invalid_argument("tabulated diffusivity requires finite knots with D_i > 0");
            }
            x.push_back(c);
            y.push_back(d);
        }
        law::Tabulated tab{MonotoneCubic(std::move(x), std::move(y)), {}};
        const auto xs = tab.table.knots();
        tab.cumulative.assign(xs.size(), 0.0);
        for (std::size_t k = 1; k < xs.size(); ++k) {
            tab.cumulative[k] = tab.cumulative[k - 1] +
                                quad::adaptive_simpson(tab.table, xs[k - 1], xs[k], kQuadTol);
        }
        return DiffusivityModel(std::move(tab), c_ref, kDefaultCMin);
    }

    LawKind kind() const { return static_cast<LawKind>(law_.index()); }
    const Law& law() const { return law_; }
    double c_ref() const { return c_ref_; }
    double c_min() const { return c_min_; }

    DiffusivityModel with_c_ref(double c_ref) const {
        DiffusivityModel copy = *this;
        copy.c_ref_ = c_ref;
        return copy;
    }

    Interval validity() const {
        return std::visit(
            [this](const auto& l) -> Interval {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    return Interval{0.0, std::numeric_limits<double>::infinity(),
                                    !is_nonnegative_integer(l.m), true};
                } else if constexpr (std::is_same_v<T, law::Tabulated>) {
                    return Interval{l.table.front(), l.table.back(), false, false};
                } else {
                    (void)this;
                    return Interval{};
                }
            },
            law_);
    }

    /// True when the law has a restricted lower bound that solvers clamp to.
    bool has_floor() const { return kind() == LawKind::PowerLaw; }

    /// Lowest concentration solvers feed to the law: c_min for open lower
    /// bounds, the bound itself for closed ones.
    double floor_value() const {
        const Interval v = validity();
        return v.lo_open ? c_min_ : v.lo;
    }

    /// Lift c to floor_value() for restricted-domain laws; identity otherwise.
    double clamp(double c) const {
        if (!has_floor()) {
            return c;
        }
        const double f = floor_value();
        return c < f ? f : c;
    }

    bool needs_clamp(double c) const { return has_floor() && c < floor_value(); }

    double diffusivity(double c) const {
        check_domain(c);
        return std::visit(
            [c](const auto& l) -> double {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::Constant>) {
                    return l.d0;
                } else if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    return l.d0 * std::pow(c, l.m);
                } else if constexpr (std::is_same_v<T, law::Exponential>) {
                    return l.d0 * std::exp(l.beta * c);
                } else {
                    return l.table(c);
                }
            },
            law_);
    }

    /// [D(c), D'(c), ..., D^(order)(c)]
    std::vector<double> derivatives(double c, int order) const {
        if (order < 0) {
            throw std::invalid_argument("derivative order must be >= 0");
        }
        check_domain(c);
        std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::Constant>) {
                    out[0] = l.d0;
                } else if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    double falling = 1.0;
                    for (int n = 0; n <= order; ++n) {
                        out[n] = falling == 0.0 ? 0.0 : l.d0 * falling * std::pow(c, l.m - n);
                        falling *= (l.m - n);
                    }
                } else if constexpr (std::is_same_v<T, law::Exponential>) {
                    double d = l.d0 * std::exp(l.beta * c);
                    for (int n = 0; n <= order; ++n) {
                        out[n] = d;
                        d *= l.beta;
                    }
                } else {
                    if (order > 2) {
                        throw UnsupportedOrderError("tabulated diffusivity supports derivatives up to order 2, got " +
                                                    std::to_string(order));
                    }
                    double v[3];
                    l.table.evaluate(c, order, v);
                    for (int n = 0; n <= order; ++n) out[n] = v[n];
                }
            },
            law_);
        return out;
    }

    /// Kirchhoff potential F(c) = integral of D from c_ref to c.
    double kirchhoff(double c) const {
        check_domain(c);
        check_reference();
        return std::visit(
            [&](const auto& l) -> double {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::Constant>) {
                    return l.d0 * (c - c_ref_);
                } else if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    const double p = l.m + 1.0;
                    return l.d0 * (std::pow(c, p) - std::pow(c_ref_, p)) / p;
                } else if constexpr (std::is_same_v<T, law::Exponential>) {
                    if (l.beta == 0.0) {
                        return l.d0 * (c - c_ref_);
                    }
                    return l.d0 * std::exp(l.beta * c_ref_) * std::expm1(l.beta * (c - c_ref_)) / l.beta;
                } else {
                    return tabulated_primitive(l, c) - tabulated_primitive(l, c_ref_);
                }
            },
            law_);
    }

    /// Values of F at the ends of the validity interval (limits for open ends).
    std::pair<double, double> kirchhoff_range() const {
        const Interval v = validity();
        const double inf = std::numeric_limits<double>::infinity();
        return std::visit(
            [&](const auto& l) -> std::pair<double, double> {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::Constant>) {
                    return {-inf, inf};
                } else if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    const double p = l.m + 1.0;
                    return {-l.d0 * std::pow(c_ref_, p) / p, inf};
                } else if constexpr (std::is_same_v<T, law::Exponential>) {
                    if (l.beta == 0.0) return {-inf, inf};
                    const double lim = -l.d0 * std::exp(l.beta * c_ref_) / l.beta;
                    return l.beta > 0.0 ? std::pair{lim, inf} : std::pair{-inf, lim};
                } else {
                    return {kirchhoff(v.lo), kirchhoff(v.hi)};
                }
            },
            law_);
    }

    /// c with F(c) = f, by safeguarded Newton with bisection fallback.
    double inverse_kirchhoff(double f) const {
        if (!std::isfinite(f)) {
            throw RangeError("inverse Kirchhoff: non-finite potential");
        }
        const auto [f_lo, f_hi] = kirchhoff_range();
        const Interval v = validity();
        const bool lo_reachable = !v.lo_open && std::isfinite(v.lo);
        const bool hi_reachable = !v.hi_open && std::isfinite(v.hi);
        const bool below = lo_reachable ? f < f_lo : f <= f_lo;
        const bool above = hi_reachable ? f > f_hi : f >= f_hi;
        if (below || above) {
            std::ostringstream os;
            os.precision(17);
            os << "inverse Kirchhoff: potential " << f << " outside range [" << f_lo << ", " << f_hi << "]";
            throw RangeError(os.str());
        }
        const double tol = 1e-12 * std::max(1.0, std::abs(f));

        // bracket [a, b] with F(a) <= f <= F(b)
        double a, b;
        if (std::isfinite(v.lo)) {
            a = v.lo_open ? std::max(v.lo + c_min_, std::nextafter(v.lo, v.hi)) : v.lo;
            while (v.lo_open && kirchhoff(a) > f && a > v.lo) {
                a = v.lo + 0.5 * (a - v.lo);
                if (a - v.lo < std::numeric_limits<double>::min()) break;
            }
        } else {
            double step = 1.0;
            a = c_ref_ - step;
            while (kirchhoff(a) > f) {
                step *= 2.0;
                a = c_ref_ - step;
                if (!std::isfinite(a)) throw RangeError("inverse Kirchhoff: lower bracket diverged");
            }
        }
        if (std::isfinite(v.hi)) {
            b = v.hi;
        } else {
            double step = 1.0;
            b = std::max(a, c_ref_) + step;
            while (kirchhoff(b) < f) {
                step *= 2.0;
                b = std::max(a, c_ref_) + step;
                if (!std::isfinite(b)) throw RangeError("inverse Kirchhoff: upper bracket diverged");
            }
        }

        double c = std::clamp(c_ref_, a, b);
        double best = c;
        double best_err = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 400; ++it) {
            const double r = kirchhoff(c) - f;
            if (std::abs(r) < best_err) {
                best_err = std::abs(r);
                best = c;
            }
            if (std::abs(r) <= tol) {
                return c;
            }
            if (r > 0.0) b = c; else a = c;
            const double d = diffusivity(c);
            double next = d > 0.0 ? c - r / d : 0.5 * (a + b);
            if (!(next > a && next < b)) {
                next = 0.5 * (a + b);
            }
            if (next == c) {
                break;
            }
            c = next;
        }
        return best;
    }

    /// Taylor coefficients of t -> D(c(t)) given those of c(t). Writes
    /// d[0..a.size()-1].
    void compose_taylor(std::span<const double> a, std::span<double> d) const {
        const std::size_t n = a.size();
        if (n == 0) {
            return;
        }
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::Constant>) {
                    d[0] = l.d0;
                    for (std::size_t k = 1; k < n; ++k) d[k] = 0.0;
                } else if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    compose_power(l, a, d);
                } else if constexpr (std::is_same_v<T, law::Exponential>) {
                    d[0] = diffusivity(a[0]);
                    for (std::size_t k = 1; k < n; ++k) {
                        double s = 0.0;
                        for (std::size_t j = 1; j <= k; ++j) {
                            s += static_cast<double>(j) * a[j] * d[k - j];
                        }
                        d[k] = l.beta * s / static_cast<double>(k);
                    }
                } else {
                    if (n > 3) {
                        throw UnsupportedOrderError("tabulated diffusivity supports Taylor composition up to order 2, got " +
                                                    std::to_string(n - 1));
                    }
                    double v[3];
                    l.table.evaluate(a[0], static_cast<int>(n) - 1, v);
                    d[0] = v[0];
                    if (n > 1) d[1] = v[1] * a[1];
                    if (n > 2) d[2] = v[1] * a[2] + 0.5 * v[2] * a[1] * a[1];
                }
            },
            law_);
    }

    std::vector<double> compose_taylor(std::span<const double> a) const {
        std::vector<double> d(a.size());
        compose_taylor(a, d);
        return d;
    }

    /// Highest Taylor / derivative order the law supports (-1: unbounded).
    int max_order() const { return kind() == LawKind::Tabulated ? 2 : -1; }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << to_string(kind());
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, law::Constant>) {
                    os << "(D0=" << l.d0 << ")";
                } else if constexpr (std::is_same_v<T, law::PowerLaw>) {
                    os << "(D0=" << l.d0 << ", m=" << l.m << ", c_min=" << c_min_ << ")";
                } else if constexpr (std::is_same_v<T, law::Exponential>) {
                    os << "(D0=" << l.d0 << ", beta=" << l.beta << ")";
                } else {
                    os << "(" << l.table.knots().size() << " knots)";
                }
            },
            law_);
        os << " c_ref=" << c_ref_;
        return os.str();
    }

private:
    static constexpr double kQuadTol = 1e-12;

    DiffusivityModel(Law l, double c_ref, double c_min) : law_(std::move(l)), c_ref_(c_ref), c_min_(c_min) {}

    void check_domain(double c, const char* what = "c") const {
        const Interval v = validity();
        if (!v.contains(c)) {
            std::ostringstream os;
            os.precision(17);
            os << to_string(kind()) << " diffusivity: " << what << "=" << c << " outside validity interval "
               << v.str();
            throw DomainError(os.str());
        }
    }

    // c_ref may sit on an open end point (e.g. 0 for fractional power laws)
    void check_reference() const {
        Interval closure = validity();
        closure.lo_open = !std::isfinite(closure.lo);
        closure.hi_open = !std::isfinite(closure.hi);
        if (!closure.contains(c_ref_)) {
            std::ostringstream os;
            os.precision(17);
            os << to_string(kind()) << " diffusivity: c_ref=" << c_ref_ << " outside " << closure.str();
            throw DomainError(os.str());
        }
    }

    static double tabulated_primitive(const law::Tabulated& l, double c) {
        const auto xs = l.table.knots();
        std::size_t k = 0;
        while (k + 2 < xs.size() && c >= xs[k + 1]) ++k;
        return l.cumulative[k] + quad::adaptive_simpson(l.table, xs[k], c, kQuadTol);
    }

    void compose_power(const law::PowerLaw& l, std::span<const double> a, std::span<double> d) const {
        const std::size_t n = a.size();
        if (is_nonnegative_integer(l.m) && l.m <= 64) {
            // c^m by repeated Cauchy products; exact for a0 = 0
            std::vector<double> p(n, 0.0), tmp(n);
            p[0] = 1.0;
            const int m = static_cast<int>(l.m);
            for (int r = 0; r < m; ++r) {
                for (std::size_t k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (std::size_t j = 0; j <= k; ++j) s += p[j] * a[k - j];
                    tmp[k] = s;
                }
                p.swap(tmp);
            }
            for (std::size_t k = 0; k < n; ++k) d[k] = l.d0 * p[k];
            return;
        }
        // c * D' = m * D * c'
        const double a0 = clamp(a[0]);
        d[0] = l.d0 * std::pow(a0, l.m);
        for (std::size_t k = 1; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j) {
                s += (l.m * static_cast<double>(j) - static_cast<double>(k - j)) * a[j] * d[k - j];
            }
            d[k] = s / (static_cast<double>(k) * a0);
        }
    }

    Law law_;
    double c_ref_;
    double c_min_;
};

}  // namespace nldiff
