#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nldiff/diffusivity.hpp"
#include "nldiff/errors.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/poisson.hpp"
#include "nldiff/taylor_stepper.hpp"
#include "nldiff/trajectory.hpp"

namespace nldiff {

enum class EquationId { E2200, E3090, E4710, E4720, E5020, E5100, E5120, E5160, E5200, E5680, E6690 };

inline const char* to_string(EquationId e) {
    switch (e) {
        case EquationId::E2200: return "E2200";
        case EquationId::E3090: return "E3090";
        case EquationId::E4710: return "E4710";
        case EquationId::E4720: return "E4720";
        case EquationId::E5020: return "E5020";
        case EquationId::E5100: return "E5100";
        case EquationId::E5120: return "E5120";
        case EquationId::E5160: return "E5160";
        case EquationId::E5200: return "E5200";
        case EquationId::E5680: return "E5680";
        case EquationId::E6690: return "E6690";
    }
    return "?";
}

inline std::optional<EquationId> equation_from_string(const std::string& s) {
    for (EquationId e : {EquationId::E2200, EquationId::E3090, EquationId::E4710, EquationId::E4720,
                         EquationId::E5020, EquationId::E5100, EquationId::E5120, EquationId::E5160,
                         EquationId::E5200, EquationId::E5680, EquationId::E6690}) {
        if (s == to_string(e)) return e;
    }
    return std::nullopt;
}

/// Residual of one identity on one snapshot; norms over the interior box.
struct ResidualReport {
    EquationId equation = EquationId::E2200;
    double t = 0.0;
    double h = 0.0;
    double dt = 0.0;             // snapshot spacing used for time derivatives / quadrature
    double norm_l2 = 0.0;
    double norm_linf = 0.0;
    double normalization = 1.0;  // largest term norm (L2), 1 when every term vanishes
    bool clamped = false;
    std::vector<std::string> warnings;
    ScalarField3 field;

    double normalized_l2() const { return norm_l2 / normalization; }
    double normalized_linf() const { return norm_linf / normalization; }
};

/// Integral form and differential cross-check of the c-equation.
struct E4720Report {
    ResidualReport integral;      // E4720
    ResidualReport differential;  // E4710
};

/// phi = laplacian(F(c)).
struct AuxiliaryField {
    ScalarField3 phi;
};

inline AuxiliaryField compute_phi(const ScalarField3& c, const DiffusivityModel& model) {
    return {laplacian(kirchhoff_field(c, model))};
}

/// Weights of the derivative at times[at] of the quadratic through three
/// consecutive samples starting at `first`.
inline std::array<double, 3> lagrange_derivative_weights(const std::vector<double>& times, std::size_t first,
                                                         std::size_t at) {
    std::array<double, 3> w{};
    const double x = times[at];
    for (std::size_t j = 0; j < 3; ++j) {
        const double tj = times[first + j];
        double s = 0.0;
        for (std::size_t m = 0; m < 3; ++m) {
            if (m == j) continue;
            double prod = 1.0 / (tj - times[first + m]);
            for (std::size_t l = 0; l < 3; ++l) {
                if (l == j || l == m) continue;
                prod *= (x - times[first + l]) / (tj - times[first + l]);
            }
            s += prod;
        }
        w[j] = s;
    }
    return w;
}

/// Second-order time derivative of a sampled quantity at index `at`:
/// central when possible, one-sided three-point at the ends.
template <typename Sample>
ScalarField3 time_derivative(const std::vector<double>& times, std::size_t at, Sample&& sample) {
    if (times.size() < 3) {
        throw InsufficientDataError("time derivative needs at least 3 snapshots, have " + std::to_string(times.size()));
    }
    std::size_t first = at == 0 ? 0 : (at + 1 >= times.size() ? times.size() - 3 : at - 1);
    const auto w = lagrange_derivative_weights(times, first, at);
    const ScalarField3& centre = sample(at);
    ScalarField3 out(centre.grid());
    // differences against the centre sample: weights sum to zero, constants cancel exactly
    for (std::size_t j = 0; j < 3; ++j) {
        if (first + j == at) continue;
        const ScalarField3& v = sample(first + j);
        for (std::size_t p = 0; p < out.size(); ++p) out[p] += w[j] * (v[p] - centre[p]);
    }
    return out;
}

/// Residuals of the derived identities along a trajectory.
///
/// The far-field concentration is the model's c_ref: F(c_ref) = 0 so F decays
/// at the faces, and spatial derivatives of c (and of D^(N)) are taken on the
/// deviation from the far-field value so FreeDecay ghosts stay consistent.
class IdentityChecker {
public:
    explicit IdentityChecker(Trajectory traj) : traj_(std::move(traj)) {
        traj_.validate(1);
        const std::size_t n = traj_.size();
        F_.resize(n);
        D_.resize(n);
        Dpos_.resize(n);
        phi_.resize(n);
        conv_phi_.resize(n);
        dcdt_.resize(n);
    }

    const Trajectory& trajectory() const { return traj_; }
    const DiffusivityModel& model() const { return traj_.model; }
    double far_field() const { return traj_.model.c_ref(); }

    // -- cached per-snapshot fields ---------------------------------------

    const ScalarField3& c(std::size_t i) const { return traj_.fields.at(i); }

    const ScalarField3& F(std::size_t i) {
        if (!F_[i]) F_[i] = kirchhoff_field(c(i), model(), &clamp_);
        return *F_[i];
    }

    const ScalarField3& D(std::size_t i) {
        if (!D_[i]) D_[i] = diffusivity_field(c(i), model(), &clamp_);
        return *D_[i];
    }

    /// D evaluated at max(c, c_min) so it can divide and take logarithms.
    const ScalarField3& D_positive(std::size_t i) {
        if (!Dpos_[i]) {
            const double floor = std::max(model().floor_value(), model().c_min());
            ScalarField3 d(traj_.grid);
            const ScalarField3& ci = c(i);
            for (std::size_t p = 0; p < d.size(); ++p) {
                double v = ci[p];
                if (model().has_floor() && v < floor) {
                    v = floor;
                    ++positive_clamp_.clamped;
                    positive_clamp_.lowest = std::min(positive_clamp_.lowest, ci[p]);
                }
                d[p] = model().diffusivity(v);
            }
            Dpos_[i] = std::move(d);
        }
        return *Dpos_[i];
    }

    const ScalarField3& phi(std::size_t i) {
        if (!phi_[i]) phi_[i] = laplacian(F(i));
        return *phi_[i];
    }

    const ScalarField3& dcdt(std::size_t i) {
        if (!dcdt_[i]) dcdt_[i] = time_derivative(traj_.times, i, [this](std::size_t j) -> const ScalarField3& { return c(j); });
        return *dcdt_[i];
    }

    ScalarField3 dFdt(std::size_t i) {
        return time_derivative(traj_.times, i, [this](std::size_t j) -> const ScalarField3& { return F(j); });
    }

    /// (1/4pi) int v / |r - r'|
    ScalarField3 convolve(const ScalarField3& v) { return convolver().apply(v); }

    const ScalarField3& conv_phi(std::size_t i) {
        if (!conv_phi_[i]) conv_phi_[i] = convolve(phi(i));
        return *conv_phi_[i];
    }

    // -- residuals -----------------------------------------------------------

    /// c(t) - c(0) - laplacian( int_0^t F dt' ), trapezoid over snapshots.
    ResidualReport residual_E2200(std::size_t ti) {
        check_index(ti);
        if (ti < 1) {
            throw InsufficientDataError("E2200 needs at least 2 snapshots up to t (t_index >= 1)");
        }
        ScalarField3 integral(traj_.grid);
        for (std::size_t j = 0; j < ti; ++j) {
            const double w = 0.5 * (traj_.times[j + 1] - traj_.times[j]);
            integral.axpy(w, F(j));
            integral.axpy(w, F(j + 1));
        }
        const ScalarField3 lhs = c(ti) - c(0);
        const ScalarField3 rhs = laplacian(integral);
        return report(EquationId::E2200, ti, lhs - rhs, {&lhs, &rhs}, spacing_before(ti));
    }

    /// F(c) - F_free where laplacian(F_free) = dc/dt.
    ResidualReport residual_E3090(std::size_t ti) {
        check_index(ti);
        const ScalarField3 inv = convolve(dcdt(ti)) * -1.0;
        const ScalarField3& f = F(ti);
        ResidualReport r = report(EquationId::E3090, ti, f - inv, {&f, &inv}, spacing_around(ti));
        warn_if_not_decaying(r, f, "F");
        return r;
    }

    E4720Report residual_E4720(std::size_t ti) {
        check_index(ti);
        const ScalarField3& dp = D_positive(ti);
        const ScalarField3 dev = deviation(c(ti), far_field());
        const VectorField3 gc = gradient(dev);
        const ScalarField3 grad2 = dot(gc, gc);
        // grad(ln D) . grad(c) = D'/D |grad c|^2
        ScalarField3 dlog(traj_.grid);
        const ScalarField3& ci = c(ti);
        const double floor = std::max(model().floor_value(), model().c_min());
        for (std::size_t p = 0; p < dlog.size(); ++p) {
            double v = ci[p];
            if (model().has_floor() && v < floor) v = floor;
            dlog[p] = model().derivatives(v, 1)[1] / dp[p];
        }
        ScalarField3 time_term = dcdt(ti);
        for (std::size_t p = 0; p < time_term.size(); ++p) time_term[p] /= dp[p];
        const ScalarField3 log_term = dlog * grad2;
        const ScalarField3 g = time_term - log_term;

        const ScalarField3 conv = convolve(g);
        // c - c_far = -(1/4pi) int g / |r - r'|
        ScalarField3 res_int = dev + conv;
        E4720Report out;
        out.integral = report(EquationId::E4720, ti, res_int, {&dev, &conv}, spacing_around(ti));
        const ScalarField3 lap = laplacian(dev);
        out.differential = report(EquationId::E4710, ti, g - lap, {&time_term, &log_term, &lap}, spacing_around(ti));
        const bool flagged = positive_clamp_.clamped > 0;
        out.integral.clamped = out.differential.clamped = flagged;
        if (flagged) {
            out.integral.warnings.push_back("D evaluated at c_min floor on some cells");
        }
        return out;
    }

    /// dF/dt - D(c) laplacian(F)
    ResidualReport residual_E5020(std::size_t ti) {
        check_index(ti);
        const ScalarField3 lhs = dFdt(ti);
        const ScalarField3 rhs = D(ti) * phi(ti);
        return report(EquationId::E5020, ti, lhs - rhs, {&lhs, &rhs}, spacing_around(ti));
    }

    /// F + (1/4pi) int (1/D) dF/dt / |r - r'| with dF/dt = D dc/dt.
    ResidualReport residual_E5100(std::size_t ti) {
        check_index(ti);
        const ScalarField3& dp = D_positive(ti);
        ScalarField3 dFdt_sub = dp * dcdt(ti);
        ScalarField3 integrand = dFdt_sub;
        for (std::size_t p = 0; p < integrand.size(); ++p) integrand[p] /= dp[p];
        const ScalarField3 conv = convolve(integrand);
        const ScalarField3& f = F(ti);
        ResidualReport r = report(EquationId::E5100, ti, f + conv, {&f, &conv}, spacing_around(ti));
        warn_if_not_decaying(r, f, "F");
        return r;
    }

    /// phi - (1/D) dF/dt
    ResidualReport residual_E5120(std::size_t ti) {
        check_index(ti);
        const ScalarField3& dp = D_positive(ti);
        ScalarField3 rhs = dFdt(ti);
        for (std::size_t p = 0; p < rhs.size(); ++p) rhs[p] /= dp[p];
        const ScalarField3& ph = phi(ti);
        return report(EquationId::E5120, ti, ph - rhs, {&ph, &rhs}, spacing_around(ti));
    }

    /// D phi + d/dt (1/4pi) int phi / |r - r'|
    ResidualReport residual_E5160(std::size_t ti) {
        check_index(ti);
        const ScalarField3 lhs = D(ti) * phi(ti);
        const ScalarField3 rhs = time_derivative(traj_.times, ti, [this](std::size_t j) -> const ScalarField3& {
            return conv_phi(j);
        });
        return report(EquationId::E5160, ti, lhs + rhs, {&lhs, &rhs}, spacing_around(ti));
    }

    /// dphi/dt - laplacian(D phi)
    ResidualReport residual_E5200(std::size_t ti) {
        check_index(ti);
        const ScalarField3 lhs =
            time_derivative(traj_.times, ti, [this](std::size_t j) -> const ScalarField3& { return phi(j); });
        const ScalarField3 rhs = laplacian(D(ti) * phi(ti));
        return report(EquationId::E5200, ti, lhs - rhs, {&lhs, &rhs}, spacing_around(ti));
    }

    ResidualReport residual_E5200() { return residual_E5200(traj_.size() / 2); }

    /// dD/dt - D' div(D grad D / D')
    ResidualReport residual_E5680(std::size_t ti) {
        ResidualReport r = derivative_law_residual(ti, 0);
        r.equation = EquationId::E5680;
        return r;
    }

    /// dD^(N)/dt - D^(N+1) div(D grad D^(N) / D^(N+1))
    ResidualReport residual_E6690(std::size_t ti, int n) {
        if (n < 0) throw std::invalid_argument("E6690: derivative order N must be >= 0");
        ResidualReport r = derivative_law_residual(ti, n);
        r.equation = EquationId::E6690;
        return r;
    }

    ResidualReport residual(EquationId e, std::size_t ti, int n = 0) {
        switch (e) {
            case EquationId::E2200: return residual_E2200(ti);
            case EquationId::E3090: return residual_E3090(ti);
            case EquationId::E4710: return residual_E4720(ti).differential;
            case EquationId::E4720: return residual_E4720(ti).integral;
            case EquationId::E5020: return residual_E5020(ti);
            case EquationId::E5100: return residual_E5100(ti);
            case EquationId::E5120: return residual_E5120(ti);
            case EquationId::E5160: return residual_E5160(ti);
            case EquationId::E5200: return residual_E5200(ti);
            case EquationId::E5680: return residual_E5680(ti);
            case EquationId::E6690: return residual_E6690(ti, n);
        }
        throw std::invalid_argument("unknown equation");
    }

    /// Snapshot index whose time is closest to t.
    std::size_t index_of(double t) const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < traj_.size(); ++i) {
            if (std::abs(traj_.times[i] - t) < std::abs(traj_.times[best] - t)) best = i;
        }
        return best;
    }

private:
    static ScalarField3 deviation(const ScalarField3& f, double far) {
        return f.map([far](double v) { return v - far; });
    }

    GreensConvolver& convolver() {
        if (!convolver_) convolver_ = std::make_unique<GreensConvolver>(traj_.grid);
        return *convolver_;
    }

    void check_index(std::size_t ti) const {
        if (ti >= traj_.size()) {
            throw std::out_of_range("snapshot index " + std::to_string(ti) + " outside trajectory of " +
                                    std::to_string(traj_.size()));
        }
    }

    double spacing_before(std::size_t ti) const { return traj_.times[ti] - traj_.times[ti - 1]; }

    double spacing_around(std::size_t ti) const {
        if (traj_.size() < 2) return 0.0;
        if (ti == 0) return traj_.times[1] - traj_.times[0];
        return traj_.times[ti] - traj_.times[ti - 1];
    }

    ResidualReport report(EquationId e, std::size_t ti, ScalarField3 residual,
                          std::initializer_list<const ScalarField3*> terms, double dt) const {
        const Box box = interior_box(traj_.grid);
        ResidualReport r;
        r.equation = e;
        r.t = traj_.times[ti];
        r.h = traj_.grid.h;
        r.dt = dt;
        r.norm_l2 = norm_l2(residual, box);
        r.norm_linf = norm_linf(residual, box);
        double scale = 0.0;
        for (const ScalarField3* t : terms) scale = std::max(scale, norm_l2(*t, box));
        r.normalization = scale > 0.0 ? scale : 1.0;
        r.clamped = clamp_.clamped > 0;
        r.field = std::move(residual);
        return r;
    }

    static void warn_if_not_decaying(ResidualReport& r, const ScalarField3& f, const char* name) {
        const double ratio = detail::face_ratio(f);
        if (ratio > kFaceDecayThreshold) {
            r.warnings.push_back(std::string(name) + " does not decay at the box faces (ratio " + std::to_string(ratio) +
                                 "); choose c_ref equal to the far-field concentration");
        }
    }

    /// Cell values of D^(order) at c lifted to the law floor.
    ScalarField3 derivative_field(std::size_t i, int order) {
        ScalarField3 out(traj_.grid);
        const ScalarField3& ci = c(i);
        for (std::size_t p = 0; p < out.size(); ++p) {
            out[p] = model().derivatives(model().clamp(ci[p]), order)[static_cast<std::size_t>(order)];
        }
        return out;
    }

    ResidualReport derivative_law_residual(std::size_t ti, int n) {
        check_index(ti);
        if (model().kind() == LawKind::Constant) {
            throw NonlinearityRequiredError("derivative-law identity needs a nonlinear diffusivity (D' != 0); got a constant law");
        }
        const ScalarField3 dn = derivative_field(ti, n);
        const ScalarField3 dn1 = derivative_field(ti, n + 1);
        for (std::size_t p = 0; p < dn1.size(); ++p) {
            if (dn1[p] == 0.0) {
                throw NonlinearityRequiredError("derivative-law identity needs D^(" + std::to_string(n + 1) +
                                                ") != 0 everywhere; it vanishes on the trajectory");
            }
        }
        std::map<std::size_t, ScalarField3> samples;
        const ScalarField3 lhs = time_derivative(traj_.times, ti, [&](std::size_t j) -> const ScalarField3& {
            auto it = samples.find(j);
            if (it == samples.end()) it = samples.emplace(j, derivative_field(j, n)).first;
            return it->second;
        });
        const double far = model().clamp(far_field());
        const double dn_far = model().derivatives(far, n)[static_cast<std::size_t>(n)];
        VectorField3 flux = gradient(deviation(dn, dn_far));
        const ScalarField3& weight = D(ti);
        for (std::size_t p = 0; p < flux.x.size(); ++p) {
            const double s = weight[p] / dn1[p];
            flux.x[p] *= s;
            flux.y[p] *= s;
            flux.z[p] *= s;
        }
        const ScalarField3 rhs = dn1 * divergence(flux);
        return report(EquationId::E5680, ti, lhs - rhs, {&lhs, &rhs}, spacing_around(ti));
    }

    Trajectory traj_;
    std::vector<std::optional<ScalarField3>> F_, D_, Dpos_, phi_, conv_phi_, dcdt_;
    std::unique_ptr<GreensConvolver> convolver_;
    ClampStats clamp_;
    ClampStats positive_clamp_;
};

// free-function forms

inline ResidualReport residual_E2200(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E2200(i); }
inline ResidualReport residual_E3090(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E3090(i); }
inline E4720Report residual_E4720(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E4720(i); }
inline ResidualReport residual_E5020(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E5020(i); }
inline ResidualReport residual_E5100(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E5100(i); }
inline ResidualReport residual_E5120(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E5120(i); }
inline ResidualReport residual_E5160(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E5160(i); }
inline ResidualReport residual_E5200(const Trajectory& t) { return IdentityChecker(t).residual_E5200(); }
inline ResidualReport residual_E5680(const Trajectory& t, std::size_t i) { return IdentityChecker(t).residual_E5680(i); }
inline ResidualReport residual_E6690(const Trajectory& t, std::size_t i, int n) {
    return IdentityChecker(t).residual_E6690(i, n);
}

// ---------------------------------------------------------------------------
// series-based forms

namespace detail {

inline ResidualReport series_report(EquationId e, const TaylorState& s, double t, ScalarField3 residual,
                                    std::initializer_list<const ScalarField3*> terms) {
    const Box box = interior_box(s.grid);
    ResidualReport r;
    r.equation = e;
    r.t = t;
    r.h = s.grid.h;
    r.norm_l2 = norm_l2(residual, box);
    r.norm_linf = norm_linf(residual, box);
    double scale = 0.0;
    for (const ScalarField3* f : terms) scale = std::max(scale, norm_l2(*f, box));
    r.normalization = scale > 0.0 ? scale : 1.0;
    r.clamped = s.clamping.clamped > 0;
    r.field = std::move(residual);
    return r;
}

}  // namespace detail

/// dF/dt - D(c) laplacian(F) with every term taken from the series at t.
inline ResidualReport residual_E5020(const TaylorState& s, double t) {
    const ScalarField3 lhs = evaluate_dFdt(s, t);
    const ScalarField3 c = evaluate(s, t);
    const ScalarField3 rhs = diffusivity_field(c, s.model) * laplacian(evaluate_F(s, t));
    return detail::series_report(EquationId::E5020, s, t, lhs - rhs, {&lhs, &rhs});
}

/// laplacian(F) - (1/D) dF/dt from the series at t.
inline ResidualReport residual_E5120(const TaylorState& s, double t) {
    const ScalarField3 phi = laplacian(evaluate_F(s, t));
    const ScalarField3 d = diffusivity_field(evaluate(s, t), s.model);
    ScalarField3 rhs = evaluate_dFdt(s, t);
    for (std::size_t p = 0; p < rhs.size(); ++p) rhs[p] = d[p] > 0.0 ? rhs[p] / d[p] : 0.0;
    return detail::series_report(EquationId::E5120, s, t, phi - rhs, {&phi, &rhs});
}

// ---------------------------------------------------------------------------
// refinement studies

/// log2(coarse / fine); +inf when the fine residual is zero.
inline double order_estimate(double coarse, double fine) {
    if (fine == 0.0) return coarse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::log2(coarse / fine);
}

}  // namespace nldiff
