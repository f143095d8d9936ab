#pragma once

/// \file verify.hpp
///
/// Checks on computed modes that do not go through the determinant W_l:
/// the Rayleigh quotient by radial quadrature, the free boundary operators M and V,
/// the PDE residual, and grid verification of the Bessel sign and bound lemmas.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "errors.hpp"
#include "modes.hpp"
#include "quadrature.hpp"
#include "spectrum.hpp"

namespace freeplate {

/// Anything with derivative(r, m) for m = 0..2 on (0, 1].
template <class P>
concept RadialFunction = requires(const P& p, double r) {
    { p.derivative(r, 0) } -> std::convertible_to<double>;
};

/// Profiles that can supply d/dr (R/r) without cancellation.
template <class P>
concept HasReducedSlope = requires(const P& p, double r) {
    { p.reduced_slope(r) } -> std::convertible_to<double>;
};

/// Polynomial radial function sum_i c_i r^i.
struct PolynomialProfile {
    std::vector<double> coeffs;

    double derivative(double r, int m) const
    {
        double value = 0.0;
        for (std::size_t i = coeffs.size(); i-- > static_cast<std::size_t>(m);) {
            double c = coeffs[i];
            for (int j = 0; j < m; ++j) {
                c *= static_cast<double>(i - j);
            }
            value = value * r + c;
        }
        return value;
    }
};

/// Integrand of the Rayleigh numerator N[R Y_l] (unit ball), including the r^{d-1} weight.
///
/// For r >= 0.05 the completed-square form is used directly. Closer to the origin the
/// same quantity is regrouped around D = (R/r)'; for l = 1 the 1/r² pieces then cancel
/// exactly in the coefficients instead of in floating point.
template <RadialFunction P>
double numerator_integrand(const P& profile, const DimensionContext& ctx, double k, double tau, double r)
{
    const double d = ctx.d();
    const double R = profile.derivative(r, 0);
    const double R1 = profile.derivative(r, 1);
    const double R2 = profile.derivative(r, 2);
    const double weight = std::pow(r, d - 1.0);
    if (k == 0.0) {
        return (R2 * R2 + (d - 1.0) * R1 * R1 / (r * r) + tau * R1 * R1) * weight;
    }
    const double r2 = r * r;
    if (r >= 0.05) {
        const double sq = r * R1 - 1.5 * R;
        const double value = 2.0 * k / (r2 * r2) * sq * sq + k * (k - d - 0.5) / (r2 * r2) * R * R +
                             tau * k * R * R / r2 + R2 * R2 + (d - 1.0) / r2 * R1 * R1 + tau * R1 * R1;
        return value * weight;
    }
    const double x = R1 / r;
    const double y = R / r2;
    double D = 0.0;
    if constexpr (HasReducedSlope<P>) {
        D = profile.reduced_slope(r);
    } else {
        D = x - y;
    }
    const double value = R2 * R2 + (2.0 * k + d - 1.0) * D * D + 2.0 * (d - 1.0 - k) * x * y +
                         (k * (k - d + 2.0) - (d - 1.0)) * y * y + tau * (R1 * R1 + k * R * R / r2);
    return value * weight;
}

namespace detail {

template <class F>
double refined_integral(const QuadratureRule& rule, F&& f, const char* what)
{
    const double coarse = rule.integrate(f);
    const double fine = rule.refined().integrate(f);
    if (!std::isfinite(coarse) || !std::isfinite(fine) ||
        std::abs(fine - coarse) > 1e-6 * std::max(std::abs(fine), std::numeric_limits<double>::min())) {
        if (fine == 0.0 && coarse == 0.0) {
            return 0.0;
        }
        throw convergence_error(std::string(what) + ": quadrature refinements disagree (" + std::to_string(coarse) +
                                " vs " + std::to_string(fine) + "); the integral likely diverges");
    }
    return fine;
}

} // namespace detail

/// N[R Y_l] = ∫₀¹ (|D²u|² + τ|Du|²) over the unit ball for u = R(r) Y_l, with the
/// angular integrals done analytically. Evaluated with `rule` and its doubled
/// refinement; throws convergence_error if the two differ by more than 1e-6 relative.
template <RadialFunction P>
double rayleigh_numerator(const P& profile, const DimensionContext& ctx, int l, double tau, const QuadratureRule& rule)
{
    const double k = separation_constant(ctx, l);
    return detail::refined_integral(
        rule, [&](double r) { return numerator_integrand(profile, ctx, k, tau, r); }, "rayleigh_numerator");
}

/// ∫₀¹ R² r^{d-1} dr.
template <RadialFunction P>
double rayleigh_denominator(const P& profile, const DimensionContext& ctx, const QuadratureRule& rule)
{
    const double d = ctx.d();
    return detail::refined_integral(
        rule,
        [&](double r) {
            const double R = profile.derivative(r, 0);
            return R * R * std::pow(r, d - 1.0);
        },
        "rayleigh_denominator");
}

/// Q[u] for a mode on B(radius). The quotient scales as R^{-4}; the unit-ball tension
/// is recovered from the mode as b² − a².
inline double rayleigh_quotient(const DimensionContext& ctx, const ModeParams& mode, double radius,
                                const QuadratureRule& rule = QuadratureRule::gauss_legendre(64),
                                const SeriesPolicy& policy = {})
{
    if (mode.omega == 0.0 && mode.a == 0.0) {
        return 0.0;
    }
    const RadialProfile unit(ctx, mode, 1.0, policy);
    const double tau_unit = mode.b * mode.b - mode.a * mode.a;
    const double num = rayleigh_numerator(unit, ctx, mode.l, tau_unit, rule);
    const double den = rayleigh_denominator(unit, ctx, rule);
    return num / den / std::pow(radius, 4);
}

struct NumeratorValue {
    int l;
    double k;
    /// +inf when the quadrature guard reports divergence (R Y_l not in H²).
    double value;
    bool converged;
};

/// N[R Y_l] for each l in [l_first, l_last] with R held fixed.
template <RadialFunction P>
std::vector<NumeratorValue> numerator_monotonicity(const P& profile, const DimensionContext& ctx, double tau,
                                                   int l_first, int l_last,
                                                   const QuadratureRule& rule = QuadratureRule::gauss_legendre(64))
{
    std::vector<NumeratorValue> out;
    for (int l = l_first; l <= l_last; ++l) {
        const double k = separation_constant(ctx, l);
        try {
            out.push_back({l, k, rayleigh_numerator(profile, ctx, l, tau, rule), true});
        } catch (const convergence_error&) {
            out.push_back({l, k, std::numeric_limits<double>::infinity(), false});
        }
    }
    return out;
}

inline bool strictly_increasing(const std::vector<NumeratorValue>& values)
{
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1].value < values[i].value)) {
            return false;
        }
    }
    return true;
}

/// Relative residuals of one mode. All fields are nonnegative.
struct ResidualReport {
    double m_residual = 0.0;
    double v_residual = 0.0;
    double pde_residual = 0.0;
    double rayleigh_gap = 0.0;
};

struct VerificationGates {
    double boundary = 1e-8;
    double pde = 1e-8;
    double rayleigh = 1e-7;

    bool passes(const ResidualReport& rep) const noexcept
    {
        return rep.m_residual <= boundary && rep.v_residual <= boundary && rep.pde_residual <= pde &&
               rep.rayleigh_gap <= rayleigh;
    }
};

/// M and V boundary residuals at r = R, each relative to the largest term entering it.
/// V uses Δ j_l(ar)Y = −a² j_l(ar)Y and Δ i_l(br)Y = b² i_l(br)Y, so no third derivatives appear.
inline ResidualReport boundary_residuals(const DimensionContext& ctx, const ModeParams& mode,
                                         const SeriesPolicy& policy = {})
{
    ResidualReport rep;
    if (mode.a == 0.0) {
        return rep;
    }
    const double a = mode.a;
    const double b = mode.b;
    const double g = mode.gamma_scaled;
    const double tau = b * b - a * a;
    const double k = separation_constant(ctx, mode.l);
    const int l = mode.l;

    const double j0 = ultra_j(ctx, l, a, policy);
    const double j1 = ultra_j_deriv(ctx, l, a, 1, policy);
    const double j2 = ultra_j_deriv(ctx, l, a, 2, policy);
    const double i0 = ultra_i_scaled(ctx, l, b, 0, policy);
    const double i1 = ultra_i_scaled(ctx, l, b, 1, policy);
    const double i2 = ultra_i_scaled(ctx, l, b, 2, policy);

    const double mj = a * a * j2;
    const double mi = g * b * b * i2;
    const double m_scale = std::max(std::abs(mj), std::abs(mi));
    rep.m_residual = m_scale > 0.0 ? std::abs(mj + mi) / m_scale : 0.0;

    const double vj_terms[] = {tau * a * j1, k * a * j1, -k * j0, a * a * a * j1};
    const double vi_terms[] = {g * tau * b * i1, g * k * b * i1, -g * k * i0, -g * b * b * b * i1};
    double v_sum = 0.0;
    double v_scale = 0.0;
    for (double t : vj_terms) {
        v_sum += t;
        v_scale = std::max(v_scale, std::abs(t));
    }
    for (double t : vi_terms) {
        v_sum += t;
        v_scale = std::max(v_scale, std::abs(t));
    }
    rep.v_residual = v_scale > 0.0 ? std::abs(v_sum) / v_scale : 0.0;
    return rep;
}

/// Uniform sample grid on [lo, hi] (unit-ball radial coordinate).
inline std::vector<double> radial_grid(double lo = 0.05, double hi = 1.0, int n = 200)
{
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
        r[i] = lo + (hi - lo) * i / (n - 1);
    }
    return r;
}

/// sup over the grid of |Δ²R − τΔR − ωR| / (ω|R| + 1e-3·ω·max|R|), with Δ the radial
/// Laplacian of order l on the unit ball. For ω = 0 the denominator is max|R|.
inline double pde_residual(const DimensionContext& ctx, const ModeParams& mode, const std::vector<double>& grid,
                           const SeriesPolicy& policy = {})
{
    const RadialProfile profile(ctx, mode, 1.0, policy);
    const double d = ctx.d();
    const double k = separation_constant(ctx, mode.l);
    const double tau = mode.b * mode.b - mode.a * mode.a;
    const double omega = mode.a * mode.a * mode.b * mode.b;

    std::vector<double> residual;
    std::vector<double> magnitude;
    double r_max = 0.0;
    for (double r : grid) {
        if (!(r > 0.0) || r > 1.0) {
            throw domain_error("pde_residual grid must lie in (0, 1]");
        }
        double R[5];
        for (int m = 0; m <= 4; ++m) {
            R[m] = profile.derivative(r, m);
        }
        const double r2 = r * r;
        const double r3 = r2 * r;
        const double r4 = r2 * r2;
        const double g = R[2] + (d - 1.0) * R[1] / r - k * R[0] / r2;
        const double g1 = R[3] + (d - 1.0) * (R[2] / r - R[1] / r2) - k * (R[1] / r2 - 2.0 * R[0] / r3);
        const double g2 = R[4] + (d - 1.0) * (R[3] / r - 2.0 * R[2] / r2 + 2.0 * R[1] / r3) -
                          k * (R[2] / r2 - 4.0 * R[1] / r3 + 6.0 * R[0] / r4);
        const double bilap = g2 + (d - 1.0) * g1 / r - k * g / r2;
        residual.push_back(std::abs(bilap - tau * g - omega * R[0]));
        magnitude.push_back(std::abs(R[0]));
        r_max = std::max(r_max, std::abs(R[0]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < residual.size(); ++i) {
        const double denom = omega > 0.0 ? omega * magnitude[i] + 1e-3 * omega * r_max : r_max;
        if (denom > 0.0) {
            worst = std::max(worst, residual[i] / denom);
        }
    }
    return worst;
}

/// All four residuals for a mode on B(radius).
inline ResidualReport residual_report(const DimensionContext& ctx, const ModeParams& mode, double radius,
                                      const QuadratureRule& rule = QuadratureRule::gauss_legendre(64),
                                      const SeriesPolicy& policy = {})
{
    ResidualReport rep = boundary_residuals(ctx, mode, policy);
    rep.pde_residual = pde_residual(ctx, mode, radial_grid(), policy);
    const double q = rayleigh_quotient(ctx, mode, radius, rule, policy);
    rep.rayleigh_gap = mode.omega > 0.0 ? std::abs(q - mode.omega) / mode.omega : std::abs(q);
    return rep;
}

struct LemmaVerdict {
    std::string name;
    bool passed;
    /// Smallest normalized margin seen (positive means the inequality held with room to spare).
    double worst_margin;
    double worst_z;
};

struct LemmaOptions {
    int grid = 1000;
    std::vector<double> taus{0.1, 1.0, 10.0, 100.0};
    SeriesPolicy policy;
};

/// Strict inequalities must hold with at least this normalized margin.
inline constexpr double strict_margin = 1e-12;

namespace detail {

/// Points z_i = hi * i / n, i = first..last.
template <class F>
LemmaVerdict grid_check(std::string name, double hi, int n, int first, int last, double tolerance, F&& margin)
{
    LemmaVerdict v{std::move(name), true, std::numeric_limits<double>::infinity(), 0.0};
    for (int i = first; i <= last; ++i) {
        const double z = hi * i / n;
        const double m = margin(z);
        if (m < v.worst_margin) {
            v.worst_margin = m;
            v.worst_z = z;
        }
        if (!(m > tolerance)) {
            v.passed = false;
        }
    }
    return v;
}

} // namespace detail

/// Grid verification of the sign and bound facts about j_l, i_l used to identify the
/// fundamental mode. Margins are normalized by the matching i_l quantity so they are
/// comparable across dimensions; strict inequalities need margin > 1e-12, the non-strict
/// series bounds allow -1e-13 of rounding.
inline std::vector<LemmaVerdict> lemma_suite(const DimensionContext& ctx, const LemmaOptions& opt = {})
{
    const SeriesPolicy& pol = opt.policy;
    const int n = opt.grid;
    const double d = ctx.d();
    const double p = p11(ctx, pol);
    std::vector<LemmaVerdict> out;

    {
        const double p2 = p * p;
        const double margin = std::min(p2 - d, d + 2.0 - p2);
        out.push_back({"p11_bracket", margin > strict_margin, margin, p});
    }
    {
        const int l_top = ctx.d() == 2 ? 1 : 3;
        LemmaVerdict v{"first_zero_bracket", true, std::numeric_limits<double>::infinity(), 0.0};
        for (int l = 1; l <= l_top; ++l) {
            const ZeroBracket br = pl1_bracket(ctx, l);
            auto rel = [&](double z) { return ultra_j_deriv(ctx, l, z, 1, pol) / ultra_i_deriv(ctx, l, z, 1, pol); };
            auto below = detail::grid_check("", br.lo, n, 1, n, strict_margin, rel);
            const double after = -rel(br.hi);
            for (auto [m, z] : {std::pair{below.worst_margin, below.worst_z}, std::pair{after, br.hi}}) {
                if (m < v.worst_margin) {
                    v.worst_margin = m;
                    v.worst_z = z;
                }
            }
            v.passed = v.passed && below.passed && after > strict_margin;
        }
        out.push_back(v);
    }
    {
        LemmaVerdict v{"j_l_positive_l1to5", true, std::numeric_limits<double>::infinity(), 0.0};
        for (int l = 1; l <= 5; ++l) {
            auto c = detail::grid_check("", p, n, 1, n, strict_margin,
                                        [&](double z) { return ultra_j(ctx, l, z, pol) / ultra_i(ctx, l, z, pol); });
            if (c.worst_margin < v.worst_margin) {
                v.worst_margin = c.worst_margin;
                v.worst_z = c.worst_z;
            }
            v.passed = v.passed && c.passed;
        }
        out.push_back(v);
    }
    auto signed_ratio = [&](int l, int m, double sign) {
        return [&, l, m, sign](double z) {
            return sign * ultra_j_deriv(ctx, l, z, m, pol) / ultra_i_deriv(ctx, l, z, m, pol);
        };
    };
    out.push_back(detail::grid_check("j1_prime_positive", p, n, 1, n - 1, strict_margin, signed_ratio(1, 1, 1.0)));
    out.push_back(detail::grid_check("j2_prime_positive", p, n, 1, n, strict_margin, signed_ratio(2, 1, 1.0)));
    out.push_back(detail::grid_check("j1_second_negative", p, n, 1, n, strict_margin, signed_ratio(1, 2, -1.0)));
    out.push_back(detail::grid_check("j1_fourth_positive", p, n, 1, n, strict_margin, signed_ratio(1, 4, 1.0)));

    {
        LemmaVerdict v{"derivative_domination", true, std::numeric_limits<double>::infinity(), 0.0};
        const double hi = 3.0 * p;
        for (int l = 0; l <= 5; ++l) {
            for (int m = 0; m <= 4; ++m) {
                if (std::abs(ultra_j_deriv(ctx, l, 0.0, m, pol)) > ultra_i_deriv(ctx, l, 0.0, m, pol)) {
                    v.passed = false;
                }
                auto c = detail::grid_check("", hi, n, 1, n, strict_margin, [&](double z) {
                    const double iv = ultra_i_deriv(ctx, l, z, m, pol);
                    return (iv - std::abs(ultra_j_deriv(ctx, l, z, m, pol))) / iv;
                });
                if (c.worst_margin < v.worst_margin) {
                    v.worst_margin = c.worst_margin;
                    v.worst_z = c.worst_z;
                }
                v.passed = v.passed && c.passed;
            }
        }
        out.push_back(v);
    }

    const SeriesCoefficients sc = series_coeffs(ctx, 40);
    {
        bool decreasing = true;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < sc.c.size(); ++i) {
            decreasing = decreasing && sc.c[i] < sc.c[i - 1];
            worst = std::min(worst, (sc.c[i - 1] - sc.c[i]) / sc.c[i - 1]);
        }
        auto agree = detail::grid_check("", 2.0 * p, n, 1, n, -1e-12, [&](double z) {
            double sum = 0.0;
            for (int k = static_cast<int>(sc.d.size()); k >= 1; --k) {
                sum += ((k % 2) ? -1.0 : 1.0) * sc.d[k - 1] * std::pow(z, 2 * k - 1);
            }
            return -std::abs(sum - ultra_j_deriv(ctx, 1, z, 2, pol)) / ultra_i_deriv(ctx, 1, z, 2, pol);
        });
        out.push_back({"series_coefficients", decreasing && agree.passed, std::min(worst, agree.worst_margin),
                       agree.worst_z});
    }
    {
        const double hi = std::sqrt(3.0 * (d + 2.0) / (d + 5.0));
        const double d1 = sc.d[0];
        const double d2 = sc.d[1];
        out.push_back(detail::grid_check("j1_second_upper_bound", hi, n, 1, n, -1e-13, [&](double z) {
            return (-d1 * z + d2 * z * z * z - ultra_j_deriv(ctx, 1, z, 2, pol)) / ultra_i_deriv(ctx, 1, z, 2, pol);
        }));
        out.push_back(detail::grid_check("i1_second_upper_bound", std::sqrt(3.0), n, 1, n, -1e-13, [&](double z) {
            return (d1 * z + 1.2 * d2 * z * z * z - ultra_i_deriv(ctx, 1, z, 2, pol)) /
                   ultra_i_deriv(ctx, 1, z, 2, pol);
        }));
    }
    {
        LemmaVerdict w0{"w0_positive", true, std::numeric_limits<double>::infinity(), 0.0};
        LemmaVerdict w1{"w1_sign_change", true, std::numeric_limits<double>::infinity(), 0.0};
        for (double tau : opt.taus) {
            auto c = detail::grid_check("", p, n, 1, n - 1, strict_margin, [&](double a) {
                const DeterminantTerms t = determinant_terms(ctx, 0, tau, a, pol);
                return t.value() / (std::abs(t.first) + std::abs(t.second));
            });
            if (c.worst_margin < w0.worst_margin) {
                w0.worst_margin = c.worst_margin;
                w0.worst_z = c.worst_z;
            }
            w0.passed = w0.passed && c.passed;

            const double a_small = p / n;
            const DeterminantTerms lo = determinant_terms(ctx, 1, tau, a_small, pol);
            const DeterminantTerms hi = determinant_terms(ctx, 1, tau, p, pol);
            const double m_lo = -lo.value() / (std::abs(lo.first) + std::abs(lo.second));
            const double m_hi = hi.value() / (std::abs(hi.first) + std::abs(hi.second));
            for (auto [m, z] : {std::pair{m_lo, a_small}, std::pair{m_hi, p}}) {
                if (m < w1.worst_margin) {
                    w1.worst_margin = m;
                    w1.worst_z = z;
                }
                w1.passed = w1.passed && m > strict_margin;
            }
        }
        out.push_back(w0);
        out.push_back(w1);
    }
    return out;
}

inline bool all_passed(const std::vector<LemmaVerdict>& verdicts)
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const LemmaVerdict& v) { return v.passed; });
}

} // namespace freeplate
