#pragma once

/// \file spectrum.hpp
///
/// Eigenvalues of  Δ²u − τΔu = ωu  on the ball B(R) under free boundary conditions.
///
/// All root finding happens on the unit ball with tension τ_u = R²τ. A root a of the
/// determinant W_l gives b = sqrt(a² + τ_u) and the physical eigenvalue ω = a²b²/R⁴.
/// The i_l factors of W_l are evaluated with e^{-b} factored out; every additive term
/// of W_l carries exactly one i-type factor, so the scaling leaves roots and signs
/// untouched and large tensions do not overflow.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bessel.hpp"
#include "errors.hpp"
#include "roots.hpp"

namespace freeplate {

/// Physical instance: dimension, tension ratio τ > 0 and ball radius R > 0.
struct PlateProblem {
    DimensionContext dim;
    double tau;
    double radius;

    PlateProblem(DimensionContext d, double tension, double ball_radius = 1.0)
        : dim(d), tau(tension), radius(ball_radius)
    {
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw domain_error("tension must satisfy tau > 0 (zero and negative tension are not supported)");
        }
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw domain_error("radius must be > 0");
        }
    }

    /// Tension of the equivalent unit-ball problem.
    double unit_tension() const noexcept { return radius * radius * tau; }
};

/// One eigenvalue of angular order l with its unit-ball wavenumbers.
///
/// gamma_scaled = gamma * e^{b}; gamma itself may underflow for very large b, so
/// evaluators use gamma_scaled together with e^{-b}-scaled i_l.
struct ModeParams {
    int l = 0;
    double a = 0.0;
    double b = 0.0;
    double gamma = 0.0;
    double gamma_scaled = 0.0;
    double omega = 0.0;
};

struct RootScanConfig {
    double a_max;
    double step;
    double root_tol;

    void validate() const
    {
        if (!(a_max > 0.0) || !(step > 0.0) || !(root_tol > 0.0)) {
            throw domain_error("root scan: a_max, step and root_tol must be positive");
        }
        if (!(step < a_max)) {
            throw domain_error("root scan: step must be smaller than a_max");
        }
        if (root_tol > 1e-10 * a_max) {
            throw domain_error("root scan: root_tol must be <= 1e-10 * a_max");
        }
    }

    /// Grid spacing min(0.05, p11/50) and root tolerance 1e-12 (tightened for tiny a_max).
    static RootScanConfig defaults(const DimensionContext& ctx, double a_max, const SeriesPolicy& policy = {})
    {
        return {a_max, std::min(0.05, p11(ctx, policy) / 50.0), std::min(1e-12, 1e-10 * a_max)};
    }
};

/// (a, b) with b² − a² = τ and a²b² = ω.
inline std::pair<double, double> split_omega(double tau, double omega)
{
    if (!(tau > 0.0) || !(omega > 0.0)) {
        throw domain_error("split_omega needs tau > 0 and omega > 0");
    }
    const double h = 0.5 * tau;
    const double root = std::sqrt(h * h + omega);
    const double a2 = omega / (root + h);
    return {std::sqrt(a2), std::sqrt(root + h)};
}

/// ω = a²(a² + τ); strictly increasing in a for τ > 0.
inline double omega_of(double a, double tau)
{
    if (!(a > 0.0) || !(tau > 0.0)) {
        throw domain_error("omega_of needs a > 0 and tau > 0");
    }
    const double a2 = a * a;
    return a2 * (a2 + tau);
}

struct Coupling {
    double gamma;
    double gamma_scaled;
};

/// γ = −a² j_l''(a) / (b² i_l''(b)), which enforces u_rr = 0 on the boundary.
inline Coupling coupling(const DimensionContext& ctx, int l, double a, double b, const SeriesPolicy& policy = {})
{
    if (!(b > 0.0)) {
        throw domain_error("coupling constant needs b > 0");
    }
    if (!(a >= 0.0)) {
        throw domain_error("coupling constant needs a >= 0");
    }
    const double num = -a * a * ultra_j_deriv(ctx, l, a, 2, policy);
    const double den_scaled = b * b * ultra_i_scaled(ctx, l, b, 2, policy);
    const double gs = num / den_scaled;
    return {gs * std::exp(-b), gs};
}

inline double gamma_of(const DimensionContext& ctx, int l, double a, double b, const SeriesPolicy& policy = {})
{
    return coupling(ctx, l, a, b, policy).gamma;
}

enum class IScaling { scaled, unscaled };

/// The two products whose difference is W_l(a):
///   first  = a² j''(a) (−a² b i'(b) + k (b i'(b) − i(b)))
///   second = b² i''(b) (a b² j'(a) + k (a j'(a) − j(a)))
struct DeterminantTerms {
    double first;
    double second;

    double value() const noexcept { return first - second; }
    double relative_residual() const noexcept
    {
        const double scale = std::abs(first) + std::abs(second);
        return scale > 0.0 ? std::abs(first - second) / scale : 0.0;
    }
};

inline DeterminantTerms determinant_terms(const DimensionContext& ctx, int l, double tau, double a,
                                          const SeriesPolicy& policy = {}, IScaling scaling = IScaling::scaled)
{
    if (!(a > 0.0) || !(tau > 0.0)) {
        throw domain_error("determinant needs a > 0 and tau > 0");
    }
    const double b = std::sqrt(a * a + tau);
    const double k = separation_constant(ctx, l);
    const double j0 = ultra_j_deriv(ctx, l, a, 0, policy);
    const double j1 = ultra_j_deriv(ctx, l, a, 1, policy);
    const double j2 = ultra_j_deriv(ctx, l, a, 2, policy);
    auto ib = [&](int m) {
        return scaling == IScaling::scaled ? ultra_i_scaled(ctx, l, b, m, policy) : ultra_i_deriv(ctx, l, b, m, policy);
    };
    const double i0 = ib(0);
    const double i1 = ib(1);
    const double i2 = ib(2);
    const double first = a * a * j2 * (-a * a * b * i1 + k * (b * i1 - i0));
    const double second = b * b * i2 * (a * b * b * j1 + k * (a * j1 - j0));
    return {first, second};
}

/// e^{-b} W_l(a) with b = sqrt(a² + τ). Zero exactly when a²(a²+τ) is an eigenvalue of order l.
inline double W(const DimensionContext& ctx, int l, double tau, double a, const SeriesPolicy& policy = {})
{
    return determinant_terms(ctx, l, tau, a, policy).value();
}

/// Sign-change roots of a -> W_l(a) on (0, a_max], each refined by bisection.
/// A tangential (double) root produces no sign change and is not reported.
inline std::vector<double> scan_roots(const DimensionContext& ctx, int l, double tau, const RootScanConfig& cfg,
                                      const SeriesPolicy& policy = {})
{
    cfg.validate();
    auto f = [&](double a) { return W(ctx, l, tau, a, policy); };
    std::vector<double> roots;
    const auto n = static_cast<long>(std::ceil(cfg.a_max / cfg.step - 1e-9));
    double prev_a = std::min(cfg.step, cfg.a_max);
    double prev_w = f(prev_a);
    if (prev_w == 0.0) {
        roots.push_back(prev_a);
    }
    for (long i = 2; i <= n; ++i) {
        const double a = std::min(static_cast<double>(i) * cfg.step, cfg.a_max);
        const double w = f(a);
        if (w == 0.0) {
            roots.push_back(a);
        } else if (prev_w != 0.0 && std::signbit(w) != std::signbit(prev_w)) {
            roots.push_back(bisect(f, prev_a, a, cfg.root_tol));
        }
        prev_a = a;
        prev_w = w;
    }
    return roots;
}

/// Dimension of the space of degree-l spherical harmonics on S^{d-1}.
inline long long harmonic_multiplicity(const DimensionContext& ctx, int l)
{
    const int d = ctx.d();
    if (l == 0) {
        return 1;
    }
    if (d == 2) {
        return 2;
    }
    // (2l+d-2)/(l+d-2) * C(l+d-2, l)
    long long binom = 1;
    for (int i = 1; i <= l; ++i) {
        binom = binom * (d - 2 + i) / i;
    }
    return binom * (2LL * l + d - 2) / (l + d - 2);
}

/// Mode parameters for a unit-ball root a with unit tension tau_unit, rescaled to radius R.
inline ModeParams mode_from_root(const DimensionContext& ctx, int l, double a, double tau_unit, double radius,
                                 const SeriesPolicy& policy = {})
{
    const double b = std::sqrt(a * a + tau_unit);
    const Coupling g = coupling(ctx, l, a, b, policy);
    const double r2 = radius * radius;
    return {l, a, b, g.gamma, g.gamma_scaled, a * a * b * b / (r2 * r2)};
}

/// The ω = 0 constant mode, represented with a = 0 so R_0(r) = j_0(0).
inline ModeParams constant_mode(const PlateProblem& problem)
{
    return {0, 0.0, std::sqrt(problem.unit_tension()), 0.0, 0.0, 0.0};
}

/// Re-express a unit-ball solution (tension R²τ) on B(R): same (l, a, b, γ), ω = a²b²/R⁴.
inline ModeParams rescale(const ModeParams& unit_solution, const PlateProblem& problem)
{
    const double tau_unit = problem.unit_tension();
    if (unit_solution.omega != 0.0) {
        const double mismatch = unit_solution.b * unit_solution.b - unit_solution.a * unit_solution.a - tau_unit;
        if (std::abs(mismatch) > 1e-9 * tau_unit) {
            std::ostringstream os;
            os.precision(17);
            os << "rescale: unit solution has tension " << unit_solution.b * unit_solution.b - unit_solution.a * unit_solution.a
               << ", expected R^2 tau = " << tau_unit;
            throw domain_error(os.str());
        }
    }
    ModeParams out = unit_solution;
    const double r2 = problem.radius * problem.radius;
    out.omega = unit_solution.a * unit_solution.a * unit_solution.b * unit_solution.b / (r2 * r2);
    return out;
}

struct SpectrumEntry {
    double omega;
    int l;
    long long multiplicity;
    ModeParams mode;
    double w_residual;
};

/// Sorted eigenvalues plus the scan settings that produced them.
///
/// Completeness only holds below `complete_below` and for orders l <= l_max;
/// `next_order_clear` records whether order l_max+1 has no eigenvalue below the
/// last reported entry.
struct SpectrumTable {
    std::vector<SpectrumEntry> entries;
    PlateProblem problem;
    RootScanConfig scan;
    int l_max;
    double complete_below;
    bool next_order_clear;
    bool ceiling_capped;
};

struct EigenOptions {
    /// Fixed scan; when empty the ceiling grows until the count-th eigenvalue is covered.
    std::optional<RootScanConfig> scan;
    int jobs = 1;
    SeriesPolicy policy;
};

namespace detail {

inline std::vector<std::vector<double>> roots_by_order(const DimensionContext& ctx, int l_max, double tau,
                                                       const RootScanConfig& cfg, const EigenOptions& opt)
{
    std::vector<std::vector<double>> out(l_max + 1);
    if (opt.jobs <= 1) {
        for (int l = 0; l <= l_max; ++l) {
            out[l] = scan_roots(ctx, l, tau, cfg, opt.policy);
        }
        return out;
    }
    for (int start = 0; start <= l_max; start += opt.jobs) {
        std::vector<std::future<std::vector<double>>> batch;
        for (int l = start; l <= std::min(l_max, start + opt.jobs - 1); ++l) {
            batch.push_back(std::async(std::launch::async,
                                       [&, l] { return scan_roots(ctx, l, tau, cfg, opt.policy); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            out[start + static_cast<int>(i)] = batch[i].get();
        }
    }
    return out;
}

} // namespace detail

/// The first `count` eigenvalues (including ω₀ = 0) over orders l = 0..l_max.
inline SpectrumTable eigenvalues(const PlateProblem& problem, int l_max, int count, const EigenOptions& opt = {})
{
    if (l_max < 1 || count < 1) {
        throw domain_error("eigenvalues needs l_max >= 1 and count >= 1");
    }
    const DimensionContext& ctx = problem.dim;
    const double tau_u = problem.unit_tension();
    const double r4 = std::pow(problem.radius, 4);
    const double ceiling = opt.policy.max_unscaled_z;

    RootScanConfig cfg = opt.scan ? *opt.scan : RootScanConfig::defaults(ctx, p11(ctx, opt.policy) + 2.0, opt.policy);
    std::vector<SpectrumEntry> entries;
    bool capped = false;
    for (;;) {
        const auto roots = detail::roots_by_order(ctx, l_max, tau_u, cfg, opt);
        entries.clear();
        entries.push_back({0.0, 0, 1, constant_mode(problem), 0.0});
        for (int l = 0; l <= l_max; ++l) {
            for (double a : roots[l]) {
                const ModeParams m = mode_from_root(ctx, l, a, tau_u, problem.radius, opt.policy);
                const double res = determinant_terms(ctx, l, tau_u, a, opt.policy).relative_residual();
                entries.push_back({m.omega, l, harmonic_multiplicity(ctx, l), m, res});
            }
        }
        std::stable_sort(entries.begin(), entries.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
            return x.omega < y.omega || (x.omega == y.omega && x.l < y.l);
        });
        if (opt.scan) {
            break;
        }
        const double covered = omega_of(cfg.a_max, tau_u) / r4;
        if (static_cast<int>(entries.size()) >= count) {
            double spacing = 0.0;
            for (int i = 1; i < count; ++i) {
                spacing = std::max(spacing, entries[i].omega - entries[i - 1].omega);
            }
            if (covered >= entries[count - 1].omega + count * spacing) {
                break;
            }
        }
        if (cfg.a_max >= ceiling) {
            capped = true;
            break;
        }
        cfg = RootScanConfig::defaults(ctx, std::min(ceiling, 1.5 * cfg.a_max), opt.policy);
    }
    if (static_cast<int>(entries.size()) > count) {
        entries.resize(count);
    }

    bool next_clear = true;
    const auto next_roots = scan_roots(ctx, l_max + 1, tau_u, cfg, opt.policy);
    if (!next_roots.empty()) {
        const double next_omega = omega_of(next_roots.front(), tau_u) / r4;
        next_clear = next_omega > entries.back().omega;
    }
    return {std::move(entries), problem, cfg, l_max, omega_of(cfg.a_max, tau_u) / r4, next_clear, capped};
}

/// Outcome of locating the fundamental tone, with the cross-checks that pin it to l = 1.
struct FundamentalReport {
    ModeParams mode;
    double p11;
    /// W_1 < 0 just above a = 0 and W_1(p11) > 0.
    bool w1_sign_change;
    /// W_0 has no root in (0, a_1].
    bool no_radial_root_below;
    /// W_l has no root in (0, a_1] for l = 2..l_guard.
    bool higher_orders_above;
    int l_guard;

    bool all_passed() const noexcept { return w1_sign_change && no_radial_root_below && higher_orders_above; }
};

inline FundamentalReport fundamental_report(const PlateProblem& problem, int l_guard = 6, const SeriesPolicy& policy = {})
{
    const DimensionContext& ctx = problem.dim;
    const double tau_u = problem.unit_tension();
    const double p = p11(ctx, policy);
    const RootScanConfig to_p11 = RootScanConfig::defaults(ctx, p, policy);

    const auto l1_roots = scan_roots(ctx, 1, tau_u, to_p11, policy);
    if (l1_roots.empty()) {
        throw invariant_error("fundamental: W_1 has no root in (0, p11]");
    }
    const double a1 = l1_roots.front();

    FundamentalReport rep{};
    rep.p11 = p;
    rep.l_guard = l_guard;
    rep.w1_sign_change = W(ctx, 1, tau_u, to_p11.step, policy) < 0.0 && W(ctx, 1, tau_u, p, policy) > 0.0;

    const RootScanConfig below = RootScanConfig::defaults(ctx, a1, policy);
    rep.no_radial_root_below = scan_roots(ctx, 0, tau_u, below, policy).empty();
    rep.higher_orders_above = true;
    for (int l = 2; l <= l_guard; ++l) {
        if (!scan_roots(ctx, l, tau_u, below, policy).empty()) {
            rep.higher_orders_above = false;
        }
    }
    const ModeParams unit = mode_from_root(ctx, 1, a1, tau_u, 1.0, policy);
    rep.mode = rescale(unit, problem);
    return rep;
}

/// Mode parameters of the fundamental tone ω₁. Throws invariant_error if any cross-check fails.
inline ModeParams fundamental(const PlateProblem& problem, int l_guard = 6, const SeriesPolicy& policy = {})
{
    const FundamentalReport rep = fundamental_report(problem, l_guard, policy);
    if (!rep.all_passed()) {
        throw invariant_error("fundamental: l = 1 cross-checks failed");
    }
    return rep.mode;
}

} // namespace freeplate
