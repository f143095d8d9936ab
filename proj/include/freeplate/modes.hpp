#pragma once

/// \file modes.hpp
///
/// Eigenfunctions u(r, θ̂) = R_l(r) Y_l(θ̂) with R_l(r) = j_l(a r/R) + γ i_l(b r/R).
/// The overall scale follows the convention that the j_l coefficient is +1.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "spectrum.hpp"

namespace freeplate {

/// Radial part of a mode on [0, R], with derivatives up to fourth order.
class RadialProfile {
  public:
    RadialProfile(DimensionContext ctx, ModeParams mode, double radius, SeriesPolicy policy = {})
        : ctx_(ctx), mode_(mode), radius_(radius), policy_(policy)
    {
        if (!(radius > 0.0)) {
            throw domain_error("radial profile needs radius > 0");
        }
    }

    const DimensionContext& dim() const noexcept { return ctx_; }
    const ModeParams& mode() const noexcept { return mode_; }
    double radius() const noexcept { return radius_; }
    int l() const noexcept { return mode_.l; }

    double operator()(double r) const { return derivative(r, 0); }

    /// m-th derivative in r, m in 0..4.
    double derivative(double r, int m) const
    {
        const double x = unit_coordinate(r);
        double value = 0.0;
        if (mode_.a > 0.0) {
            value += std::pow(mode_.a / radius_, m) * ultra_j_deriv(ctx_, mode_.l, mode_.a * x, m, policy_);
        } else if (m == 0) {
            value += ultra_j(ctx_, mode_.l, 0.0, policy_);
        }
        if (mode_.gamma_scaled != 0.0) {
            const double w = mode_.b * x;
            value += mode_.gamma_scaled * std::pow(mode_.b / radius_, m) * std::exp(w - mode_.b) *
                     ultra_i_scaled(ctx_, mode_.l, w, m, policy_);
        }
        return value;
    }

    /// d/dr (R(r)/r) for r > 0, formed from j_{l+1}(z)/z and i_{l+1}(z)/z so that the
    /// leading-order cancellation for l = 1 never happens in floating point.
    double reduced_slope(double r) const
    {
        if (!(r > 0.0)) {
            throw domain_error("reduced_slope needs r > 0");
        }
        const double x = unit_coordinate(r);
        const int l = mode_.l;
        double slope = 0.0; // d/dx [(j(ax) + γ i(bx)) / x]
        if (mode_.a > 0.0) {
            const double z = mode_.a * x;
            const double jl = ultra_j(ctx_, l, z, policy_);
            const double jn = ultra_j(ctx_, l + 1, z, policy_);
            slope += mode_.a * mode_.a * ((l - 1) * jl / (z * z) - jn / z);
        } else {
            slope -= ultra_j(ctx_, l, 0.0, policy_) / (x * x);
        }
        if (mode_.gamma_scaled != 0.0) {
            const double w = mode_.b * x;
            const double il = ultra_i_scaled(ctx_, l, w, 0, policy_);
            const double in = ultra_i_scaled(ctx_, l + 1, w, 0, policy_);
            slope += mode_.gamma_scaled * std::exp(w - mode_.b) * mode_.b * mode_.b *
                     ((l - 1) * il / (w * w) + in / w);
        }
        return slope / (radius_ * radius_);
    }

  private:
    double unit_coordinate(double r) const
    {
        if (!(r >= 0.0) || r > radius_ * (1.0 + 1e-12)) {
            throw domain_error("radial coordinate outside [0, R]: r = " + std::to_string(r));
        }
        return std::min(r / radius_, 1.0);
    }

    DimensionContext ctx_;
    ModeParams mode_;
    double radius_;
    SeriesPolicy policy_;
};

inline RadialProfile radial_profile(const DimensionContext& ctx, const ModeParams& mode, double radius,
                                    const SeriesPolicy& policy = {})
{
    return RadialProfile(ctx, mode, radius, policy);
}

/// Which real harmonic of degree l an AngularFactor represents.
///   d = 2: cosine / sine (cos lθ, sin lθ)
///   d = 3: real_order with m in -l..l (m > 0 cosine-type, m < 0 sine-type), or zonal (m = 0)
///   d >= 4: zonal only
enum class AngularVariant { cosine, sine, real_order, zonal };

namespace detail {

/// Associated Legendre P_l^m(x), m >= 0, without the Condon-Shortley phase.
inline double assoc_legendre(int l, int m, double x)
{
    double pmm = 1.0;
    const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    for (int i = 1; i <= m; ++i) {
        pmm *= (2.0 * i - 1.0) * somx2;
    }
    if (l == m) {
        return pmm;
    }
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) {
        return pmmp1;
    }
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

/// Gegenbauer polynomial C_n^{(lambda)}(x).
inline double gegenbauer(int n, double lambda, double x)
{
    if (n == 0) {
        return 1.0;
    }
    double c0 = 1.0;
    double c1 = 2.0 * lambda * x;
    for (int k = 2; k <= n; ++k) {
        const double ck = (2.0 * x * (k + lambda - 1.0) * c1 - (k + 2.0 * lambda - 2.0) * c0) / k;
        c0 = c1;
        c1 = ck;
    }
    return c1;
}

/// Surface area of the unit sphere S^{n} in R^{n+1}.
inline double sphere_area(int n)
{
    const double h = 0.5 * (n + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

inline double sh_norm(int l, int m)
{
    double ratio = 1.0; // (l-m)!/(l+m)!
    for (int i = l - m + 1; i <= l + m; ++i) {
        ratio /= i;
    }
    return std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * ratio);
}

} // namespace detail

/// An L²(S^{d-1})-normalized real spherical harmonic of degree l.
struct AngularFactor {
    DimensionContext dim;
    int l;
    AngularVariant variant;
    int order;
    double norm;

    static AngularFactor make(const DimensionContext& ctx, int l, AngularVariant variant, int order = 0)
    {
        if (l < 0) {
            throw domain_error("harmonic degree must be >= 0");
        }
        const int d = ctx.d();
        const double pi = std::numbers::pi;
        if (d == 2) {
            if (variant == AngularVariant::zonal) {
                variant = AngularVariant::cosine;
            }
            if (variant == AngularVariant::real_order) {
                throw unsupported_error("d = 2 harmonics are selected as cosine or sine");
            }
            if (l == 0 && variant == AngularVariant::sine) {
                throw domain_error("sin(0*theta) vanishes identically; use the cosine variant for l = 0");
            }
            return {ctx, l, variant, 0, l == 0 ? 1.0 / std::sqrt(2.0 * pi) : 1.0 / std::sqrt(pi)};
        }
        if (d == 3) {
            if (variant == AngularVariant::zonal) {
                variant = AngularVariant::real_order;
                order = 0;
            }
            if (variant != AngularVariant::real_order) {
                throw unsupported_error("d = 3 harmonics are selected by order m in -l..l");
            }
            if (order < -l || order > l) {
                throw domain_error("harmonic order m must lie in -l..l");
            }
            const int am = order < 0 ? -order : order;
            const double n = detail::sh_norm(l, am) * (order == 0 ? 1.0 : std::sqrt(2.0));
            return {ctx, l, variant, order, n};
        }
        if (variant != AngularVariant::zonal) {
            throw unsupported_error("only zonal harmonics are available for d >= 4 (d = " + std::to_string(d) + ")");
        }
        // ||C_l(cos θ)||² over S^{d-1} = |S^{d-2}| ∫_0^π C_l(cos θ)² sin^{d-2}θ dθ
        const double lambda = ctx.s();
        const auto rule = QuadratureRule::gauss_legendre(64 + 2 * l, 0.0, pi);
        const double integral = rule.integrate([&](double t) {
            const double c = detail::gegenbauer(l, lambda, std::cos(t));
            return c * c * std::pow(std::sin(t), d - 2);
        });
        return {ctx, l, AngularVariant::zonal, 0, 1.0 / std::sqrt(detail::sphere_area(d - 2) * integral)};
    }
};

/// Cosine variant for d = 2, zonal for d >= 3.
inline AngularFactor default_angular(const DimensionContext& ctx, int l)
{
    return AngularFactor::make(ctx, l, ctx.d() == 2 ? AngularVariant::cosine : AngularVariant::zonal);
}

/// Angles: d = 2 {θ}; d = 3 {polar θ, azimuth φ}; d >= 4 {θ₁, ...} (zonal uses θ₁ only).
inline double angular_eval(const AngularFactor& f, std::span<const double> angles)
{
    if (angles.empty()) {
        throw domain_error("angular_eval needs at least one angle");
    }
    const double theta = angles[0];
    const int d = f.dim.d();
    if (d == 2) {
        if (f.l == 0) {
            return f.norm;
        }
        return f.norm * (f.variant == AngularVariant::sine ? std::sin(f.l * theta) : std::cos(f.l * theta));
    }
    if (d == 3) {
        const double phi = angles.size() > 1 ? angles[1] : 0.0;
        const int am = f.order < 0 ? -f.order : f.order;
        const double p = detail::assoc_legendre(f.l, am, std::cos(theta));
        if (f.order > 0) {
            return f.norm * p * std::cos(am * phi);
        }
        if (f.order < 0) {
            return f.norm * p * std::sin(am * phi);
        }
        return f.norm * p;
    }
    return f.norm * detail::gegenbauer(f.l, f.dim.s(), std::cos(theta));
}

/// Complex Y_l^m(θ, φ) for d = 3 in the Condon-Shortley convention. Provided for
/// interchange with codes that use complex harmonics; the library itself works with real ones.
inline std::complex<double> angular_eval_complex(int l, int m, double theta, double phi)
{
    if (l < 0 || m < -l || m > l) {
        throw domain_error("complex harmonic needs l >= 0 and |m| <= l");
    }
    const int am = m < 0 ? -m : m;
    const double mag = detail::sh_norm(l, am) * detail::assoc_legendre(l, am, std::cos(theta));
    const std::complex<double> ylm = ((am % 2) ? -mag : mag) * std::polar(1.0, am * phi);
    if (m >= 0) {
        return ylm;
    }
    return ((am % 2) ? -1.0 : 1.0) * std::conj(ylm);
}

struct GridSpec {
    int nr = 32;
    int ntheta = 64;
    /// Defaults to default_angular(dim, l).
    std::optional<AngularFactor> angular;
};

/// u sampled on the tensor grid r_i = R i/(nr-1), θ_j. For d = 2 θ_j = 2πj/ntheta
/// (periodic); for d >= 3 θ_j = πj/(ntheta-1) is the polar angle with all other angles 0.
struct ModeGrid {
    std::vector<double> r;
    std::vector<double> theta;
    std::vector<std::vector<double>> values; // values[i][j] = u(r_i, θ_j)
    ModeParams mode;
    double radius;
    AngularFactor angular;
};

inline ModeGrid sample_mode(const DimensionContext& ctx, const ModeParams& mode, double radius, const GridSpec& spec,
                            const SeriesPolicy& policy = {})
{
    if (spec.nr < 2 || spec.ntheta < 2) {
        throw domain_error("mode grid needs at least 2 nodes per axis");
    }
    const AngularFactor ang = spec.angular ? *spec.angular : default_angular(ctx, mode.l);
    if (ang.l != mode.l) {
        throw domain_error("angular factor degree does not match the mode order");
    }
    const RadialProfile profile(ctx, mode, radius, policy);
    ModeGrid grid{{}, {}, {}, mode, radius, ang};
    grid.r.reserve(spec.nr);
    for (int i = 0; i < spec.nr; ++i) {
        grid.r.push_back(i == spec.nr - 1 ? radius : radius * i / (spec.nr - 1));
    }
    const bool periodic = ctx.d() == 2;
    for (int j = 0; j < spec.ntheta; ++j) {
        grid.theta.push_back(periodic ? 2.0 * std::numbers::pi * j / spec.ntheta
                                      : std::numbers::pi * j / (spec.ntheta - 1));
    }
    std::vector<double> y(spec.ntheta);
    std::vector<double> angles(std::max(1, ctx.d() - 1), 0.0);
    for (int j = 0; j < spec.ntheta; ++j) {
        angles[0] = grid.theta[j];
        y[j] = angular_eval(ang, angles);
    }
    grid.values.assign(spec.nr, std::vector<double>(spec.ntheta));
    for (int i = 0; i < spec.nr; ++i) {
        const double radial = profile(grid.r[i]);
        for (int j = 0; j < spec.ntheta; ++j) {
            grid.values[i][j] = radial * y[j];
        }
    }
    return grid;
}

} // namespace freeplate
