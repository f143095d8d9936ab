#pragma once

/// \file bessel.hpp
///
/// Ultraspherical Bessel functions of the first kind,
///
///     j_l(z) = z^{-s} J_{s+l}(z),   i_l(z) = z^{-s} I_{s+l}(z),   s = (d-2)/2,
///
/// evaluated from their ascending power series together with derivatives up to
/// fourth order. Derivatives are obtained by differentiating the series term by
/// term, so the same code path serves every order and stays finite at z = 0.
///
/// Terms are generated by ratio updates and accumulated in a wide floating type
/// (binary128 where the compiler provides it, long double otherwise). The j series
/// alternates and its partial sums reach roughly i_l(z), so for z of order 20 a
/// double accumulator would lose about eight digits.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "roots.hpp"

namespace freeplate {

/// Spatial dimension d >= 2 and the derived order shift s = (d-2)/2.
class DimensionContext {
  public:
    explicit DimensionContext(int d) : d_(d)
    {
        if (d < 2) {
            throw domain_error("dimension must be >= 2, got d = " + std::to_string(d));
        }
    }

    int d() const noexcept { return d_; }
    double s() const noexcept { return 0.5 * (d_ - 2); }
    double half_d() const noexcept { return 0.5 * d_; }

    friend bool operator==(const DimensionContext&, const DimensionContext&) = default;

  private:
    int d_;
};

/// Angular order l together with its separation constant k = l(l+d-2).
class BesselOrder {
  public:
    BesselOrder(const DimensionContext& ctx, int l) : l_(l), k_(static_cast<double>(l) * (l + ctx.d() - 2))
    {
        if (l < 0) {
            throw domain_error("angular order must be >= 0, got l = " + std::to_string(l));
        }
    }

    int l() const noexcept { return l_; }
    double k_sep() const noexcept { return k_; }

  private:
    int l_;
    double k_;
};

inline double separation_constant(const DimensionContext& ctx, int l)
{
    return BesselOrder(ctx, l).k_sep();
}

/// Truncation and budget settings for the ascending series.
struct SeriesPolicy {
    /// Stop once the latest term is below rel_tol times the partial sum.
    double rel_tol = 1e-18;
    int max_terms = 200;
    /// Unscaled evaluations are refused beyond this argument.
    double max_unscaled_z = 60.0;
    /// e^{-z}-scaled i_l evaluations are refused beyond this argument.
    double max_scaled_z = 1e4;
};

namespace detail {

#if defined(__SIZEOF_FLOAT128__)
using wide_float = __float128;
#else
using wide_float = long double;
#endif

template <class T>
T abs_wide(T x)
{
    return x < T(0) ? -x : x;
}

/// Gamma(twice_x / 2) for a positive integer twice_x. Integer and half-integer
/// arguments are built by exact products; large arguments fall back to lgamma.
inline long double gamma_half(int twice_x)
{
    if (twice_x > 340) {
        return std::exp(std::lgamma(0.5L * twice_x));
    }
    const bool even = twice_x % 2 == 0;
    long double g = even ? 1.0L : std::sqrt(std::numbers::pi_v<long double>);
    for (int t = even ? 2 : 1; t + 2 <= twice_x; t += 2) {
        g *= 0.5L * t;
    }
    return g;
}

inline long double factorial(int n)
{
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

inline long double falling_factorial(int n, int m)
{
    long double f = 1.0L;
    for (int i = 0; i < m; ++i) {
        f *= n - i;
    }
    return f;
}

enum class Kind { j, i };

inline std::string describe(const DimensionContext& ctx, int l, double z, int m)
{
    std::ostringstream os;
    os.precision(17);
    os << "z = " << z << ", l = " << l << ", d = " << ctx.d() << ", m = " << m;
    return os.str();
}

/// m-th derivative of j_l or i_l by the term-wise differentiated ascending series,
/// optionally multiplied by e^{-z}.
template <class Acc = wide_float>
double ascending_series(const DimensionContext& ctx, int l, double z, int m, Kind kind, bool scaled,
                        const SeriesPolicy& policy)
{
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw domain_error("series argument must be finite and >= 0 (" + describe(ctx, l, z, m) + ")");
    }
    if (l < 0) {
        throw domain_error("negative angular order (" + describe(ctx, l, z, m) + ")");
    }
    if (m < 0 || m > 4) {
        throw domain_error("derivative order must be in 0..4 (" + describe(ctx, l, z, m) + ")");
    }
    const double z_limit = scaled ? policy.max_scaled_z : policy.max_unscaled_z;
    if (z > z_limit) {
        throw range_error("series argument beyond evaluation budget " + std::to_string(z_limit) + " (" +
                          describe(ctx, l, z, m) + ")");
    }

    const int d = ctx.d();
    // First term whose power 2k+l survives m differentiations.
    const int k0 = m > l ? (m - l + 1) / 2 : 0;
    const int n0 = 2 * k0 + l;
    if (z == 0.0 && n0 > m) {
        return 0.0;
    }

    long double lead = falling_factorial(n0, m) / (factorial(k0) * gamma_half(2 * k0 + d + 2 * l));
    lead *= std::pow(2.0L, 1.0L - 0.5L * d - n0);
    if (n0 > m) {
        lead *= std::pow(static_cast<long double>(z), n0 - m);
    }
    if (scaled) {
        lead *= std::exp(-static_cast<long double>(z));
    }
    if (kind == Kind::j && k0 % 2 == 1) {
        lead = -lead;
    }

    const int min_terms = static_cast<int>(std::ceil(z)) + 10;
    const int max_terms = scaled ? std::max(policy.max_terms, min_terms + 100) : policy.max_terms;
    const Acc zz = Acc(z) * Acc(z);
    const Acc tol = Acc(policy.rel_tol);

    Acc term = Acc(lead);
    Acc sum = term;
    for (int k = k0, used = 1;; ++k, ++used) {
        if (used >= min_terms && abs_wide(term) <= tol * abs_wide(sum)) {
            break;
        }
        if (used >= max_terms) {
            throw range_error("series did not converge within " + std::to_string(max_terms) + " terms (" +
                              describe(ctx, l, z, m) + ")");
        }
        const int n = 2 * k + l;
        Acc ratio = zz / (Acc(2 * (k + 1)) * Acc(2 * k + d + 2 * l));
        if (m > 0) {
            ratio *= Acc(static_cast<double>(n + 2) * (n + 1)) / Acc(static_cast<double>(n + 2 - m) * (n + 1 - m));
        }
        term *= kind == Kind::j ? -ratio : ratio;
        sum += term;
    }
    return static_cast<double>(sum);
}

} // namespace detail

/// j_l(z). For d = 2 this is the classical J_l(z).
inline double ultra_j(const DimensionContext& ctx, int l, double z, const SeriesPolicy& policy = {})
{
    return detail::ascending_series(ctx, l, z, 0, detail::Kind::j, false, policy);
}

/// i_l(z). Range-limited to z <= policy.max_unscaled_z; use ultra_i_scaled for large arguments.
inline double ultra_i(const DimensionContext& ctx, int l, double z, const SeriesPolicy& policy = {})
{
    return detail::ascending_series(ctx, l, z, 0, detail::Kind::i, false, policy);
}

/// m-th derivative of j_l at z, m in 0..4.
inline double ultra_j_deriv(const DimensionContext& ctx, int l, double z, int m, const SeriesPolicy& policy = {})
{
    return detail::ascending_series(ctx, l, z, m, detail::Kind::j, false, policy);
}

/// m-th derivative of i_l at z, m in 0..4. Positive for z > 0 whenever it is not identically zero.
inline double ultra_i_deriv(const DimensionContext& ctx, int l, double z, int m, const SeriesPolicy& policy = {})
{
    return detail::ascending_series(ctx, l, z, m, detail::Kind::i, false, policy);
}

/// e^{-z} i_l^{(m)}(z), evaluated without forming i_l itself.
inline double ultra_i_scaled(const DimensionContext& ctx, int l, double z, int m, const SeriesPolicy& policy = {})
{
    return detail::ascending_series(ctx, l, z, m, detail::Kind::i, true, policy);
}

/// First positive zero p_{1,1} of j_1'. The bracket (sqrt(d), sqrt(d+2)) is proven
/// for every d >= 2, so a failed bracket means the kernel is broken.
inline double p11(const DimensionContext& ctx, const SeriesPolicy& policy = {})
{
    const double d = ctx.d();
    auto slope = [&](double z) { return ultra_j_deriv(ctx, 1, z, 1, policy); };
    try {
        return bisect(slope, std::sqrt(d), std::sqrt(d + 2.0), 0.0);
    } catch (const domain_error& e) {
        throw invariant_error(std::string("p11 bracket failed: ") + e.what());
    }
}

struct ZeroBracket {
    double lo;
    double hi;
};

/// Bracket for p_{l,1}, the first positive zero of j_l'. For d >= 3 this is the
/// Lorch-Szego bound l(d+2l)(d+2l+2)/(d+4l+2) < p^2 < l(d+2l); for d = 2 only
/// l = 1 is covered, by d < p^2 < d+2.
inline ZeroBracket pl1_bracket(const DimensionContext& ctx, int l)
{
    if (l < 1) {
        throw domain_error("pl1_bracket needs l >= 1, got l = " + std::to_string(l));
    }
    const double d = ctx.d();
    if (ctx.d() == 2) {
        if (l != 1) {
            throw unsupported_error("pl1_bracket: d = 2 is only covered for l = 1, got l = " + std::to_string(l));
        }
        return {std::sqrt(d), std::sqrt(d + 2.0)};
    }
    const double L = l;
    const double lo2 = L * (d + 2 * L) * (d + 2 * L + 2) / (d + 4 * L + 2);
    const double hi2 = L * (d + 2 * L);
    return {std::sqrt(lo2), std::sqrt(hi2)};
}

/// Coefficients of j_1''(z) = sum_k (-1)^k d_k z^{2k-1} (and i_1'' with all signs +),
/// with c_k = d_{k+1}/d_k. Entry [k-1] holds index k.
struct SeriesCoefficients {
    std::vector<double> d;
    std::vector<double> c;
};

inline SeriesCoefficients series_coeffs(const DimensionContext& ctx, int k_max)
{
    if (k_max < 3) {
        throw domain_error("series_coeffs needs k_max >= 3, got " + std::to_string(k_max));
    }
    const int dim = ctx.d();
    SeriesCoefficients out;
    out.d.reserve(k_max);
    out.c.reserve(k_max);
    for (int k = 1; k <= k_max; ++k) {
        const long double num = (2.0L * k + 1) * std::pow(2.0L, 1.0L - 2.0L * k - 0.5L * dim);
        const long double den = detail::factorial(k - 1) * detail::gamma_half(2 * k + 2 + dim);
        out.d.push_back(static_cast<double>(num / den));
        const double kk = k;
        out.c.push_back((2 * kk + 3) / (2 * kk * (2 * kk + 1) * (2 * kk + dim + 2)));
    }
    return out;
}

} // namespace freeplate
