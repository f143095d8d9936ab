#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace freeplate {

/// Gauss-Legendre rule on [lo, hi]. Nodes are strictly interior, so integrands
/// with removable singularities at an endpoint are never evaluated there.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
    double lo = 0.0;
    double hi = 1.0;

    static QuadratureRule gauss_legendre(int n, double lo = 0.0, double hi = 1.0)
    {
        if (n < 1) {
            throw domain_error("quadrature order must be >= 1");
        }
        QuadratureRule rule;
        rule.order = n;
        rule.lo = lo;
        rule.hi = hi;
        rule.nodes.resize(n);
        rule.weights.resize(n);
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    break;
                }
            }
            // recompute derivative at the converged node
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule.nodes[i] = mid - half * x;
            rule.nodes[n - 1 - i] = mid + half * x;
            rule.weights[i] = half * w;
            rule.weights[n - 1 - i] = half * w;
        }
        return rule;
    }

    /// Same interval, twice the order.
    QuadratureRule refined() const { return gauss_legendre(2 * order, lo, hi); }

    template <class F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            sum += weights[i] * f(nodes[i]);
        }
        return sum;
    }
};

} // namespace freeplate
