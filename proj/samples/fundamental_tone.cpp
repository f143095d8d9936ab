// Fundamental tone of a free plate under tension, checked two ways.
//
//   fundamental_tone [d] [tau] [radius]

#include <cstdio>
#include <cstdlib>

#include "freeplate/verify.hpp"

int main(int argc, char** argv)
{
    using namespace freeplate;
    const int d = argc > 1 ? std::atoi(argv[1]) : 2;
    const double tau = argc > 2 ? std::atof(argv[2]) : 1.0;
    const double radius = argc > 3 ? std::atof(argv[3]) : 1.0;

    try {
        const PlateProblem problem(DimensionContext(d), tau, radius);
        const FundamentalReport rep = fundamental_report(problem);
        const ModeParams& m = rep.mode;
        std::printf("d = %d, tau = %g, R = %g\n", d, tau, radius);
        std::printf("omega_1 = %.15g  (l = %d, a = %.15g, b = %.15g, gamma = %.6g)\n", m.omega, m.l, m.a, m.b,
                    m.gamma);
        std::printf("l = 1 cross-checks: %s\n", rep.all_passed() ? "passed" : "FAILED");

        // Same number from the Rayleigh quotient, without touching W_l.
        const double q = rayleigh_quotient(problem.dim, m, radius);
        std::printf("Rayleigh quotient = %.15g  (relative gap %.2e)\n", q, std::abs(q - m.omega) / m.omega);

        const ResidualReport res = residual_report(problem.dim, m, radius);
        std::printf("residuals: M %.2e, V %.2e, PDE %.2e\n", res.m_residual, res.v_residual, res.pde_residual);
        return VerificationGates{}.passes(res) && rep.all_passed() ? 0 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
