// Acceptance runner: one PASS/FAIL line per criterion, exit status = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "freeplate/cli.hpp"
#include "freeplate/verify.hpp"
#include "identities.hpp"

using namespace freeplate;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double time_limit; // seconds; <= 0 means none
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const double taus[] = {0.1, 1.0, 10.0, 100.0};
const int cell_dims[] = {2, 3, 5};

Outcome zero_bracket()
{
    double worst = 1e300;
    bool ok = true;
    for (int d = 2; d <= 15; ++d) {
        const double p = p11(DimensionContext(d));
        const double margin = std::min(p * p - d, d + 2.0 - p * p);
        worst = std::min(worst, margin);
        ok = ok && margin > 0.0;
    }
    const double p2 = p11(DimensionContext(2));
    ok = ok && std::abs(p2 - 1.84) <= 0.01;
    return {ok, "p11(2)=" + fmt("%.12f", p2) + ", min bracket margin " + fmt("%.3g", worst)};
}

Outcome lemma_suite_green()
{
    int failed = 0;
    std::string first;
    for (int d : {2, 3, 4, 5, 13, 14, 20}) {
        for (const auto& v : lemma_suite(DimensionContext(d))) {
            if (!v.passed) {
                ++failed;
                if (first.empty()) {
                    first = " first: d=" + std::to_string(d) + " " + v.name;
                }
            }
        }
    }
    return {failed == 0, std::to_string(failed) + " failing verdicts" + first};
}

Outcome fundamental_theorem()
{
    bool ok = true;
    double worst_w0 = 1e300;
    std::string note;
    for (int d : cell_dims) {
        const DimensionContext ctx(d);
        const double p = p11(ctx);
        for (double tau : taus) {
            const FundamentalReport rep = fundamental_report(PlateProblem(ctx, tau));
            bool cell = rep.all_passed() && rep.mode.l == 1;

            std::vector<double> w0_roots;
            for (double a_max = p + 1.0; w0_roots.empty() && a_max < 40.0; a_max += 2.0) {
                w0_roots = scan_roots(ctx, 0, tau, RootScanConfig::defaults(ctx, a_max));
            }
            cell = cell && !w0_roots.empty() && rep.mode.a < w0_roots.front();

            for (int i = 1; i < 500; ++i) {
                const double a = p * i / 500.0;
                const DeterminantTerms t = determinant_terms(ctx, 0, tau, a);
                const double m = t.value() / (std::abs(t.first) + std::abs(t.second));
                worst_w0 = std::min(worst_w0, m);
                cell = cell && m > 0.0;
            }
            if (!cell && note.empty()) {
                note = " first failure d=" + std::to_string(d) + " tau=" + fmt("%g", tau);
            }
            ok = ok && cell;
        }
    }
    return {ok, "12 cells, min normalized W0 on (0,p11) " + fmt("%.3g", worst_w0) + note};
}

Outcome two_path()
{
    double worst = 0.0;
    for (int d : cell_dims) {
        for (double tau : taus) {
            const PlateProblem pb(DimensionContext(d), tau);
            const ModeParams m = fundamental(pb);
            const double q = rayleigh_quotient(pb.dim, m, 1.0);
            worst = std::max(worst, std::abs(q - m.omega) / m.omega);
        }
    }
    return {worst <= 1e-7, "max |Q-omega|/omega = " + fmt("%.3g", worst) + " (gate 1e-7)"};
}

Outcome residuals()
{
    double m_worst = 0.0;
    double v_worst = 0.0;
    double pde_worst = 0.0;
    for (auto [d, tau] : {std::pair{2, 1.0}, std::pair{3, 10.0}}) {
        const PlateProblem pb(DimensionContext(d), tau);
        const SpectrumTable t = eigenvalues(pb, 6, 6);
        for (std::size_t i = 1; i < t.entries.size(); ++i) {
            const ResidualReport b = boundary_residuals(pb.dim, t.entries[i].mode);
            m_worst = std::max(m_worst, b.m_residual);
            v_worst = std::max(v_worst, b.v_residual);
            pde_worst = std::max(pde_worst, pde_residual(pb.dim, t.entries[i].mode, radial_grid()));
        }
    }
    // m_residual is zero up to the rounding of one addition.
    const bool ok = m_worst <= 1e-15 && v_worst <= 1e-8 && pde_worst <= 1e-8;
    return {ok, "max m " + fmt("%.2g", m_worst) + ", v " + fmt("%.2g", v_worst) + ", pde " + fmt("%.2g", pde_worst)};
}

/// r * R_1(r): the fundamental radial part times r, so the profile is O(r²) at the origin.
struct TimesR {
    RadialProfile inner;

    double derivative(double r, int m) const
    {
        const double f = inner.derivative(r, m);
        return m == 0 ? r * f : r * f + m * inner.derivative(r, m - 1);
    }
};

Outcome monotonicity()
{
    const PolynomialProfile sq{{0.0, 0.0, 1.0}};
    const PolynomialProfile bump{{0.0, 0.0, 2.0, -2.0, 1.0}};
    int series = 0;
    int bad = 0;
    for (int d : {2, 3, 5}) {
        const PlateProblem pb(DimensionContext(d), 1.0);
        const TimesR fund{RadialProfile(pb.dim, fundamental(pb), 1.0)};
        for (double tau : {0.5, 5.0}) {
            for (const auto& vals : {numerator_monotonicity(sq, pb.dim, tau, 1, 6),
                                     numerator_monotonicity(bump, pb.dim, tau, 1, 6),
                                     numerator_monotonicity(fund, pb.dim, tau, 1, 6)}) {
                ++series;
                bad += strictly_increasing(vals) ? 0 : 1;
            }
        }
    }
    return {bad == 0, std::to_string(series - bad) + "/" + std::to_string(series) +
                          " series increasing; profiles r^2, r^2(1-r)^2+r^2, r*R_1(r)"};
}

Outcome properties()
{
    const auto s = testing::check_identities(12000, 1e-11);
    const bool ok = s.cases >= 10000 && s.violations == 0 && s.domination_failures == 0;
    return {ok, std::to_string(s.cases) + " cases, " + std::to_string(s.checks) + " identities, worst " +
                    fmt("%.2g", s.worst) + ", domination failures " + std::to_string(s.domination_failures)};
}

Outcome scaling()
{
    double worst = 0.0;
    for (int d : {2, 3}) {
        for (double tau : {0.1, 1.0, 10.0}) {
            const PlateProblem direct(DimensionContext(d), tau, 2.0);
            const PlateProblem unit(DimensionContext(d), 4.0 * tau, 1.0);
            const double w_direct = fundamental(direct).omega;
            const double w_scaled = rescale(fundamental(unit), direct).omega;
            worst = std::max(worst, std::abs(w_direct - w_scaled) / w_scaled);
        }
    }
    return {worst <= 1e-10, "max relative difference " + fmt("%.3g", worst)};
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double as_number(const nlohmann::json& v)
{
    return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
}

Outcome golden()
{
    struct Case {
        const char* file;
        std::vector<std::string> args;
    };
    const std::vector<Case> cases = {
        {"spectrum_d2_tau1.csv", {"spectrum", "--dim", "2", "--tau", "1", "--count", "6", "--reproducible"}},
        {"spectrum_d3_tau10.json",
         {"spectrum", "--dim", "3", "--tau", "10", "--count", "6", "--format", "json", "--reproducible"}},
        {"fundamental_d2_tau1.json", {"fundamental", "--dim", "2", "--tau", "1", "--format", "json", "--reproducible"}},
        {"mode_grid_d2_tau1.csv",
         {"mode-grid", "--dim", "2", "--tau", "1", "--index", "1", "--nr", "5", "--ntheta", "8", "--reproducible"}},
    };
    int exact = 0;
    for (const Case& c : cases) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run_cli(c.args, out, err);
        const std::string expected = read_file(std::string(FREEPLATE_GOLDEN_DIR) + "/" + c.file);
        exact += (code == 0 && !expected.empty() && out.str() == expected) ? 1 : 0;
    }

    // The committed files must also agree with the extended-precision oracle.
    const nlohmann::json oracle = nlohmann::json::parse(read_file(FREEPLATE_ORACLE_JSON));
    double worst = 0.0;
    {
        const auto j = nlohmann::json::parse(read_file(std::string(FREEPLATE_GOLDEN_DIR) + "/spectrum_d3_tau10.json"));
        const auto& ref = oracle["spectrum"]["d=3,tau=10,lmax=6"];
        const auto& rows = j["payload"]["entries"];
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double want = as_number(ref[i][0]);
            worst = std::max(worst, std::abs(rows[i]["omega"].get<double>() - want) / want);
        }
    }
    {
        const auto j = nlohmann::json::parse(read_file(std::string(FREEPLATE_GOLDEN_DIR) + "/fundamental_d2_tau1.json"));
        const double want = as_number(oracle["fundamental"]["d=2,tau=1"]["omega"]);
        worst = std::max(worst, std::abs(j["payload"]["omega"].get<double>() - want) / want);
    }
    {
        std::istringstream in(read_file(std::string(FREEPLATE_GOLDEN_DIR) + "/spectrum_d2_tau1.csv"));
        const auto& ref = oracle["spectrum"]["d=2,tau=1,lmax=6"];
        std::string line;
        std::getline(in, line);
        for (int i = 0; std::getline(in, line); ++i) {
            std::stringstream ls(line);
            std::string cell;
            std::getline(ls, cell, ',');
            std::getline(ls, cell, ',');
            if (i > 0) {
                const double want = as_number(ref[i][0]);
                worst = std::max(worst, std::abs(std::stod(cell) - want) / want);
            }
        }
    }
    const bool ok = exact == static_cast<int>(cases.size()) && worst <= 1e-9;
    return {ok, std::to_string(exact) + "/4 byte-identical; committed omegas vs oracle max rel " + fmt("%.2g", worst)};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "zero-bracket reproduction", 1.0, zero_bracket},
        {2, "lemma suite green", 10.0, lemma_suite_green},
        {3, "fundamental-mode theorem", 30.0, fundamental_theorem},
        {4, "two-path eigenvalue agreement", 30.0, two_path},
        {5, "boundary and PDE residuals", 0.0, residuals},
        {6, "numerator monotonicity", 0.0, monotonicity},
        {7, "recurrence/ODE property tests", 0.0, properties},
        {8, "scaling law", 0.0, scaling},
        {9, "golden files", 0.0, golden},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = o.passed;
        std::string timing = fmt("%.2fs", secs);
        if (c.time_limit > 0.0) {
            timing += fmt(" (limit %gs)", c.time_limit);
            ok = ok && secs < c.time_limit;
        }
        failures += ok ? 0 : 1;
        std::printf("%s [%d] %s: %s; %s\n", ok ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), timing.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
