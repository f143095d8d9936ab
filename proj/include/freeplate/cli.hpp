#pragma once

/// \file cli.hpp
///
/// The `freeplate` command line: spectrum, fundamental, mode-grid and verify.
/// run_cli() does all the work so tests can drive it in-process.
///
/// Exit codes: 0 ok, 1 compute error, 2 usage error, 3 verification gate failed.

#include <chrono>
#include <ctime>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"

#include "serialize.hpp"

namespace freeplate::cli {

enum ExitCode : int { ok = 0, compute_error = 1, usage_error = 2, gate_failure = 3 };

struct CommonOptions {
    int dim = 2;
    double tau = 1.0;
    double radius = 1.0;
    std::string format = "csv";
    bool reproducible = false;
    int jobs = 1;
};

struct SpectrumOptions {
    int lmax = 6;
    int count = 10;
};

struct GridOptions {
    int index = 1;
    int lmax = 6;
    int nr = 32;
    int ntheta = 64;
};

struct VerifyOptions {
    int index = 1;
    int lmax = 6;
    bool lemmas = false;
    double perturb_a = 0.0;
    int quadrature_order = 64;
};

namespace detail {

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline std::string host_name()
{
    char buf[256] = {};
    if (gethostname(buf, sizeof buf - 1) != 0) {
        return "unknown";
    }
    return buf;
}

inline json envelope(const std::string& command, const std::vector<std::string>& args, const CommonOptions& common,
                     const PlateProblem& problem, json tolerances, json payload)
{
    json env{{"schema_version", schema_version},
             {"command", json{{"name", command}, {"args", args}}},
             {"problem", to_json(problem)},
             {"tolerances", std::move(tolerances)},
             {"payload", std::move(payload)}};
    if (!common.reproducible) {
        env["generated_at"] = utc_timestamp();
        env["host"] = host_name();
    }
    return env;
}

inline EigenOptions eigen_options(const CommonOptions& c)
{
    EigenOptions opt;
    opt.jobs = c.jobs;
    return opt;
}

/// Table long enough to contain entry `index`.
inline SpectrumTable table_through(const PlateProblem& problem, int lmax, int index, const CommonOptions& c)
{
    SpectrumTable t = eigenvalues(problem, lmax, index + 1, eigen_options(c));
    if (index >= static_cast<int>(t.entries.size())) {
        throw range_error("index " + std::to_string(index) + " is beyond the computed table (" +
                          std::to_string(t.entries.size()) + " entries up to l = " + std::to_string(lmax) + ")");
    }
    return t;
}

inline int run_spectrum(const CommonOptions& c, const SpectrumOptions& s, const std::vector<std::string>& args,
                        std::ostream& out, std::ostream& err)
{
    const PlateProblem problem(DimensionContext(c.dim), c.tau, c.radius);
    const SpectrumTable t = eigenvalues(problem, s.lmax, s.count, eigen_options(c));
    if (static_cast<int>(t.entries.size()) < s.count) {
        err << "error: only " << t.entries.size() << " eigenvalues found below the scan ceiling (requested "
            << s.count << ")\n";
        return compute_error;
    }
    if (!t.next_order_clear) {
        err << "warning: order l = " << s.lmax + 1 << " has an eigenvalue inside the table; raise --lmax\n";
    }
    if (c.format == "json") {
        json tol = to_json(SeriesPolicy{});
        tol.update(to_json(t.scan));
        write_json(out, envelope("spectrum", args, c, problem, tol, to_json(t)));
    } else {
        write_csv(out, t);
    }
    return ok;
}

inline int run_fundamental(const CommonOptions& c, const std::vector<std::string>& args, std::ostream& out,
                           std::ostream& err)
{
    const PlateProblem problem(DimensionContext(c.dim), c.tau, c.radius);
    const FundamentalReport rep = fundamental_report(problem);
    if (c.format == "json") {
        json tol = to_json(SeriesPolicy{});
        tol.update(to_json(RootScanConfig::defaults(problem.dim, rep.p11)));
        write_json(out, envelope("fundamental", args, c, problem, tol, to_json(rep)));
    } else {
        write_csv(out, rep);
    }
    if (!rep.all_passed()) {
        err << "error: fundamental-mode cross-checks failed\n";
        return gate_failure;
    }
    return ok;
}

inline int run_mode_grid(const CommonOptions& c, const GridOptions& g, const std::vector<std::string>& args,
                         std::ostream& out, std::ostream&)
{
    const PlateProblem problem(DimensionContext(c.dim), c.tau, c.radius);
    const SpectrumTable t = table_through(problem, g.lmax, g.index, c);
    GridSpec spec;
    spec.nr = g.nr;
    spec.ntheta = g.ntheta;
    const ModeGrid grid = sample_mode(problem.dim, t.entries[g.index].mode, problem.radius, spec);
    if (c.format == "json") {
        json payload{{"index", g.index}};
        payload.update(to_json(grid));
        json tol = to_json(SeriesPolicy{});
        tol.update(to_json(t.scan));
        write_json(out, envelope("mode-grid", args, c, problem, tol, payload));
    } else {
        write_csv(out, grid);
    }
    return ok;
}

inline int run_verify(const CommonOptions& c, const VerifyOptions& v, const std::vector<std::string>& args,
                      std::ostream& out, std::ostream& err)
{
    const PlateProblem problem(DimensionContext(c.dim), c.tau, c.radius);
    if (v.lemmas) {
        const auto verdicts = lemma_suite(problem.dim);
        const bool passed = all_passed(verdicts);
        if (c.format == "json") {
            json list = json::array();
            for (const auto& x : verdicts) {
                list.push_back(to_json(x));
            }
            json tol{{"grid_points", LemmaOptions{}.grid}, {"taus", LemmaOptions{}.taus}};
            tol.update(to_json(SeriesPolicy{}));
            write_json(out, envelope("verify", args, c, problem, tol, json{{"lemmas", list}, {"passed", passed}}));
        } else {
            write_csv(out, verdicts);
        }
        if (!passed) {
            err << "error: lemma verification failed\n";
            return gate_failure;
        }
        return ok;
    }

    const SpectrumTable t = table_through(problem, v.lmax, v.index, c);
    ModeParams mode = t.entries[v.index].mode;
    if (v.perturb_a != 0.0) {
        if (mode.a == 0.0) {
            throw domain_error("--perturb-a needs a mode with a > 0 (index >= 1)");
        }
        mode = mode_from_root(problem.dim, mode.l, mode.a * (1.0 + v.perturb_a), problem.unit_tension(),
                              problem.radius);
    }
    const ResidualReport rep =
        residual_report(problem.dim, mode, problem.radius, QuadratureRule::gauss_legendre(v.quadrature_order));
    const VerificationGates gates;
    const bool passed = gates.passes(rep);
    if (c.format == "json") {
        json payload{{"index", v.index}, {"mode", to_json(mode)}, {"residuals", to_json(rep)},
                     {"gates", to_json(gates)}, {"passed", passed}};
        json tol{{"quadrature_order", v.quadrature_order}};
        tol.update(to_json(SeriesPolicy{}));
        tol.update(to_json(t.scan));
        write_json(out, envelope("verify", args, c, problem, tol, payload));
    } else {
        out << residual_csv_header << "\n";
        write_csv_row(out, v.index, mode.omega, mode.l, rep.m_residual, rep.v_residual, rep.pde_residual,
                      rep.rayleigh_gap, passed);
    }
    if (!passed) {
        err << "error: verification gates failed for index " << v.index << "\n";
        return gate_failure;
    }
    return ok;
}

inline void add_common(CLI::App* app, CommonOptions& c)
{
    app->add_option("--dim", c.dim, "spatial dimension d >= 2")->capture_default_str();
    app->add_option("--tau", c.tau, "tension ratio tau > 0")->capture_default_str();
    app->add_option("--radius", c.radius, "ball radius R > 0")->capture_default_str();
    app->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app->add_flag("--reproducible", c.reproducible, "omit timestamp and host name");
    app->add_option("--jobs", c.jobs, "worker threads for the root scan")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

/// Range checks CLI11 cannot express as validators with a useful message.
inline std::optional<std::string> check_common(const CommonOptions& c)
{
    if (c.dim < 2) {
        return "--dim must be an integer d >= 2 (got " + std::to_string(c.dim) + ")";
    }
    if (!(c.tau > 0.0) || !std::isfinite(c.tau)) {
        return "--tau must satisfy tau > 0; zero or negative tension is not supported (got " +
               format_double(c.tau) + ")";
    }
    if (!(c.radius > 0.0) || !std::isfinite(c.radius)) {
        return "--radius must satisfy R > 0 (got " + format_double(c.radius) + ")";
    }
    return std::nullopt;
}

} // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Eigenvalues and modes of the free plate under tension on d-dimensional balls", "freeplate"};
    app.require_subcommand(1);

    CommonOptions common;
    SpectrumOptions spec_opt;
    GridOptions grid_opt;
    VerifyOptions verify_opt;

    auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues over l = 0..lmax");
    detail::add_common(spectrum, common);
    spectrum->add_option("--lmax", spec_opt.lmax, "highest angular order scanned")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    spectrum->add_option("--count", spec_opt.count, "number of eigenvalues, including omega = 0")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* fundamental_cmd = app.add_subcommand("fundamental", "fundamental tone with its l = 1 cross-checks");
    detail::add_common(fundamental_cmd, common);

    auto* grid = app.add_subcommand("mode-grid", "sample one eigenfunction on an (r, theta) grid");
    detail::add_common(grid, common);
    grid->add_option("--index", grid_opt.index, "row of the spectrum table")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    grid->add_option("--lmax", grid_opt.lmax, "highest angular order scanned")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    grid->add_option("--nr", grid_opt.nr, "radial nodes")->check(CLI::Range(2, 1 << 20))->capture_default_str();
    grid->add_option("--ntheta", grid_opt.ntheta, "angular nodes")
        ->check(CLI::Range(2, 1 << 20))
        ->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "residual report for one mode, or the lemma suite");
    detail::add_common(verify_cmd, common);
    auto* index_opt = verify_cmd->add_option("--index", verify_opt.index, "row of the spectrum table")
                          ->check(CLI::NonNegativeNumber)
                          ->capture_default_str();
    auto* lemmas_opt = verify_cmd->add_flag("--lemmas", verify_opt.lemmas, "run the Bessel sign/bound suite");
    index_opt->excludes(lemmas_opt);
    verify_cmd->add_option("--lmax", verify_opt.lmax, "highest angular order scanned")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify_cmd->add_option("--perturb-a", verify_opt.perturb_a, "relative perturbation of a (gate testing)");
    verify_cmd->add_option("--quadrature-order", verify_opt.quadrature_order, "Gauss-Legendre nodes")
        ->check(CLI::Range(8, 4096))
        ->capture_default_str();

    std::vector<const char*> argv{"freeplate"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return usage_error;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (auto msg = detail::check_common(common)) {
        err << "error: " << *msg << "\n" << chosen->help();
        return usage_error;
    }

    try {
        if (chosen == spectrum) {
            return detail::run_spectrum(common, spec_opt, args, out, err);
        }
        if (chosen == fundamental_cmd) {
            return detail::run_fundamental(common, args, out, err);
        }
        if (chosen == grid) {
            return detail::run_mode_grid(common, grid_opt, args, out, err);
        }
        return detail::run_verify(common, verify_opt, args, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return compute_error;
    }
}

} // namespace freeplate::cli
