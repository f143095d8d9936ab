#pragma once

/// \file serialize.hpp
///
/// JSON and CSV encodings of spectra, mode grids and verification reports.
/// Floating-point values are written with 17 significant digits through
/// std::to_chars, which ignores the C locale.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "modes.hpp"
#include "spectrum.hpp"
#include "verify.hpp"

namespace freeplate {

using json = nlohmann::ordered_json;

inline constexpr std::string_view schema_version = "1.0";

inline std::string format_double(double x)
{
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    }
    if (x == 0.0) {
        x = 0.0; // drop the sign of -0
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace detail {

inline void write_json_string(std::ostream& os, const std::string& s)
{
    // nlohmann handles escaping; reuse it for strings only.
    os << json(s).dump();
}

inline void write_json(std::ostream& os, const json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                os << ',' << nl;
            }
            first = false;
            os << pad;
            write_json_string(os, it.key());
            os << (indent > 0 ? ": " : ":");
            write_json(os, it.value(), indent, depth + 1);
        }
        os << nl << close_pad << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
        os << '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) {
                os << ',';
                if (flat && indent > 0) {
                    os << ' ';
                }
            }
            first = false;
            if (!flat) {
                os << nl << pad;
            }
            write_json(os, e, indent, depth + 1);
        }
        if (!flat) {
            os << nl << close_pad;
        }
        os << ']';
        return;
    }
    case json::value_t::number_float: {
        const double x = j.get<double>();
        if (std::isfinite(x)) {
            os << format_double(x);
        } else {
            os << "null";
        }
        return;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

/// Writes j with 17-digit floats; non-finite numbers become null.
inline void write_json(std::ostream& os, const json& j, int indent = 2)
{
    detail::write_json(os, j, indent, 0);
    os << '\n';
}

inline std::string to_json_text(const json& j, int indent = 2)
{
    std::ostringstream os;
    write_json(os, j, indent);
    return os.str();
}

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are quoted
/// and embedded quotes doubled.
inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_field(double x) { return format_double(x); }
inline std::string csv_field(int x) { return std::to_string(x); }
inline std::string csv_field(long long x) { return std::to_string(x); }
inline std::string csv_field(std::size_t x) { return std::to_string(x); }
inline std::string csv_field(bool x) { return x ? "true" : "false"; }

template <class... T>
void write_csv_row(std::ostream& os, const T&... fields)
{
    bool first = true;
    ((os << (first ? "" : ",") << csv_field(fields), first = false), ...);
    os << "\n";
}

inline json to_json(const PlateProblem& p)
{
    return json{{"dim", p.dim.d()}, {"tau", p.tau}, {"radius", p.radius}};
}

inline json to_json(const SeriesPolicy& p)
{
    return json{{"series_rel_tol", p.rel_tol},
                {"series_max_terms", p.max_terms},
                {"max_unscaled_z", p.max_unscaled_z},
                {"max_scaled_z", p.max_scaled_z}};
}

inline json to_json(const RootScanConfig& c)
{
    return json{{"scan_a_max", c.a_max}, {"scan_step", c.step}, {"root_tol", c.root_tol}};
}

inline json to_json(const ModeParams& m)
{
    return json{{"l", m.l},       {"omega", m.omega}, {"a", m.a},
                {"b", m.b},       {"gamma", m.gamma}, {"gamma_scaled", m.gamma_scaled}};
}

inline json to_json(const SpectrumTable& t)
{
    json rows = json::array();
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const SpectrumEntry& e = t.entries[i];
        rows.push_back(json{{"index", i},
                            {"omega", e.omega},
                            {"l", e.l},
                            {"multiplicity", e.multiplicity},
                            {"a", e.mode.a},
                            {"b", e.mode.b},
                            {"gamma", e.mode.gamma},
                            {"w_residual", e.w_residual}});
    }
    return json{{"entries", rows},
                {"l_max", t.l_max},
                {"complete_below", t.complete_below},
                {"next_order_clear", t.next_order_clear},
                {"ceiling_capped", t.ceiling_capped}};
}

inline const char* spectrum_csv_header = "index,omega,l,multiplicity,a,b,gamma,w_residual";

inline void write_csv(std::ostream& os, const SpectrumTable& t)
{
    os << spectrum_csv_header << "\n";
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        const SpectrumEntry& e = t.entries[i];
        write_csv_row(os, i, e.omega, e.l, e.multiplicity, e.mode.a, e.mode.b, e.mode.gamma, e.w_residual);
    }
}

inline json to_json(const FundamentalReport& r)
{
    json out = to_json(r.mode);
    out["p11"] = r.p11;
    out["checks"] = json{{"w1_sign_change", r.w1_sign_change},
                         {"no_radial_root_below", r.no_radial_root_below},
                         {"higher_orders_above", r.higher_orders_above},
                         {"l_guard", r.l_guard}};
    out["passed"] = r.all_passed();
    return out;
}

inline const char* fundamental_csv_header =
    "omega,l,a,b,gamma,p11,w1_sign_change,no_radial_root_below,higher_orders_above,passed";

inline void write_csv(std::ostream& os, const FundamentalReport& r)
{
    os << fundamental_csv_header << "\n";
    write_csv_row(os, r.mode.omega, r.mode.l, r.mode.a, r.mode.b, r.mode.gamma, r.p11, r.w1_sign_change,
                  r.no_radial_root_below, r.higher_orders_above, r.all_passed());
}

inline const char* variant_name(AngularVariant v)
{
    switch (v) {
    case AngularVariant::cosine:
        return "cosine";
    case AngularVariant::sine:
        return "sine";
    case AngularVariant::real_order:
        return "real_order";
    case AngularVariant::zonal:
        return "zonal";
    }
    return "unknown";
}

inline json to_json(const ModeGrid& g)
{
    json values = json::array();
    for (const auto& row : g.values) {
        values.push_back(row);
    }
    return json{{"mode", to_json(g.mode)},
                {"angular", json{{"variant", variant_name(g.angular.variant)},
                                 {"order", g.angular.order},
                                 {"norm", g.angular.norm}}},
                {"r", g.r},
                {"theta", g.theta},
                {"values", values}};
}

inline const char* grid_csv_header = "r,theta,u";

inline void write_csv(std::ostream& os, const ModeGrid& g)
{
    os << grid_csv_header << "\n";
    for (std::size_t i = 0; i < g.r.size(); ++i) {
        for (std::size_t j = 0; j < g.theta.size(); ++j) {
            write_csv_row(os, g.r[i], g.theta[j], g.values[i][j]);
        }
    }
}

inline json to_json(const ResidualReport& r)
{
    return json{{"m_residual", r.m_residual},
                {"v_residual", r.v_residual},
                {"pde_residual", r.pde_residual},
                {"rayleigh_gap", r.rayleigh_gap}};
}

inline json to_json(const VerificationGates& g)
{
    return json{{"boundary", g.boundary}, {"pde", g.pde}, {"rayleigh", g.rayleigh}};
}

inline const char* residual_csv_header = "index,omega,l,m_residual,v_residual,pde_residual,rayleigh_gap,passed";

inline json to_json(const LemmaVerdict& v)
{
    return json{{"name", v.name}, {"passed", v.passed}, {"worst_margin", v.worst_margin}, {"worst_z", v.worst_z}};
}

inline const char* lemma_csv_header = "name,passed,worst_margin,worst_z";

inline void write_csv(std::ostream& os, const std::vector<LemmaVerdict>& verdicts)
{
    os << lemma_csv_header << "\n";
    for (const auto& v : verdicts) {
        write_csv_row(os, std::string_view(v.name), v.passed, v.worst_margin, v.worst_z);
    }
}

} // namespace freeplate
