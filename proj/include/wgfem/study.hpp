#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgfem/conforming.hpp"
#include "wgfem/linsolve.hpp"
#include "wgfem/mesh.hpp"
#include "wgfem/mesh_io.hpp"
#include "wgfem/problems.hpp"
#include "wgfem/quality.hpp"
#include "wgfem/wg.hpp"

namespace wgfem
{

enum class Method
{
    wg,
    conforming
};

enum class Family
{
    uniform,
    degenerate
};

enum class OutputFormat
{
    table,
    csv
};

inline std::string
to_string(Method m)
{
    return m == Method::wg ? "wg" : "conforming";
}

inline std::string
to_string(Family f)
{
    return f == Family::uniform ? "uniform" : "degenerate";
}

inline std::string
to_string(SolverMethod s)
{
    return s == SolverMethod::direct ? "direct" : "cg";
}

struct StudyConfig
{
    int          dim       = 2;
    Method       method    = Method::wg;
    Family       family    = Family::uniform;
    int          degree    = 1;
    int          level_min = 3;
    int          level_max = 5;
    std::string  problem   = "poly2d";
    SolveOptions solver;
    OutputFormat format = OutputFormat::table;
    std::string  out;
    std::string  export_mesh;
    /* Prefix for MatrixMarket dumps of the finest system (<prefix>_A.mtx, <prefix>_b.mtx). */
    std::string  export_system;
    std::size_t  max_cells = default_max_cells;
    /* Levels whose system would exceed this many unknowns are not attempted. */
    std::size_t  max_dofs  = 2'000'000;

    void
    validate() const
    {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("StudyConfig: dim must be 2 or 3");
        if (level_min < 1 || level_max < level_min)
            throw std::invalid_argument("StudyConfig: level range must be nonempty, ascending and start at 1 or above");
        if (level_max > 12)
            throw std::invalid_argument("StudyConfig: level above 12 is not supported");
        if ((problem == "poly2d" && dim != 2) || (problem == "poly3d" && dim != 3))
            throw std::invalid_argument("StudyConfig: problem '" + problem + "' does not match dim " +
                                        std::to_string(dim));
        if (problem != "poly2d" && problem != "poly3d" && problem != "zero")
            throw std::invalid_argument("StudyConfig: unknown problem '" + problem + "'");
        if (method == Method::wg && (degree < 0 || degree > 2))
            throw std::invalid_argument("StudyConfig: WG degree must be 0, 1 or 2");
        if (method == Method::conforming && degree != 1)
            throw std::invalid_argument("StudyConfig: the conforming baseline is P1 only");
        if (!(solver.tol > 0.0 && solver.tol <= 1e-6))
            throw std::invalid_argument("StudyConfig: solver tolerance must lie in (0, 1e-6]");
    }
};

/* Observed convergence order between two successive levels. */
struct ObservedOrder
{
    enum class Kind
    {
        absent, // first level of a study
        value,
        exact // the finer error is exactly zero
    };

    Kind   kind  = Kind::absent;
    double value = std::numeric_limits<double>::quiet_NaN();

    bool has_value() const { return kind == Kind::value; }
};

struct LevelResult
{
    int           level         = 0;
    std::size_t   cells         = 0;
    std::size_t   dofs          = 0;
    double        l2_err        = 0.0;
    ObservedOrder l2_order;
    double        energy_err    = 0.0;
    ObservedOrder energy_order;
    double        max_angle_deg = 0.0;
    double        seconds       = 0.0;
};

struct ConvergenceReport
{
    StudyConfig              config;
    std::vector<LevelResult> levels;
    bool                     failed = false;
    std::string              failure;
};

/* order_l = log2(e_{l-1} / e_l); mesh size halves from one level to the next. */
inline std::vector<ObservedOrder>
compute_rates(std::span<const double> errors)
{
    std::vector<ObservedOrder> r(errors.size());
    for (std::size_t l = 1; l < errors.size(); ++l)
    {
        if (errors[l] == 0.0)
            r[l].kind = ObservedOrder::Kind::exact;
        else
        {
            r[l].kind  = ObservedOrder::Kind::value;
            r[l].value = std::log2(errors[l - 1] / errors[l]);
        }
    }
    return r;
}

namespace detail
{

template<int Dim>
Mesh<Dim>
study_mesh(const StudyConfig& cfg, int level)
{
    if (cfg.family == Family::uniform)
    {
        const std::size_t n = std::size_t{1} << level;
        if (Dim == 2 ? 2 * n * n > cfg.max_cells : 6 * n * n * n > cfg.max_cells)
            throw std::invalid_argument("run_study: uniform level " + std::to_string(level) +
                                        " exceeds the cell limit");
        return build_uniform_mesh<Dim>(n);
    }
    return build_degenerate_mesh<Dim>(static_cast<std::size_t>(level), cfg.max_cells);
}

template<int Dim>
ConvergenceReport
run_study(const StudyConfig& cfg)
{
    using clock = std::chrono::steady_clock;

    ConvergenceReport report;
    report.config       = cfg;
    const auto problem  = builtin_problem<Dim>(cfg.problem);

    for (int level = cfg.level_min; level <= cfg.level_max; ++level)
    {
        const auto  t0 = clock::now();
        LevelResult row;
        row.level = level;
        try
        {
            const Mesh<Dim> mesh = study_mesh<Dim>(cfg, level);
            row.cells            = mesh.num_cells();
            row.max_angle_deg    = quality(mesh).max_angle_deg();

            std::vector<ScalarField> cell_fields, point_fields;
            if (cfg.method == Method::wg)
            {
                const WgSpace<Dim> space(mesh, cfg.degree);
                if (space.num_free() > cfg.max_dofs)
                    throw numerical_error("system has " + std::to_string(space.num_free()) +
                                          " unknowns, above the limit of " + std::to_string(cfg.max_dofs));
                const SparseSystem sys = assemble(space, problem.f);
                if (!cfg.export_system.empty() && level == cfg.level_max)
                    write_matrix_market(sys, cfg.export_system + "_A.mtx", cfg.export_system + "_b.mtx");
                const auto uh = make_function(space, solve(sys, cfg.solver).x);
                row.dofs              = space.num_free();
                row.l2_err            = l2_error(space, problem.u, uh);
                row.energy_err        = energy_error(space, problem.grad_u, uh);

                if (!cfg.export_mesh.empty() && level == cfg.level_max)
                {
                    ScalarField u0{"uh_centroid", {}};
                    for (index_t c = 0; c < mesh.num_cells(); ++c)
                        u0.values.push_back(
                            cell_basis(mesh, c, cfg.degree).evaluate(uh.interior(c), mesh.cell_centroid(c)));
                    cell_fields.push_back(std::move(u0));
                }
            }
            else
            {
                const P1Space<Dim> space(mesh);
                if (space.num_free() > cfg.max_dofs)
                    throw numerical_error("system has " + std::to_string(space.num_free()) +
                                          " unknowns, above the limit of " + std::to_string(cfg.max_dofs));
                const SparseSystem sys = assemble_p1(space, problem.f);
                if (!cfg.export_system.empty() && level == cfg.level_max)
                    write_matrix_market(sys, cfg.export_system + "_A.mtx", cfg.export_system + "_b.mtx");
                const auto uh  = p1_nodal_values(space, solve(sys, cfg.solver).x);
                const auto         err = p1_errors(space, problem.u, uh);
                row.dofs               = space.num_free();
                row.l2_err             = err.l2;
                row.energy_err         = err.h1;

                if (!cfg.export_mesh.empty() && level == cfg.level_max)
                    point_fields.push_back({"uh", std::vector<double>(uh.data(), uh.data() + uh.size())});
            }

            if (!cfg.export_mesh.empty() && level == cfg.level_max)
            {
                ScalarField angle{"max_angle_deg", {}};
                for (index_t c = 0; c < mesh.num_cells(); ++c)
                    angle.values.push_back(cell_max_angle_deg(mesh, c));
                cell_fields.push_back(std::move(angle));
                export_vtk(mesh, cell_fields, point_fields, cfg.export_mesh);
            }
        }
        catch (const numerical_error& e)
        {
            report.failed  = true;
            report.failure = "level " + std::to_string(level) + ": " + e.what();
            break;
        }
        row.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        report.levels.push_back(row);
    }

    std::vector<double> l2, en;
    for (const auto& r : report.levels)
    {
        l2.push_back(r.l2_err);
        en.push_back(r.energy_err);
    }
    const auto l2r = compute_rates(l2);
    const auto enr = compute_rates(en);
    for (std::size_t i = 0; i < report.levels.size(); ++i)
    {
        report.levels[i].l2_order     = l2r[i];
        report.levels[i].energy_order = enr[i];
    }
    return report;
}

} // namespace detail

/* Runs every level of the study in sequence; a solver failure stops the study and marks the report. */
inline ConvergenceReport
run_study(const StudyConfig& cfg)
{
    cfg.validate();
    return cfg.dim == 2 ? detail::run_study<2>(cfg) : detail::run_study<3>(cfg);
}

/* Scientific notation with a mantissa in [0.1, 1) and three digits, e.g. 0.279E-06. */
inline std::string
format_sci3(double x)
{
    if (x == 0.0)
        return "0.000E+00";
    if (!std::isfinite(x))
        return std::to_string(x);
    const double ax   = std::abs(x);
    int          e    = static_cast<int>(std::floor(std::log10(ax))) + 1;
    double       m    = ax / std::pow(10.0, e);
    double       mr   = std::round(m * 1000.0) / 1000.0;
    if (mr >= 1.0)
    {
        mr /= 10.0;
        e += 1;
    }
    if (mr < 0.1)
    {
        mr *= 10.0;
        e -= 1;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.3fE%+03d", x < 0 ? "-" : "", mr, e);
    return buf;
}

inline std::string
format_order(const ObservedOrder& o)
{
    switch (o.kind)
    {
        case ObservedOrder::Kind::absent: return "";
        case ObservedOrder::Kind::exact: return "exact";
        case ObservedOrder::Kind::value:
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", o.value);
            return buf;
        }
    }
    return "";
}

inline constexpr const char* csv_header =
    "level,dofs,l2_err,l2_order,energy_err,energy_order,max_angle_deg,seconds";

namespace detail
{

inline std::string
csv_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string
csv_order(const ObservedOrder& o)
{
    switch (o.kind)
    {
        case ObservedOrder::Kind::absent: return "";
        case ObservedOrder::Kind::exact: return "exact";
        case ObservedOrder::Kind::value: return csv_number(o.value);
    }
    return "";
}

inline std::string
pad(const std::string& s, std::size_t w)
{
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

} // namespace detail

/*
 * table: grid | L2 error | order | energy error | order, followed by the free
 * dof count and the mesh's maximum angle; csv: one row per level with the
 * columns of csv_header.
 */
inline std::string
render(const ConvergenceReport& report, OutputFormat format)
{
    std::ostringstream os;
    const auto&        cfg = report.config;
    if (format == OutputFormat::csv)
    {
        os << csv_header << "\r\n";
        for (const auto& r : report.levels)
            os << r.level << ',' << r.dofs << ',' << detail::csv_number(r.l2_err) << ','
               << detail::csv_order(r.l2_order) << ',' << detail::csv_number(r.energy_err) << ','
               << detail::csv_order(r.energy_order) << ',' << detail::csv_number(r.max_angle_deg) << ','
               << detail::csv_number(r.seconds) << "\r\n";
        return os.str();
    }

    const bool        wg     = cfg.method == Method::wg;
    const std::string l2lbl  = wg ? "|Q_h u - u_h|_0" : "|I_h u - u_h|_0";
    const std::string enlbl  = wg ? "|P grad u - grad_w u_h|_0" : "|I_h u - u_h|_1";
    os << "# method=" << to_string(cfg.method) << " dim=" << cfg.dim << " family=" << to_string(cfg.family)
       << " k=" << cfg.degree << " problem=" << cfg.problem << " levels=" << cfg.level_min << ".."
       << cfg.level_max << " solver=" << to_string(cfg.solver.method) << '\n';
    os << "grid | " << detail::pad(l2lbl, 16) << ' ' << detail::pad("O(h^r)", 7) << " | " << detail::pad(enlbl, 26)
       << ' ' << detail::pad("O(h^r)", 7) << " | " << detail::pad("dofs", 9) << ' ' << detail::pad("max angle", 10)
       << '\n';
    for (const auto& r : report.levels)
    {
        char ang[32];
        std::snprintf(ang, sizeof ang, "%.2f", r.max_angle_deg);
        os << detail::pad(std::to_string(r.level), 4) << " | " << detail::pad(format_sci3(r.l2_err), 16) << ' '
           << detail::pad(format_order(r.l2_order), 7) << " | " << detail::pad(format_sci3(r.energy_err), 26) << ' '
           << detail::pad(format_order(r.energy_order), 7) << " | " << detail::pad(std::to_string(r.dofs), 9) << ' '
           << detail::pad(ang, 10) << '\n';
    }
    if (report.failed)
        os << "# FAILED: " << report.failure << '\n';
    return os.str();
}

inline void
write_report(const ConvergenceReport& report, OutputFormat format, const std::filesystem::path& path)
{
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs)
        throw std::runtime_error("write_report: cannot open '" + path.string() + "'");
    ofs << render(report, format);
    if (!ofs)
        throw std::runtime_error("write_report: write to '" + path.string() + "' failed");
}

/* Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends. */
inline std::vector<std::vector<std::string>>
parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string>              row;
    std::string                           field;
    bool                                  quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        const char ch = text[i];
        if (quoted)
        {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"')
            {
                field += '"';
                ++i;
            }
            else if (ch == '"')
                quoted = false;
            else
                field += ch;
            continue;
        }
        if (ch == '"')
        {
            quoted = true;
            any    = true;
        }
        else if (ch == ',')
        {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        }
        else if (ch == '\r' || ch == '\n')
        {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            if (any || !field.empty())
            {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        }
        else
        {
            field += ch;
            any = true;
        }
    }
    if (quoted)
        throw std::invalid_argument("parse_csv: unterminated quoted field");
    if (any || !field.empty())
    {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

/* Parses "A..B" (or a single level "A"). */
inline std::pair<int, int>
parse_level_range(const std::string& s)
{
    const auto dots = s.find("..");
    try
    {
        std::size_t used = 0;
        if (dots == std::string::npos)
        {
            const int a = std::stoi(s, &used);
            if (used != s.size())
                throw std::invalid_argument(s);
            return {a, a};
        }
        const std::string lhs = s.substr(0, dots), rhs = s.substr(dots + 2);
        const int         a = std::stoi(lhs, &used);
        if (used != lhs.size())
            throw std::invalid_argument(s);
        const int b = std::stoi(rhs, &used);
        if (used != rhs.size())
            throw std::invalid_argument(s);
        return {a, b};
    }
    catch (const std::logic_error&)
    {
        throw std::invalid_argument("parse_level_range: expected A..B, got '" + s + "'");
    }
}

} // namespace wgfem
