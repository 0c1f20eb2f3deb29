#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "wgfem/mesh.hpp"

namespace wgfem
{

struct QualityReport
{
    /* Largest interior angle of any cell (2D) or of any face triangle (3D). */
    double max_planar_angle_deg = 0.0;
    /* Largest dihedral angle of any tetrahedron; empty in 2D. */
    std::optional<double> max_dihedral_angle_deg;
    double min_diameter   = std::numeric_limits<double>::infinity();
    double max_diameter   = 0.0;
    double min_volume     = std::numeric_limits<double>::infinity();

    /* The angle that governs the maximum angle condition in this dimension. */
    double max_angle_deg() const { return max_dihedral_angle_deg.value_or(max_planar_angle_deg); }
};

template<int Dim>
double
cell_max_angle_deg(const Mesh<Dim>& mesh, index_t c)
{
    const auto p = mesh.cell_points(c);
    double     m = 0.0;
    if constexpr (Dim == 2)
    {
        for (int i = 0; i < 3; ++i)
            m = std::max(m, corner_angle_deg<2>(p[i], p[(i + 1) % 3], p[(i + 2) % 3]));
    }
    else
    {
        static constexpr int edges[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2},
                                            {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};
        for (const auto& e : edges)
            m = std::max(m, dihedral_angle_deg(p[e[0]], p[e[1]], p[e[2]], p[e[3]]));
    }
    return m;
}

template<int Dim>
QualityReport
quality(const Mesh<Dim>& mesh)
{
    QualityReport r;
    if constexpr (Dim == 3)
        r.max_dihedral_angle_deg = 0.0;

    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const auto p = mesh.cell_points(c);
        const double d = diameter<Dim>(p);
        r.min_diameter = std::min(r.min_diameter, d);
        r.max_diameter = std::max(r.max_diameter, d);
        r.min_volume   = std::min(r.min_volume, mesh.cell_volume(c));

        if constexpr (Dim == 2)
            r.max_planar_angle_deg = std::max(r.max_planar_angle_deg, cell_max_angle_deg(mesh, c));
        else
            r.max_dihedral_angle_deg = std::max(*r.max_dihedral_angle_deg, cell_max_angle_deg(mesh, c));
    }
    if constexpr (Dim == 3)
    {
        for (index_t f = 0; f < mesh.num_faces(); ++f)
        {
            const auto p = mesh.face_points(f);
            for (int i = 0; i < 3; ++i)
                r.max_planar_angle_deg =
                    std::max(r.max_planar_angle_deg, corner_angle_deg<3>(p[i], p[(i + 1) % 3], p[(i + 2) % 3]));
        }
    }
    return r;
}

} // namespace wgfem
