#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgfem/mesh.hpp"

namespace wgfem
{

/* A named scalar field attached to cells or vertices of a mesh. */
struct ScalarField
{
    std::string         name;
    std::vector<double> values;
};

namespace detail
{

inline void
write_vtk_scalars(std::ostream& os, const std::vector<ScalarField>& fields)
{
    for (const auto& f : fields)
    {
        os << "SCALARS " << f.name << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (double v : f.values)
            os << v << '\n';
    }
}

} // namespace detail

/* Legacy ASCII VTK, DATASET UNSTRUCTURED_GRID. */
template<int Dim>
void
write_vtk(std::ostream&                   os,
          const Mesh<Dim>&                mesh,
          const std::vector<ScalarField>& cell_fields  = {},
          const std::vector<ScalarField>& point_fields = {})
{
    for (const auto& f : cell_fields)
        if (f.values.size() != mesh.num_cells())
            throw std::invalid_argument("write_vtk: cell field '" + f.name + "' has " +
                                        std::to_string(f.values.size()) + " values, mesh has " +
                                        std::to_string(mesh.num_cells()) + " cells");
    for (const auto& f : point_fields)
        if (f.values.size() != mesh.num_vertices())
            throw std::invalid_argument("write_vtk: point field '" + f.name + "' has " +
                                        std::to_string(f.values.size()) + " values, mesh has " +
                                        std::to_string(mesh.num_vertices()) + " vertices");
    for (const auto& f : cell_fields)
        if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos)
            throw std::invalid_argument("write_vtk: field names must be non-empty without whitespace");
    for (const auto& f : point_fields)
        if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos)
            throw std::invalid_argument("write_vtk: field names must be non-empty without whitespace");

    const auto nc = mesh.num_cells();
    const auto nv = mesh.num_vertices();

    os << std::setprecision(17);
    os << "# vtk DataFile Version 3.0\n";
    os << "wgfem mesh\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices())
    {
        os << p(0) << ' ' << p(1) << ' ' << (Dim == 3 ? p(2) : 0.0) << '\n';
    }
    os << "CELLS " << nc << ' ' << nc * (Dim + 2) << '\n';
    for (const auto& c : mesh.cells())
    {
        os << Dim + 1;
        for (auto v : c)
            os << ' ' << v;
        os << '\n';
    }
    os << "CELL_TYPES " << nc << '\n';
    const int vtk_type = (Dim == 2) ? 5 : 10; // VTK_TRIANGLE, VTK_TETRA
    for (std::size_t c = 0; c < nc; ++c)
        os << vtk_type << '\n';

    if (!cell_fields.empty())
    {
        os << "CELL_DATA " << nc << '\n';
        detail::write_vtk_scalars(os, cell_fields);
    }
    if (!point_fields.empty())
    {
        os << "POINT_DATA " << nv << '\n';
        detail::write_vtk_scalars(os, point_fields);
    }
}

template<int Dim>
void
export_vtk(const Mesh<Dim>&                mesh,
           const std::vector<ScalarField>& cell_fields,
           const std::vector<ScalarField>& point_fields,
           const std::filesystem::path&    path)
{
    std::ofstream ofs(path);
    if (!ofs)
        throw std::runtime_error("export_vtk: cannot open '" + path.string() + "' for writing");
    write_vtk(ofs, mesh, cell_fields, point_fields);
    if (!ofs)
        throw std::runtime_error("export_vtk: write to '" + path.string() + "' failed");
}

/*
 * Plain-text mesh dump:
 *
 *   wgfem-mesh 1
 *   dim <2|3>
 *   vertices <N>
 *   <x> <y> [<z>]          (N lines)
 *   cells <M>
 *   <v0> <v1> <v2> [<v3>]  (M lines, zero-based vertex indices)
 */
template<int Dim>
void
write_mesh(std::ostream& os, const Mesh<Dim>& mesh)
{
    os << std::setprecision(17);
    os << "wgfem-mesh 1\n";
    os << "dim " << Dim << '\n';
    os << "vertices " << mesh.num_vertices() << '\n';
    for (const auto& p : mesh.vertices())
    {
        for (int i = 0; i < Dim; ++i)
            os << (i ? " " : "") << p(i);
        os << '\n';
    }
    os << "cells " << mesh.num_cells() << '\n';
    for (const auto& c : mesh.cells())
    {
        for (int i = 0; i <= Dim; ++i)
            os << (i ? " " : "") << c[i];
        os << '\n';
    }
}

template<int Dim>
Mesh<Dim>
read_mesh(std::istream& is)
{
    auto expect = [&is](const std::string& word) {
        std::string w;
        if (!(is >> w) || w != word)
            throw std::runtime_error("read_mesh: expected '" + word + "'");
    };

    expect("wgfem-mesh");
    int version = 0;
    if (!(is >> version) || version != 1)
        throw std::runtime_error("read_mesh: unsupported format version");
    expect("dim");
    int dim = 0;
    if (!(is >> dim) || dim != Dim)
        throw std::runtime_error("read_mesh: dimension mismatch");

    expect("vertices");
    std::size_t nv = 0;
    if (!(is >> nv))
        throw std::runtime_error("read_mesh: bad vertex count");
    std::vector<Point<Dim>> verts(nv);
    for (auto& p : verts)
        for (int i = 0; i < Dim; ++i)
            if (!(is >> p(i)))
                throw std::runtime_error("read_mesh: truncated vertex list");

    expect("cells");
    std::size_t nc = 0;
    if (!(is >> nc))
        throw std::runtime_error("read_mesh: bad cell count");
    std::vector<typename Mesh<Dim>::cell_type> cells(nc);
    for (auto& c : cells)
        for (auto& v : c)
            if (!(is >> v))
                throw std::runtime_error("read_mesh: truncated cell list");

    return Mesh<Dim>(std::move(verts), std::move(cells));
}

} // namespace wgfem
