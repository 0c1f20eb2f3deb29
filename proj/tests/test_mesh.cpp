#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "wgfem/mesh.hpp"
#include "wgfem/mesh_io.hpp"
#include "wgfem/quality.hpp"

using namespace wgfem;

namespace
{

constexpr double rad2deg = 180.0 / M_PI;

template<int Dim>
void
check_invariants(const Mesh<Dim>& m)
{
    double vol = 0.0;
    for (index_t c = 0; c < m.num_cells(); ++c)
    {
        ASSERT_GT(m.cell_volume(c), 0.0);
        const auto pts = m.cell_points(c);
        ASSERT_GT(signed_volume<Dim>(pts), 0.0);
        vol += m.cell_volume(c);
        for (int i = 0; i <= Dim; ++i)
        {
            const auto& cf = m.cell_faces(c)[i];
            const auto& f  = m.face(cf.face);
            // local face i is opposite local vertex i
            for (auto v : f.vertices)
                ASSERT_NE(v, m.cell(c)[i]);
            const auto fp  = m.face_points(cf.face);
            const auto fc  = barycenter<Dim>(fp);
            ASSERT_GT(m.outward_normal(c, i).dot(fc - m.cell_centroid(c)), 0.0);
        }
    }
    EXPECT_NEAR(vol, 1.0, 1e-12);

    std::size_t interior = 0, boundary = 0;
    for (index_t f = 0; f < m.num_faces(); ++f)
    {
        const auto& face = m.face(f);
        EXPECT_NEAR(face.normal.norm(), 1.0, 1e-14);
        EXPECT_GT(face.measure, 0.0);
        EXPECT_EQ(face.boundary, face.num_cells() == 1);
        EXPECT_TRUE(std::is_sorted(face.vertices.begin(), face.vertices.end()));
        if (face.boundary)
            ++boundary;
        else
        {
            ++interior;
            EXPECT_LT(face.cells[0], face.cells[1]);
        }
    }
    EXPECT_EQ(m.num_cells() * (Dim + 1), 2 * interior + boundary);
    EXPECT_EQ(boundary, m.num_boundary_faces());
}

Mesh<2>
single_triangle(Point<2> a, Point<2> b, Point<2> c)
{
    return Mesh<2>({a, b, c}, {{0, 1, 2}});
}

} // namespace

TEST(UniformMesh, Counts)
{
    const auto m1 = build_uniform_mesh<2>(1);
    EXPECT_EQ(m1.num_cells(), 2u);
    EXPECT_EQ(m1.num_vertices(), 4u);
    EXPECT_EQ(m1.num_faces(), 5u);

    const auto m2 = build_uniform_mesh<2>(2);
    EXPECT_EQ(m2.num_cells(), 8u);
    EXPECT_EQ(m2.num_vertices(), 9u);

    const auto m3 = build_uniform_mesh<3>(2);
    EXPECT_EQ(m3.num_cells(), 48u);
    EXPECT_EQ(m3.num_vertices(), 27u);
}

TEST(UniformMesh, RejectsZero)
{
    EXPECT_THROW(build_uniform_mesh<2>(0), std::invalid_argument);
    EXPECT_THROW(build_uniform_mesh<3>(0), std::invalid_argument);
}

TEST(UniformMesh, Invariants)
{
    for (std::size_t n : {1u, 2u, 3u, 8u})
    {
        check_invariants(build_uniform_mesh<2>(n));
        check_invariants(build_uniform_mesh<3>(n));
    }
}

TEST(UniformMesh, MaxAngleConstant)
{
    for (std::size_t n : {1u, 2u, 4u, 8u})
    {
        EXPECT_NEAR(quality(build_uniform_mesh<2>(n)).max_angle_deg(), 90.0, 1e-10);
        EXPECT_NEAR(quality(build_uniform_mesh<3>(n)).max_angle_deg(), 90.0, 1e-10);
    }
}

TEST(DegenerateMesh, CountsFollowTheLanternLayout)
{
    // level 1: n = 2, 2 n^2 = 8 strips of 2 n + 1 triangles
    const auto m = build_degenerate_mesh<2>(1);
    EXPECT_EQ(m.num_cells(), 40u);
    EXPECT_EQ(m.num_vertices(), 5u * 3u + 4u * 4u);
    for (std::size_t level = 1; level <= 4; ++level)
    {
        EXPECT_EQ(build_degenerate_mesh<2>(level).num_cells(), degenerate_mesh_cell_count<2>(level));
        if (level <= 3)
            EXPECT_EQ(build_degenerate_mesh<3>(level).num_cells(), degenerate_mesh_cell_count<3>(level));
    }
    // 3D level 1: 8 layers, each with 2 (4 + 9) pyramid halves and 2 * 6 edge pairs
    EXPECT_EQ(degenerate_mesh_cell_count<3>(1), 8u * (2u * (4u + 9u) + 12u));
}

TEST(DegenerateMesh, ApexAngleFormula)
{
    // apex over a base of h with height h^2/2: 2 atan((h/2) / (h^2/2)) = 2 atan(n)
    EXPECT_NEAR(quality(build_degenerate_mesh<2>(1)).max_planar_angle_deg, 2.0 * std::atan(2.0) * rad2deg, 1e-9);
    EXPECT_NEAR(quality(build_degenerate_mesh<2>(1)).max_planar_angle_deg, 126.87, 5e-3);
    EXPECT_NEAR(quality(build_degenerate_mesh<2>(3)).max_planar_angle_deg, 165.75, 5e-3);
}

TEST(DegenerateMesh, Invariants)
{
    for (std::size_t level = 1; level <= 4; ++level)
        check_invariants(build_degenerate_mesh<2>(level));
    for (std::size_t level = 1; level <= 2; ++level)
        check_invariants(build_degenerate_mesh<3>(level));
}

TEST(DegenerateMesh, MaxAngleGrowsTowards180)
{
    double prev = 0.0;
    for (std::size_t level = 1; level <= 5; ++level)
    {
        const double a = quality(build_degenerate_mesh<2>(level)).max_angle_deg();
        EXPECT_GT(a, prev);
        EXPECT_LT(a, 180.0);
        if (level == 4)
            EXPECT_GT(a, 170.0);
        prev = a;
    }
    prev = 0.0;
    for (std::size_t level = 1; level <= 3; ++level)
    {
        const auto q = quality(build_degenerate_mesh<3>(level));
        ASSERT_TRUE(q.max_dihedral_angle_deg.has_value());
        EXPECT_GT(*q.max_dihedral_angle_deg, prev);
        prev = *q.max_dihedral_angle_deg;
    }
    EXPECT_GT(prev, 165.0);
}

TEST(DegenerateMesh, RejectsLevelZeroAndOversizedLevels)
{
    EXPECT_THROW(build_degenerate_mesh<2>(0), std::invalid_argument);
    EXPECT_THROW(build_degenerate_mesh<3>(0), std::invalid_argument);
    EXPECT_THROW(build_degenerate_mesh<2>(3, 100), std::invalid_argument);
    EXPECT_THROW(build_degenerate_mesh<3>(6), std::invalid_argument);
    EXPECT_NO_THROW(build_degenerate_mesh<2>(1, degenerate_mesh_cell_count<2>(1)));
}

TEST(Quality, SingleTriangles)
{
    EXPECT_NEAR(quality(single_triangle({0, 0}, {1, 0}, {0, 1})).max_angle_deg(), 90.0, 1e-12);
    EXPECT_NEAR(quality(single_triangle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2})).max_angle_deg(), 60.0, 1e-12);
    const double expect = 180.0 - 2.0 * std::atan(0.02) * rad2deg;
    EXPECT_NEAR(quality(single_triangle({0, 0}, {1, 0}, {0.5, 0.01})).max_angle_deg(), expect, 1e-10);
    EXPECT_NEAR(expect, 177.71, 5e-3);
}

TEST(Quality, ReportFields)
{
    const auto q = quality(single_triangle({0, 0}, {2, 0}, {0, 1}));
    EXPECT_NEAR(q.min_diameter, std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(q.max_diameter, std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(q.min_volume, 1.0, 1e-14);
    EXPECT_FALSE(q.max_dihedral_angle_deg.has_value());
}

TEST(Quality, ReferenceTetDihedral)
{
    const Mesh<3> m({Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0), Point<3>(0, 0, 1)}, {{0, 1, 2, 3}});
    const auto    q = quality(m);
    // the three edges at the origin have right dihedral angles; the others are acos(1/sqrt 3)
    EXPECT_NEAR(*q.max_dihedral_angle_deg, 90.0, 1e-12);
    EXPECT_NEAR(q.max_planar_angle_deg, 90.0, 1e-12);
}

TEST(MeshConstruction, ReorientsNegativeCells)
{
    const Mesh<2> m({Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)}, {{0, 2, 1}});
    EXPECT_NEAR(m.cell_volume(0), 0.5, 1e-15);
    const auto pts = m.cell_points(0);
    EXPECT_GT(signed_volume<2>(pts), 0.0);
}

TEST(MeshConstruction, RejectsBadInput)
{
    using P = Point<2>;
    EXPECT_THROW(Mesh<2>({P(0, 0), P(1, 0), P(2, 0)}, {{0, 1, 2}}), std::invalid_argument);
    EXPECT_THROW(Mesh<2>({P(0, 0), P(1, 0), P(0, 1)}, {{0, 1, 3}}), std::invalid_argument);
    EXPECT_THROW(Mesh<2>({P(0, 0), P(1, 0), P(0, 1)}, {{0, 1, 2}, {2, 0, 1}}), std::invalid_argument);
    // three triangles on one edge
    EXPECT_THROW(Mesh<2>({P(0, 0), P(1, 0), P(0, 1), P(0, -1), P(1, 1)}, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}),
                 std::invalid_argument);
}

TEST(Vtk, TwoCellMesh)
{
    const auto         m = build_uniform_mesh<2>(1);
    std::ostringstream os;
    write_vtk(os, m);
    const std::string s = os.str();
    EXPECT_NE(s.find("# vtk DataFile Version"), std::string::npos);
    EXPECT_NE(s.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
    EXPECT_NE(s.find("POINTS 4"), std::string::npos);
    EXPECT_NE(s.find("CELLS 2"), std::string::npos);
    EXPECT_EQ(s.find("CELL_DATA"), std::string::npos);
}

TEST(Vtk, CellAndPointFields)
{
    const auto         m = build_uniform_mesh<3>(1);
    std::ostringstream os;
    write_vtk(os, m, {{"c", std::vector<double>(m.num_cells(), 1.5)}}, {{"p", std::vector<double>(8, 2.0)}});
    const std::string s = os.str();
    EXPECT_NE(s.find("CELL_DATA 6"), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA 8"), std::string::npos);
    EXPECT_NE(s.find("SCALARS c double"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 6"), std::string::npos);
}

TEST(Vtk, RejectsMismatchedFields)
{
    const auto         m = build_uniform_mesh<2>(1);
    std::ostringstream os;
    EXPECT_THROW(write_vtk(os, m, {{"c", {1.0}}}), std::invalid_argument);
    EXPECT_THROW(write_vtk(os, m, {}, {{"p", {1.0, 2.0}}}), std::invalid_argument);
    EXPECT_THROW(write_vtk(os, m, {{"bad name", {1.0, 2.0}}}), std::invalid_argument);
}

TEST(Vtk, ExportToFile)
{
    const auto path = std::filesystem::temp_directory_path() / "wgfem_test_export.vtk";
    const auto m    = build_uniform_mesh<2>(2);
    export_vtk(m, {}, {}, path);
    std::ifstream is(path);
    std::string   first;
    std::getline(is, first);
    EXPECT_EQ(first.rfind("# vtk DataFile Version", 0), 0u);
    std::filesystem::remove(path);
    EXPECT_THROW(export_vtk(m, {}, {}, "/nonexistent-dir/x.vtk"), std::runtime_error);
}

TEST(MeshDump, RoundTrip)
{
    const auto         m = build_degenerate_mesh<3>(1);
    std::ostringstream os;
    write_mesh(os, m);
    std::istringstream is(os.str());
    const auto         r = read_mesh<3>(is);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_cells(), m.num_cells());
    for (index_t v = 0; v < m.num_vertices(); ++v)
        EXPECT_EQ(r.vertex(v), m.vertex(v));
    for (index_t c = 0; c < m.num_cells(); ++c)
        EXPECT_EQ(r.cell(c), m.cell(c));
    EXPECT_EQ(r.num_faces(), m.num_faces());
}

TEST(MeshDump, RejectsMalformedInput)
{
    std::istringstream wrong_dim("wgfem-mesh 1\ndim 3\nvertices 0\ncells 0\n");
    EXPECT_THROW(read_mesh<2>(wrong_dim), std::runtime_error);
    std::istringstream truncated("wgfem-mesh 1\ndim 2\nvertices 3\n0 0\n1 0\n");
    EXPECT_THROW(read_mesh<2>(truncated), std::runtime_error);
    std::istringstream header("mesh 1\n");
    EXPECT_THROW(read_mesh<2>(header), std::runtime_error);
}
