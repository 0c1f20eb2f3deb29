#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "wgfem/common.hpp"
#include "wgfem/geometry.hpp"

namespace wgfem
{

/*
 * A codimension-one simplex of the mesh (edge in 2D, triangle in 3D).
 * The unit normal points out of cells[0], the lower-indexed neighbour.
 */
template<int Dim>
struct Face
{
    std::array<index_t, Dim> vertices{};
    Point<Dim>               normal = Point<Dim>::Zero();
    double                   measure = 0.0;
    std::array<index_t, 2>   cells{invalid_index, invalid_index};
    bool                     boundary = true;

    std::size_t num_cells() const { return cells[1] == invalid_index ? 1 : 2; }
};

/* Face seen from a cell: `sign` is +1 when the face normal is outward for that cell. */
struct CellFace
{
    index_t face = invalid_index;
    int     sign = 1;
};

/*
 * Conforming simplicial mesh of a domain in R^Dim. Cells are reoriented at
 * construction to have positive signed volume; local face i is the face
 * opposite local vertex i. Immutable after construction.
 */
template<int Dim>
class Mesh
{
    static_assert(Dim == 2 || Dim == 3, "Mesh: only triangles and tetrahedra are supported");

public:
    static constexpr int dim            = Dim;
    static constexpr int verts_per_cell = Dim + 1;
    static constexpr int faces_per_cell = Dim + 1;

    using point_type = Point<Dim>;
    using cell_type  = std::array<index_t, Dim + 1>;
    using face_type  = Face<Dim>;

    Mesh() = default;

    Mesh(std::vector<point_type> vertices, std::vector<cell_type> cells)
        : vertices_(std::move(vertices)), cells_(std::move(cells))
    {
        orient_and_validate();
        build_faces();
    }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_cells() const { return cells_.size(); }
    std::size_t num_faces() const { return faces_.size(); }

    const std::vector<point_type>& vertices() const { return vertices_; }
    const std::vector<cell_type>&  cells() const { return cells_; }
    const std::vector<face_type>&  faces() const { return faces_; }

    const point_type& vertex(index_t v) const { return vertices_[v]; }
    const cell_type&  cell(index_t c) const { return cells_[c]; }
    const face_type&  face(index_t f) const { return faces_[f]; }

    const std::array<CellFace, Dim + 1>& cell_faces(index_t c) const { return cell_faces_[c]; }

    std::array<point_type, Dim + 1>
    cell_points(index_t c) const
    {
        std::array<point_type, Dim + 1> pts;
        for (int i = 0; i <= Dim; ++i)
            pts[i] = vertices_[cells_[c][i]];
        return pts;
    }

    std::array<point_type, Dim>
    face_points(index_t f) const
    {
        std::array<point_type, Dim> pts;
        for (int i = 0; i < Dim; ++i)
            pts[i] = vertices_[faces_[f].vertices[i]];
        return pts;
    }

    double cell_volume(index_t c) const { return volumes_[c]; }

    point_type
    cell_centroid(index_t c) const
    {
        const auto pts = cell_points(c);
        return barycenter<Dim>(pts);
    }

    /* Outward unit normal of local face i of cell c. */
    point_type
    outward_normal(index_t c, int i) const
    {
        const auto& cf = cell_faces_[c][i];
        return static_cast<double>(cf.sign) * faces_[cf.face].normal;
    }

    std::size_t
    num_boundary_faces() const
    {
        return static_cast<std::size_t>(
            std::count_if(faces_.begin(), faces_.end(), [](const face_type& f) { return f.boundary; }));
    }

    /* Flags every vertex lying on a boundary face. */
    std::vector<bool>
    boundary_vertices() const
    {
        std::vector<bool> on(vertices_.size(), false);
        for (const auto& f : faces_)
            if (f.boundary)
                for (auto v : f.vertices)
                    on[v] = true;
        return on;
    }

private:
    void
    orient_and_validate()
    {
        volumes_.resize(cells_.size());
        for (std::size_t c = 0; c < cells_.size(); ++c)
        {
            auto& cell = cells_[c];
            for (auto v : cell)
                if (v >= vertices_.size())
                    throw std::invalid_argument("Mesh: cell " + std::to_string(c) +
                                                " references vertex out of range");
            auto   pts = cell_points(c);
            double vol = signed_volume<Dim>(pts);
            if (vol < 0.0)
            {
                std::swap(cell[Dim - 1], cell[Dim]);
                vol = -vol;
            }
            if (!(vol > 0.0))
                throw std::invalid_argument("Mesh: cell " + std::to_string(c) + " has zero volume");
            volumes_[c] = vol;
        }

        std::vector<cell_type> sorted(cells_);
        for (auto& s : sorted)
            std::sort(s.begin(), s.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("Mesh: duplicate cells");
    }

    void
    build_faces()
    {
        struct slot
        {
            std::array<index_t, Dim> key;
            index_t                  cell;
            int                      local;
        };

        std::vector<slot> slots;
        slots.reserve(cells_.size() * (Dim + 1));
        for (index_t c = 0; c < cells_.size(); ++c)
            for (int i = 0; i <= Dim; ++i)
            {
                slot s{{}, c, i};
                int  m = 0;
                for (int j = 0; j <= Dim; ++j)
                    if (j != i)
                        s.key[m++] = cells_[c][j];
                std::sort(s.key.begin(), s.key.end());
                slots.push_back(s);
            }

        std::sort(slots.begin(), slots.end(), [](const slot& a, const slot& b) {
            return std::tie(a.key, a.cell, a.local) < std::tie(b.key, b.cell, b.local);
        });

        // group identical keys, then number faces by first occurrence in cell order
        std::vector<std::pair<std::size_t, std::size_t>> groups; // [begin, end)
        for (std::size_t i = 0; i < slots.size();)
        {
            std::size_t j = i + 1;
            while (j < slots.size() && slots[j].key == slots[i].key)
                ++j;
            if (j - i > 2)
                throw std::invalid_argument("Mesh: face shared by more than two cells");
            groups.emplace_back(i, j);
            i = j;
        }
        std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
            const auto& sa = slots[a.first];
            const auto& sb = slots[b.first];
            return std::tie(sa.cell, sa.local) < std::tie(sb.cell, sb.local);
        });

        faces_.assign(groups.size(), face_type{});
        cell_faces_.assign(cells_.size(), {});
        for (std::size_t f = 0; f < groups.size(); ++f)
        {
            const auto [b, e] = groups[f];
            face_type& face   = faces_[f];
            face.vertices     = slots[b].key;
            face.cells[0]     = slots[b].cell;
            face.boundary     = (e - b == 1);
            if (!face.boundary)
                face.cells[1] = slots[b + 1].cell;

            const auto fp  = face_points(f);
            face.measure   = simplex_measure<Dim>(fp);
            face.normal    = unit_normal(fp);
            const auto fc  = barycenter<Dim>(fp);
            const auto cc  = cell_centroid(face.cells[0]);
            if (face.normal.dot(fc - cc) < 0.0)
                face.normal = -face.normal;

            cell_faces_[slots[b].cell][slots[b].local] = CellFace{f, 1};
            if (!face.boundary)
                cell_faces_[slots[b + 1].cell][slots[b + 1].local] = CellFace{f, -1};
        }
    }

    static point_type
    unit_normal(const std::array<point_type, Dim>& fp)
    {
        if constexpr (Dim == 2)
        {
            const Point<2> t = fp[1] - fp[0];
            return Point<2>(t.y(), -t.x()).normalized();
        }
        else
        {
            return (fp[1] - fp[0]).cross(fp[2] - fp[0]).normalized();
        }
    }

    std::vector<point_type>                   vertices_;
    std::vector<cell_type>                    cells_;
    std::vector<double>                       volumes_;
    std::vector<face_type>                    faces_;
    std::vector<std::array<CellFace, Dim + 1>> cell_faces_;
};

/* Largest mesh the generators will build unless told otherwise. */
inline constexpr std::size_t default_max_cells = 2'000'000;

/*
 * Unit square cut into n x n squares, each split along the same diagonal
 * (2D), or unit cube cut into n^3 cubes, each split into the 6 Kuhn
 * tetrahedra sharing the main diagonal (3D).
 */
template<int Dim>
Mesh<Dim>
build_uniform_mesh(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("build_uniform_mesh: n must be positive");

    using cell_type = typename Mesh<Dim>::cell_type;
    const double h  = 1.0 / static_cast<double>(n);
    const auto   np = n + 1;

    std::vector<Point<Dim>> verts;
    std::vector<cell_type>  cells;

    if constexpr (Dim == 2)
    {
        for (std::size_t j = 0; j <= n; ++j)
            for (std::size_t i = 0; i <= n; ++i)
                verts.emplace_back(i * h, j * h);
        auto id = [np](std::size_t i, std::size_t j) { return j * np + i; };
        cells.reserve(2 * n * n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
            {
                cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
    }
    else
    {
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t j = 0; j <= n; ++j)
                for (std::size_t i = 0; i <= n; ++i)
                    verts.emplace_back(i * h, j * h, k * h);
        auto id = [np](std::size_t i, std::size_t j, std::size_t k) { return (k * np + j) * np + i; };
        static constexpr std::array<std::array<int, 3>, 6> perms{
            {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
        cells.reserve(6 * n * n * n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    for (const auto& p : perms)
                    {
                        std::array<std::size_t, 3> c{i, j, k};
                        cell_type                  tet;
                        tet[0] = id(c[0], c[1], c[2]);
                        for (int s = 0; s < 3; ++s)
                        {
                            c[p[s]] += 1;
                            tet[s + 1] = id(c[0], c[1], c[2]);
                        }
                        cells.push_back(tet);
                    }
    }
    return Mesh<Dim>(std::move(verts), std::move(cells));
}

/* Cell count of build_degenerate_mesh at a given level, without building it. */
template<int Dim>
std::size_t
degenerate_mesh_cell_count(std::size_t level)
{
    const std::size_t n = std::size_t{1} << level;
    if constexpr (Dim == 2)
        return 2 * n * n * (2 * n + 1);
    else
        return 4 * n * n * (n * n + (n + 1) * (n + 1) + n * (n + 1));
}

namespace detail
{

struct Lantern
{
    std::vector<Point<2>>               vertices;
    std::vector<std::array<index_t, 3>> triangles;
};

// rows y_j = j h^2/2; even rows carry x = i h, odd rows x = (i + 1/2) h plus the two walls
inline Lantern
lantern(std::size_t n)
{
    const double      h    = 1.0 / static_cast<double>(n);
    const double      t    = h * h;
    const std::size_t rows = 2 * n * n;
    Lantern           out;
    auto&             verts = out.vertices;
    auto&             cells = out.triangles;

    std::vector<std::size_t> row_start(rows + 1);
    for (std::size_t j = 0; j <= rows; ++j)
    {
        row_start[j]   = verts.size();
        const double y = j == rows ? 1.0 : j * 0.5 * t;
        if (j % 2 == 0)
            for (std::size_t i = 0; i <= n; ++i)
                verts.emplace_back(i == n ? 1.0 : i * h, y);
        else
        {
            verts.emplace_back(0.0, y);
            for (std::size_t i = 0; i < n; ++i)
                verts.emplace_back((i + 0.5) * h, y);
            verts.emplace_back(1.0, y);
        }
    }
    // even row: index i <-> x = i h; odd row: 0 <-> wall, i+1 <-> x = (i+1/2) h, n+1 <-> wall
    cells.reserve(rows * (2 * n + 1));
    for (std::size_t j = 0; j < rows; ++j)
    {
        const bool        lower_even = (j % 2 == 0);
        const std::size_t ev         = lower_even ? row_start[j] : row_start[j + 1];
        const std::size_t od         = lower_even ? row_start[j + 1] : row_start[j];
        for (std::size_t i = 0; i < n; ++i)
            cells.push_back({ev + i, ev + i + 1, od + i + 1}); // base on the even row
        for (std::size_t i = 0; i + 1 < n; ++i)
            cells.push_back({od + i + 1, od + i + 2, ev + i + 1}); // base on the odd row
        cells.push_back({ev, od + 1, od});                         // wall halves
        cells.push_back({ev + n, od + n + 1, od + n});
    }
    return out;
}

} // namespace detail

/*
 * Families whose maximum angle tends to 180 degrees, with n = 2^level and
 * h = 1/n. Both are Schwarz lanterns: layers of thickness h^2/2 between
 * planes of vertices that alternate between a grid G = {i h} and the offset
 * grid O = {0, (i + 1/2) h, 1}, so every vertex sits over the midpoint of an
 * edge (or the centre of a square) of the neighbouring plane.
 *  - 2D: each strip is filled with flat triangles, an interval of one row
 *    joined to the vertex above its midpoint. The apex angle is 2 atan(n).
 *  - 3D: each layer is the product of the 2D strip pattern in x and in y:
 *    a G-square joined to the O-vertex over it, an O-square joined to the
 *    G-vertex under it (both split into two tetrahedra along the diagonal
 *    through their lowest-numbered vertex), and crossing G-edge/O-edge pairs.
 */
template<int Dim>
Mesh<Dim>
build_degenerate_mesh(std::size_t level, std::size_t max_cells = default_max_cells)
{
    if (level == 0)
        throw std::invalid_argument("build_degenerate_mesh: level must be positive");
    if (level > 16 || degenerate_mesh_cell_count<Dim>(level) > max_cells)
        throw std::invalid_argument("build_degenerate_mesh: level " + std::to_string(level) +
                                    " exceeds the cell limit of " + std::to_string(max_cells));

    using cell_type     = typename Mesh<Dim>::cell_type;
    const std::size_t n = std::size_t{1} << level;
    auto              l = detail::lantern(n);

    if constexpr (Dim == 2)
    {
        return Mesh<2>(std::move(l.vertices), std::move(l.triangles));
    }
    else
    {
        const double      h      = 1.0 / static_cast<double>(n);
        const std::size_t planes = 2 * n * n + 1;
        const std::size_t ng = n + 1, no = n + 2;

        std::vector<double> xg(ng), xo(no);
        for (std::size_t i = 0; i < ng; ++i)
            xg[i] = i == n ? 1.0 : i * h;
        xo[0] = 0.0;
        xo[n + 1] = 1.0;
        for (std::size_t i = 1; i <= n; ++i)
            xo[i] = (i - 0.5) * h;

        std::vector<Point<3>>    verts;
        std::vector<std::size_t> start(planes);
        for (std::size_t k = 0; k < planes; ++k)
        {
            start[k]       = verts.size();
            const double z = k + 1 == planes ? 1.0 : k * 0.5 * h * h;
            const auto&  x = k % 2 == 0 ? xg : xo;
            for (std::size_t j = 0; j < x.size(); ++j)
                for (std::size_t i = 0; i < x.size(); ++i)
                    verts.emplace_back(x[i], x[j], z);
        }

        std::vector<cell_type> cells;
        cells.reserve(degenerate_mesh_cell_count<3>(level));
        auto pyramid = [&cells](std::array<index_t, 4> quad, index_t apex) {
            // quad in cyclic order; cut along the diagonal through its smallest vertex
            const auto r = static_cast<std::size_t>(std::min_element(quad.begin(), quad.end()) - quad.begin());
            const index_t a = quad[r], b = quad[(r + 1) % 4], c = quad[(r + 2) % 4], d = quad[(r + 3) % 4];
            cells.push_back({a, b, c, apex});
            cells.push_back({a, c, d, apex});
        };
        for (std::size_t k = 0; k + 1 < planes; ++k)
        {
            const std::size_t gs = k % 2 == 0 ? start[k] : start[k + 1];
            const std::size_t os = k % 2 == 0 ? start[k + 1] : start[k];
            auto g = [&](std::size_t i, std::size_t j) -> index_t { return gs + j * ng + i; };
            auto o = [&](std::size_t i, std::size_t j) -> index_t { return os + j * no + i; };
            // x-direction pattern: G-interval i under O-vertex i+1; O-interval m over G-vertex m
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    pyramid({g(i, j), g(i + 1, j), g(i + 1, j + 1), g(i, j + 1)}, o(i + 1, j + 1));
            for (std::size_t l2 = 0; l2 <= n; ++l2)
                for (std::size_t m = 0; m <= n; ++m)
                    pyramid({o(m, l2), o(m + 1, l2), o(m + 1, l2 + 1), o(m, l2 + 1)}, g(m, l2));
            for (std::size_t l2 = 0; l2 <= n; ++l2)
                for (std::size_t i = 0; i < n; ++i)
                    cells.push_back({g(i, l2), g(i + 1, l2), o(i + 1, l2), o(i + 1, l2 + 1)});
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t m = 0; m <= n; ++m)
                    cells.push_back({g(m, j), g(m, j + 1), o(m, j + 1), o(m + 1, j + 1)});
        }
        return Mesh<3>(std::move(verts), std::move(cells));
    }
}


} // namespace wgfem
