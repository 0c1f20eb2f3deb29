#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "wgfem/linsolve.hpp"
#include "wgfem/mesh.hpp"
#include "wgfem/projection.hpp"

namespace wgfem
{

/* Continuous piecewise-linear Lagrange space; vertices on boundary faces are eliminated. */
template<int Dim>
class P1Space
{
public:
    explicit P1Space(Mesh<Dim>&&) = delete;
    explicit P1Space(const Mesh<Dim>& mesh) : mesh_(&mesh)
    {
        const auto on_boundary = mesh.boundary_vertices();
        dof_.assign(mesh.num_vertices(), invalid_index);
        for (index_t v = 0; v < mesh.num_vertices(); ++v)
            if (!on_boundary[v])
                dof_[v] = num_free_++;
    }

    const Mesh<Dim>& mesh() const { return *mesh_; }
    std::size_t      num_free() const { return num_free_; }
    /* Free dof of vertex v, or invalid_index on the boundary. */
    index_t          dof(index_t v) const { return dof_[v]; }

private:
    const Mesh<Dim>*     mesh_;
    std::vector<index_t> dof_;
    std::size_t          num_free_ = 0;
};

/* Barycentric gradients of a simplex; row i is grad lambda_i (constant on the cell). */
template<int Dim>
Eigen::Matrix<double, Dim + 1, Dim>
barycentric_gradients(const std::array<Point<Dim>, Dim + 1>& p)
{
    Eigen::Matrix<double, Dim, Dim> E;
    for (int i = 0; i < Dim; ++i)
        E.col(i) = p[i + 1] - p[0];
    if (!(std::abs(E.determinant()) > 0.0))
        throw numerical_error("barycentric_gradients: zero-volume cell");
    const Eigen::Matrix<double, Dim, Dim> Einv = E.inverse();
    Eigen::Matrix<double, Dim + 1, Dim>   g;
    g.template bottomRows<Dim>() = Einv;
    g.row(0)                     = -Einv.colwise().sum();
    return g;
}

template<int Dim>
Eigen::Matrix<double, Dim + 1, 1>
barycentric_coordinates(const std::array<Point<Dim>, Dim + 1>& p, const Point<Dim>& x)
{
    Eigen::Matrix<double, Dim, Dim> E;
    for (int i = 0; i < Dim; ++i)
        E.col(i) = p[i + 1] - p[0];
    const Point<Dim>                  mu = E.partialPivLu().solve(x - p[0]);
    Eigen::Matrix<double, Dim + 1, 1> l;
    l(0)                             = 1.0 - mu.sum();
    l.template tail<Dim>()           = mu;
    return l;
}

inline constexpr int p1_load_quad_degree = 5;

/*
 * Stiffness sum_T (grad phi_i, grad phi_j)_T and load (f, phi_i) over the
 * free vertices. With `g`, boundary vertices take the values g(x_v) and their
 * couplings are moved to the right-hand side; otherwise they are zero.
 */
template<int Dim, typename F>
SparseSystem
assemble_p1(const P1Space<Dim>& space, const F& f, const ScalarFunction<Dim>& g = nullptr)
{
    const auto& mesh = space.mesh();
    const auto  n    = static_cast<Eigen::Index>(space.num_free());

    SparseSystem sys;
    sys.b = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_cells() * (Dim + 1) * (Dim + 1));

    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const auto p   = mesh.cell_points(c);
        const auto gr  = barycentric_gradients<Dim>(p);
        const auto vol = mesh.cell_volume(c);
        const Eigen::Matrix<double, Dim + 1, Dim + 1> K = vol * gr * gr.transpose();

        Eigen::Matrix<double, Dim + 1, 1> load = Eigen::Matrix<double, Dim + 1, 1>::Zero();
        const auto                        pq   = map_quadrature<Dim>(p, p1_load_quad_degree);
        for (std::size_t q = 0; q < pq.size(); ++q)
            load += pq.weights[q] * f(pq.points[q]) * barycentric_coordinates<Dim>(p, pq.points[q]);

        const auto& cell = mesh.cell(c);
        for (int i = 0; i <= Dim; ++i)
        {
            const index_t di = space.dof(cell[i]);
            if (di == invalid_index)
                continue;
            sys.b(static_cast<Eigen::Index>(di)) += load(i);
            for (int j = 0; j <= Dim; ++j)
            {
                const index_t dj = space.dof(cell[j]);
                if (dj != invalid_index)
                    trip.emplace_back(static_cast<int>(di), static_cast<int>(dj), K(i, j));
                else if (g)
                    sys.b(static_cast<Eigen::Index>(di)) -= K(i, j) * g(mesh.vertex(cell[j]));
            }
        }
    }
    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

/* Nodal values on all vertices from a free-dof solution; boundary values from g (or zero). */
template<int Dim>
Eigen::VectorXd
p1_nodal_values(const P1Space<Dim>& space, const Eigen::VectorXd& free, const ScalarFunction<Dim>& g = nullptr)
{
    const auto&     mesh = space.mesh();
    Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (index_t v = 0; v < mesh.num_vertices(); ++v)
    {
        const index_t d = space.dof(v);
        if (d != invalid_index)
            u(static_cast<Eigen::Index>(v)) = free(static_cast<Eigen::Index>(d));
        else
            u(static_cast<Eigen::Index>(v)) = g ? g(mesh.vertex(v)) : 0.0;
    }
    return u;
}

template<int Dim, typename F>
Eigen::VectorXd
solve_p1(const P1Space<Dim>& space, const F& f, const SolveOptions& opts = {},
         const ScalarFunction<Dim>& g = nullptr)
{
    const auto sys = assemble_p1(space, f, g);
    return p1_nodal_values(space, solve(sys, opts).x, g);
}

struct P1Errors
{
    double l2 = 0.0; // || I_h u - u_h ||_0
    double h1 = 0.0; // | I_h u - u_h |_1
};

/* I_h is nodal interpolation; both norms are accumulated cell by cell with a degree-2 rule. */
template<int Dim, typename F>
P1Errors
p1_errors(const P1Space<Dim>& space, const F& u, const Eigen::VectorXd& uh_nodal)
{
    const auto& mesh = space.mesh();
    if (uh_nodal.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
        throw std::invalid_argument("p1_errors: nodal vector has wrong length");

    double l2 = 0.0, h1 = 0.0;
    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const auto                        p    = mesh.cell_points(c);
        const auto&                       cell = mesh.cell(c);
        Eigen::Matrix<double, Dim + 1, 1> d;
        for (int i = 0; i <= Dim; ++i)
            d(i) = u(p[i]) - uh_nodal(static_cast<Eigen::Index>(cell[i]));

        const auto pq = map_quadrature<Dim>(p, 2);
        for (std::size_t q = 0; q < pq.size(); ++q)
        {
            const double e = barycentric_coordinates<Dim>(p, pq.points[q]).dot(d);
            l2 += pq.weights[q] * e * e;
        }
        const Point<Dim> grad = barycentric_gradients<Dim>(p).transpose() * d;
        h1 += mesh.cell_volume(c) * grad.squaredNorm();
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

} // namespace wgfem
