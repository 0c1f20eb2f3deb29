#pragma once

#include <algorithm>
#include <functional>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "wgfem/basis.hpp"
#include "wgfem/geometry.hpp"
#include "wgfem/mesh.hpp"

namespace wgfem
{

template<int N>
using ScalarFunction = std::function<double(const Point<N>&)>;

template<int N>
using VectorFunction = std::function<Point<N>(const Point<N>&)>;

/*
 * Solves M X = B for a symmetric matrix that is positive definite in exact
 * arithmetic. Tries a plain Cholesky first and falls back to a pivoted LDL^T
 * on near-singular input; throws numerical_error when M is singular.
 */
inline Eigen::MatrixXd
solve_spd(const Eigen::MatrixXd& M, const Eigen::MatrixXd& B)
{
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success)
    {
        bool ok = true;
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            ok = ok && (llt.matrixLLT()(i, i) > 1e-14 * std::sqrt(M.diagonal().cwiseAbs().maxCoeff()));
        if (ok)
            return llt.solve(B);
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    const double                 dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(dmax > 0.0) || ldlt.vectorD().minCoeff() <= 1e-14 * dmax)
        throw numerical_error("solve_spd: singular local matrix");
    return ldlt.solve(B);
}

/* Gram matrix of the basis over its simplex: M_ij = int phi_i phi_j. */
template<int N, int I>
Eigen::MatrixXd
mass_matrix(const ScaledMonomialBasis<N, I>& basis, int quad_degree = -1)
{
    const int deg = quad_degree < 0 ? 2 * basis.degree() : quad_degree;
    const auto pq = map_quadrature<N>(basis.vertices(), deg);
    if (!(std::accumulate(pq.weights.begin(), pq.weights.end(), 0.0) > 0.0))
        throw numerical_error("mass_matrix: zero-measure simplex");

    const auto      n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd phi(n);
    for (std::size_t q = 0; q < pq.size(); ++q)
    {
        basis.eval(pq.points[q], phi);
        M.selfadjointView<Eigen::Lower>().rankUpdate(phi, pq.weights[q]);
    }
    return M.selfadjointView<Eigen::Lower>();
}

/* Moment vector b_i = int f phi_i. */
template<int N, int I, typename F>
Eigen::VectorXd
moments(const ScaledMonomialBasis<N, I>& basis, const F& f, int quad_degree)
{
    const auto      pq = map_quadrature<N>(basis.vertices(), quad_degree);
    const auto      n  = static_cast<Eigen::Index>(basis.size());
    Eigen::VectorXd b  = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd phi(n);
    for (std::size_t q = 0; q < pq.size(); ++q)
    {
        basis.eval(pq.points[q], phi);
        b += (pq.weights[q] * f(pq.points[q])) * phi;
    }
    return b;
}

/* Default quadrature degree for projecting a general function onto P_k. */
inline int
projection_quad_degree(int k)
{
    return std::min(k + 8, max_quadrature_degree);
}

/* Coefficients of the L2-orthogonal projection of f onto span(basis). */
template<int N, int I, typename F>
Eigen::VectorXd
l2_project(const ScaledMonomialBasis<N, I>& basis, const F& f, int quad_degree = -1)
{
    const int qd = quad_degree < 0 ? projection_quad_degree(basis.degree()) : quad_degree;
    return solve_spd(mass_matrix(basis), moments(basis, f, qd));
}

template<int Dim>
CellBasis<Dim>
cell_basis(const Mesh<Dim>& mesh, index_t c, int degree)
{
    const auto pts = mesh.cell_points(c);
    return CellBasis<Dim>(pts, degree);
}

/* Face bases are built from the face's own vertex order, so both neighbours see the same basis. */
template<int Dim>
FaceBasis<Dim>
face_basis(const Mesh<Dim>& mesh, index_t f, int degree)
{
    const auto pts = mesh.face_points(f);
    return FaceBasis<Dim>(pts, degree);
}

template<int Dim, typename F>
Eigen::VectorXd
project_cell(const Mesh<Dim>& mesh, index_t c, const F& f, int degree, int quad_degree = -1)
{
    return l2_project(cell_basis(mesh, c, degree), f, quad_degree);
}

template<int Dim, typename F>
Eigen::VectorXd
project_face(const Mesh<Dim>& mesh, index_t face, const F& f, int degree, int quad_degree = -1)
{
    return l2_project(face_basis(mesh, face, degree), f, quad_degree);
}

} // namespace wgfem
