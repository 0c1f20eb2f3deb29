#pragma once

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wgfem/common.hpp"

namespace wgfem
{

/* Highest polynomial degree for which quadrature() returns a rule. */
inline constexpr int max_quadrature_degree = 24;

/*
 * Quadrature rule on the reference simplex of intrinsic dimension 1, 2 or 3:
 * the segment [0,1], the triangle with vertices (0,0),(1,0),(0,1) and the
 * tetrahedron spanned by the origin and the unit vectors. Nodes are stored
 * column-wise. Weights sum to the reference measure 1/dim!.
 */
struct QuadratureRule
{
    int             dim    = 0;
    int             degree = 0;
    Eigen::MatrixXd nodes;
    Eigen::VectorXd weights;

    std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

namespace detail
{

/*
 * Gauss-Jacobi nodes and weights on [0,1] for the weight (1-t)^alpha, built
 * with the Golub-Welsch eigenvalue method on [-1,1] and mapped affinely.
 */
inline std::pair<Eigen::VectorXd, Eigen::VectorXd>
gauss_jacobi_unit(int npoints, double alpha)
{
    const double beta = 0.0;
    const double ab   = alpha + beta;

    Eigen::VectorXd diag(npoints);
    Eigen::VectorXd offdiag(std::max(npoints - 1, 0));

    for (int n = 0; n < npoints; ++n)
    {
        const double s = 2.0 * n + ab;
        if (n == 0)
            diag(n) = (beta - alpha) / (ab + 2.0);
        else
            diag(n) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int n = 1; n < npoints; ++n)
    {
        const double s = 2.0 * n + ab;
        const double b = 4.0 * n * (n + alpha) * (n + beta) * (n + ab) / (s * s * (s + 1.0) * (s - 1.0));
        offdiag(n - 1) = std::sqrt(b);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success)
        throw numerical_error("gauss_jacobi_unit: tridiagonal eigenproblem failed");

    // mu0 = int_{-1}^{1} (1-x)^alpha dx
    const double mu0 = std::pow(2.0, alpha + 1.0) / (alpha + 1.0);

    Eigen::VectorXd t(npoints);
    Eigen::VectorXd w(npoints);
    for (int i = 0; i < npoints; ++i)
    {
        const double x = eig.eigenvalues()(i);
        const double v = eig.eigenvectors()(0, i);
        t(i)           = 0.5 * (x + 1.0);
        w(i)           = mu0 * v * v / std::pow(2.0, alpha + 1.0);
    }
    return {t, w};
}

/*
 * Conical-product rule: the simplex is the image of the unit cube under the
 * collapsed map x1 = t1, x2 = (1-t1) t2, x3 = (1-t1)(1-t2) t3, whose Jacobian
 * (1-t1)^(d-1) (1-t2)^(d-2) is absorbed into Gauss-Jacobi weights.
 */
inline QuadratureRule
make_conical_rule(int dim, int degree)
{
    const int npts = degree / 2 + 1;

    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> axes;
    for (int a = 0; a < dim; ++a)
        axes.push_back(gauss_jacobi_unit(npts, static_cast<double>(dim - 1 - a)));

    int total = 1;
    for (int a = 0; a < dim; ++a)
        total *= npts;

    QuadratureRule rule;
    rule.dim    = dim;
    rule.degree = degree;
    rule.nodes.resize(dim, total);
    rule.weights.resize(total);

    std::array<int, 3> idx{0, 0, 0};
    for (int q = 0; q < total; ++q)
    {
        int rem = q;
        for (int a = dim - 1; a >= 0; --a)
        {
            idx[a] = rem % npts;
            rem /= npts;
        }

        double remaining = 1.0;
        double w         = 1.0;
        for (int a = 0; a < dim; ++a)
        {
            const double t   = axes[a].first(idx[a]);
            rule.nodes(a, q) = remaining * t;
            remaining *= (1.0 - t);
            w *= axes[a].second(idx[a]);
        }
        rule.weights(q) = w;
    }
    return rule;
}

} // namespace detail

/*
 * Returns a rule on the reference simplex of the given intrinsic dimension
 * that integrates every polynomial of total degree <= `degree` exactly.
 * Rules are built once and cached for the lifetime of the process.
 */
inline const QuadratureRule&
quadrature(int intrinsic_dim, int degree)
{
    if (intrinsic_dim < 1 || intrinsic_dim > 3)
        throw std::invalid_argument("quadrature: intrinsic dimension must be 1, 2 or 3, got " +
                                    std::to_string(intrinsic_dim));
    if (degree < 0 || degree > max_quadrature_degree)
        throw std::invalid_argument("quadrature: unsupported degree " + std::to_string(degree) +
                                    " (max " + std::to_string(max_quadrature_degree) + ")");

    static std::once_flag                                           built;
    static std::array<std::vector<QuadratureRule>, 3>               table;
    std::call_once(built, [] {
        for (int d = 1; d <= 3; ++d)
            for (int p = 0; p <= max_quadrature_degree; ++p)
                table[d - 1].push_back(detail::make_conical_rule(d, p));
    });
    return table[intrinsic_dim - 1][degree];
}

} // namespace wgfem
