#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "wgfem/common.hpp"
#include "wgfem/quadrature.hpp"

namespace wgfem
{

/* Measure (length, area, volume) of a k-simplex embedded in R^N. */
template<int N>
double
simplex_measure(std::span<const Point<N>> verts)
{
    const int       k = static_cast<int>(verts.size()) - 1;
    Eigen::MatrixXd E(N, k);
    for (int i = 0; i < k; ++i)
        E.col(i) = verts[i + 1] - verts[0];
    const double gram = (E.transpose() * E).determinant();
    return std::sqrt(std::max(gram, 0.0)) / factorial(k);
}

/* Signed volume of a full-dimensional simplex (N+1 vertices in R^N). */
template<int N>
double
signed_volume(std::span<const Point<N>> verts)
{
    Eigen::Matrix<double, N, N> E;
    for (int i = 0; i < N; ++i)
        E.col(i) = verts[i + 1] - verts[0];
    return E.determinant() / factorial(N);
}

template<int N>
Point<N>
barycenter(std::span<const Point<N>> verts)
{
    Point<N> c = Point<N>::Zero();
    for (const auto& v : verts)
        c += v;
    return c / static_cast<double>(verts.size());
}

template<int N>
double
diameter(std::span<const Point<N>> verts)
{
    double d = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            d = std::max(d, (verts[i] - verts[j]).norm());
    return d;
}

/* Quadrature points and weights mapped onto a physical simplex. */
template<int N>
struct PhysicalQuadrature
{
    std::vector<Point<N>> points;
    std::vector<double>   weights;

    std::size_t size() const { return weights.size(); }
};

/*
 * Maps the reference rule of the requested degree onto the simplex spanned by
 * `verts` (intrinsic dimension verts.size() - 1). Weights carry the measure.
 */
template<int N>
PhysicalQuadrature<N>
map_quadrature(std::span<const Point<N>> verts, int degree)
{
    const int             k    = static_cast<int>(verts.size()) - 1;
    const QuadratureRule& rule = quadrature(k, degree);
    const double          jac  = simplex_measure<N>(verts) * factorial(k);

    PhysicalQuadrature<N> pq;
    pq.points.reserve(rule.size());
    pq.weights.reserve(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        Point<N> x = verts[0];
        for (int i = 0; i < k; ++i)
            x += rule.nodes(i, static_cast<Eigen::Index>(q)) * (verts[i + 1] - verts[0]);
        pq.points.push_back(x);
        pq.weights.push_back(rule.weights(static_cast<Eigen::Index>(q)) * jac);
    }
    return pq;
}

/* Interior angle at vertex `a` of the planar corner b-a-c, in degrees. */
template<int N>
double
corner_angle_deg(const Point<N>& a, const Point<N>& b, const Point<N>& c)
{
    const Point<N> u = b - a;
    const Point<N> v = c - a;
    // atan2 form stays accurate for angles close to 0 and 180 degrees
    const double cr = std::sqrt(std::max(u.squaredNorm() * v.squaredNorm() - u.dot(v) * u.dot(v), 0.0));
    return std::atan2(cr, u.dot(v)) * 180.0 / std::numbers::pi;
}

/*
 * Interior dihedral angle of a tetrahedron along edge (i,j), in degrees.
 * The other two vertices are k and l.
 */
inline double
dihedral_angle_deg(const Point<3>& pi, const Point<3>& pj, const Point<3>& pk, const Point<3>& pl)
{
    const Point<3> e  = (pj - pi).normalized();
    Point<3>       a  = pk - pi;
    Point<3>       b  = pl - pi;
    a -= a.dot(e) * e;
    b -= b.dot(e) * e;
    const double cr = a.cross(b).norm();
    return std::atan2(cr, a.dot(b)) * 180.0 / std::numbers::pi;
}

} // namespace wgfem
