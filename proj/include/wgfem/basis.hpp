#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "wgfem/common.hpp"
#include "wgfem/geometry.hpp"

namespace wgfem
{

/*
 * Exponents of all monomials of total degree <= k in d variables, grouped by
 * increasing total degree, so that the P_j list is a prefix of the P_k list
 * for j < k.
 */
template<int D>
std::vector<std::array<int, D>>
monomial_exponents(int k)
{
    std::vector<std::array<int, D>> exps;
    for (int t = 0; t <= k; ++t)
    {
        if constexpr (D == 1)
            exps.push_back({t});
        else if constexpr (D == 2)
            for (int a = t; a >= 0; --a)
                exps.push_back({a, t - a});
        else
            for (int a = t; a >= 0; --a)
                for (int b = t - a; b >= 0; --b)
                    exps.push_back({a, b, t - a - b});
    }
    return exps;
}

/*
 * Monomial basis of P_k on a simplex of intrinsic dimension I embedded in
 * R^N. A point x is first expressed in an orthonormal frame attached to the
 * simplex (the identity when I == N, otherwise the first axis runs along the
 * longest edge), then shifted and scaled per axis by the midpoint and
 * half-width of the simplex bounding box in that frame:
 *
 *   s_i = (axes_i . (x - origin) - center_i) / scale_i,   phi_a(x) = prod_i s_i^{a_i}
 *
 * Per-axis scaling keeps the mass matrix well conditioned on flat cells.
 */
template<int N, int I = N>
class ScaledMonomialBasis
{
    static_assert(I >= 1 && I <= N, "ScaledMonomialBasis: bad intrinsic dimension");

public:
    using ambient_point  = Point<N>;
    using intrinsic_point = Point<I>;

    ScaledMonomialBasis(std::span<const Point<N>> simplex, int degree)
        : degree_(degree), exponents_(monomial_exponents<I>(degree))
    {
        if (degree < 0 || degree > 15)
            throw std::invalid_argument("ScaledMonomialBasis: degree must be in [0, 15]");
        if (simplex.size() != static_cast<std::size_t>(I + 1))
            throw std::invalid_argument("ScaledMonomialBasis: wrong number of simplex vertices");
        for (int i = 0; i <= I; ++i)
            vertices_[i] = simplex[i];
        build_frame();
    }

    int         degree() const { return degree_; }
    std::size_t size() const { return exponents_.size(); }

    const std::array<Point<N>, I + 1>&      vertices() const { return vertices_; }
    const std::vector<std::array<int, I>>& exponents() const { return exponents_; }
    const intrinsic_point&                  center() const { return center_; }
    const intrinsic_point&                  scale() const { return scale_; }
    const Eigen::Matrix<double, I, N>&      axes() const { return axes_; }
    const ambient_point&                    origin() const { return origin_; }

    /* Frame coordinates (unscaled) of an ambient point. */
    intrinsic_point frame_coordinates(const ambient_point& x) const { return axes_ * (x - origin_); }

    /* Shifted and scaled coordinates s used by the monomials. */
    intrinsic_point
    scaled_coordinates(const ambient_point& x) const
    {
        return (frame_coordinates(x) - center_).cwiseQuotient(scale_);
    }

    void
    eval(const ambient_point& x, Eigen::Ref<Eigen::VectorXd> out) const
    {
        const auto                           s = scaled_coordinates(x);
        std::array<std::array<double, 16>, I> pw;
        for (int i = 0; i < I; ++i)
        {
            pw[i][0] = 1.0;
            for (int p = 1; p <= degree_; ++p)
                pw[i][p] = pw[i][p - 1] * s(i);
        }
        for (std::size_t a = 0; a < exponents_.size(); ++a)
        {
            double v = 1.0;
            for (int i = 0; i < I; ++i)
                v *= pw[i][exponents_[a][i]];
            out(static_cast<Eigen::Index>(a)) = v;
        }
    }

    Eigen::VectorXd
    eval(const ambient_point& x) const
    {
        Eigen::VectorXd out(size());
        eval(x, out);
        return out;
    }

    /* Row a holds the ambient gradient of phi_a at x. */
    Eigen::Matrix<double, Eigen::Dynamic, N>
    eval_gradients(const ambient_point& x) const
    {
        const auto                            s = scaled_coordinates(x);
        std::array<std::array<double, 16>, I> pw;
        for (int i = 0; i < I; ++i)
        {
            pw[i][0] = 1.0;
            for (int p = 1; p <= degree_; ++p)
                pw[i][p] = pw[i][p - 1] * s(i);
        }
        Eigen::Matrix<double, Eigen::Dynamic, N> g(size(), N);
        for (std::size_t a = 0; a < exponents_.size(); ++a)
        {
            Point<I> ds;
            for (int i = 0; i < I; ++i)
            {
                const int e = exponents_[a][i];
                if (e == 0)
                {
                    ds(i) = 0.0;
                    continue;
                }
                double v = e * pw[i][e - 1];
                for (int j = 0; j < I; ++j)
                    if (j != i)
                        v *= pw[j][exponents_[a][j]];
                ds(i) = v / scale_(i);
            }
            g.row(static_cast<Eigen::Index>(a)) = (axes_.transpose() * ds).transpose();
        }
        return g;
    }

    /* Value of the polynomial with the given coefficients at x. */
    double
    evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const ambient_point& x) const
    {
        return eval(x).head(coeffs.size()).dot(coeffs);
    }

private:
    void
    build_frame()
    {
        if constexpr (I == N)
        {
            axes_.setIdentity();
            origin_.setZero();
        }
        else
        {
            // first axis along the longest edge
            int    ea = 0, eb = 1;
            double best = -1.0;
            for (int a = 0; a <= I; ++a)
                for (int b = a + 1; b <= I; ++b)
                {
                    const double l = (vertices_[b] - vertices_[a]).squaredNorm();
                    if (l > best)
                    {
                        best = l;
                        ea   = a;
                        eb   = b;
                    }
                }
            origin_ = vertices_[ea];
            Point<N> t0 = vertices_[eb] - vertices_[ea];
            if (!(t0.norm() > 0.0))
                throw std::invalid_argument("ScaledMonomialBasis: degenerate simplex");
            t0.normalize();
            axes_.row(0) = t0.transpose();
            if constexpr (I == 2)
            {
                int c = 0;
                while (c == ea || c == eb)
                    ++c;
                Point<N> w = vertices_[c] - origin_;
                w -= w.dot(t0) * t0;
                if (!(w.norm() > 0.0))
                    throw std::invalid_argument("ScaledMonomialBasis: degenerate simplex");
                axes_.row(1) = w.normalized().transpose();
            }
        }

        intrinsic_point lo = frame_coordinates(vertices_[0]);
        intrinsic_point hi = lo;
        for (int v = 1; v <= I; ++v)
        {
            const auto y = frame_coordinates(vertices_[v]);
            lo           = lo.cwiseMin(y);
            hi           = hi.cwiseMax(y);
        }
        center_ = 0.5 * (lo + hi);
        scale_  = 0.5 * (hi - lo);
        for (int i = 0; i < I; ++i)
            if (!(scale_(i) > 0.0))
                throw std::invalid_argument("ScaledMonomialBasis: degenerate simplex");
    }

    std::array<Point<N>, I + 1>      vertices_;
    int                              degree_;
    std::vector<std::array<int, I>>  exponents_;
    Eigen::Matrix<double, I, N>      axes_;
    ambient_point                    origin_;
    intrinsic_point                  center_;
    intrinsic_point                  scale_;
};

template<int N>
using CellBasis = ScaledMonomialBasis<N, N>;

template<int N>
using FaceBasis = ScaledMonomialBasis<N, N - 1>;

/*
 * Trace of a cell basis on one of its faces, written in the face basis:
 * phi_a restricted to the face equals sum_b E(b, a) chi_b. Needs
 * cell.degree() <= face.degree(). The cell's scaled coordinates are affine in
 * the face's, so E comes from expanding products, with no quadrature.
 */
template<int N>
Eigen::MatrixXd
trace_matrix(const CellBasis<N>& cell, const FaceBasis<N>& face)
{
    constexpr int I = N - 1;
    const int     D = face.degree();
    if (cell.degree() > D)
        throw std::invalid_argument("trace_matrix: cell degree above face degree");

    // s_i = a_i + sum_d b(d, i) t_d on the face
    const Point<N>              x0 = face.origin() + face.axes().transpose() * face.center();
    const Point<N>              a  = (x0 - cell.center()).cwiseQuotient(cell.scale());
    Eigen::Matrix<double, I, N> b  = face.scale().asDiagonal() * face.axes();
    for (int i = 0; i < N; ++i)
        b.col(i) /= cell.scale()(i);

    const auto& fe  = face.exponents();
    auto        key = [D](const std::array<int, I>& e) {
        int k = 0;
        for (int d = 0; d < I; ++d)
            k = k * (D + 1) + e[d];
        return k;
    };
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(I == 1 ? D + 1 : (D + 1) * (D + 1)), -1);
    for (std::size_t j = 0; j < fe.size(); ++j)
        slot[static_cast<std::size_t>(key(fe[j]))] = static_cast<Eigen::Index>(j);

    const auto&     ce = cell.exponents();
    const auto      nf = static_cast<Eigen::Index>(fe.size());
    Eigen::MatrixXd E  = Eigen::MatrixXd::Zero(nf, static_cast<Eigen::Index>(ce.size()));
    E(0, 0)            = 1.0;
    for (std::size_t c = 1; c < ce.size(); ++c)
    {
        // phi_c = phi_parent * s_axis, the parent comes earlier in degree order
        int axis = 0;
        while (ce[c][axis] == 0)
            ++axis;
        auto pe = ce[c];
        --pe[axis];
        const auto parent = static_cast<Eigen::Index>(
            std::find(ce.begin(), ce.begin() + static_cast<std::ptrdiff_t>(c), pe) - ce.begin());

        const auto col = static_cast<Eigen::Index>(c);
        E.col(col)     = a(axis) * E.col(parent);
        for (Eigen::Index j = 0; j < nf; ++j)
        {
            const double v = E(j, parent);
            if (v == 0.0)
                continue;
            for (int d = 0; d < I; ++d)
            {
                auto e = fe[static_cast<std::size_t>(j)];
                ++e[d];
                E(slot[static_cast<std::size_t>(key(e))], col) += b(d, axis) * v;
            }
        }
    }
    return E;
}

} // namespace wgfem
