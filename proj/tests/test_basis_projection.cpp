#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgfem/mesh.hpp"
#include "wgfem/projection.hpp"

using namespace wgfem;

namespace
{

const std::vector<Point<2>> ref_tri{Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)};

} // namespace

TEST(Basis, SizesAndConstantFunction)
{
    for (int k = 0; k <= 4; ++k)
    {
        const CellBasis<2> b2(ref_tri, k);
        EXPECT_EQ(b2.size(), static_cast<std::size_t>((k + 1) * (k + 2) / 2));
        const std::vector<Point<3>> tet{Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0), Point<3>(0, 0, 1)};
        const CellBasis<3>          b3(tet, k);
        EXPECT_EQ(b3.size(), static_cast<std::size_t>((k + 1) * (k + 2) * (k + 3) / 6));
        const std::vector<Point<3>> tri{tet[1], tet[2], tet[3]};
        const FaceBasis<3>          f3(tri, k);
        EXPECT_EQ(f3.size(), static_cast<std::size_t>((k + 1) * (k + 2) / 2));
        const std::vector<Point<2>> seg{Point<2>(0, 0), Point<2>(0.3, 0.4)};
        const FaceBasis<2>          f2(seg, k);
        EXPECT_EQ(f2.size(), static_cast<std::size_t>(k + 1));

        for (const auto& x : {Point<2>(0.2, 0.3), Point<2>(-5.0, 7.0)})
            EXPECT_EQ(b2.eval(x)(0), 1.0);
        EXPECT_GT(b3.scale().minCoeff(), 0.0);
        EXPECT_GT(f3.scale().minCoeff(), 0.0);
    }
}

TEST(Basis, LowerDegreeIsPrefix)
{
    const CellBasis<2> p1(ref_tri, 1), p2(ref_tri, 2);
    const Point<2>     x(0.3, 0.1);
    EXPECT_EQ(p2.eval(x).head(p1.size()), p1.eval(x));
}

TEST(Basis, RejectsBadDegree)
{
    EXPECT_THROW(CellBasis<2>(ref_tri, -1), std::invalid_argument);
    EXPECT_THROW(CellBasis<2>(ref_tri, 16), std::invalid_argument);
}

TEST(Basis, GradientsMatchFiniteDifferences)
{
    const std::vector<Point<3>> tet{Point<3>(0.1, 0, 0), Point<3>(1, 0.2, 0), Point<3>(0, 1, 0.1), Point<3>(0.2, 0.3, 0.01)};
    const CellBasis<3>          b(tet, 3);
    const Point<3>              x(0.3, 0.3, 0.02);
    const auto                  g = b.eval_gradients(x);
    const double                d = 1e-6;
    for (int i = 0; i < 3; ++i)
    {
        Point<3> e = Point<3>::Zero();
        e(i)       = d;
        const Eigen::VectorXd fd = (b.eval(Point<3>(x + e)) - b.eval(Point<3>(x - e))) / (2 * d);
        EXPECT_LT((fd - g.col(i)).cwiseAbs().maxCoeff(), 1e-5 * (1.0 + g.cwiseAbs().maxCoeff()));
    }
}

TEST(MassMatrix, ConstantsOnReferenceSimplices)
{
    const Eigen::MatrixXd M0 = mass_matrix(CellBasis<2>(ref_tri, 0));
    ASSERT_EQ(M0.rows(), 1);
    EXPECT_NEAR(M0(0, 0), 0.5, 1e-15);

    const std::vector<Point<2>> seg{Point<2>(0, 0), Point<2>(1, 0)};
    const Eigen::MatrixXd       S0 = mass_matrix(FaceBasis<2>(seg, 0));
    EXPECT_NEAR(S0(0, 0), 1.0, 1e-15);
}

TEST(MassMatrix, MatchesIndependentQuadrature)
{
    for (int k : {1, 2, 3})
    {
        const CellBasis<2>    b(ref_tri, k);
        const Eigen::MatrixXd M = mass_matrix(b);
        EXPECT_LT((M - M.transpose()).norm(), 1e-15);
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
            {
                const double o = oracle::integrate<2>(ref_tri, [&](const Point<2>& x) {
                    const auto v = b.eval(x);
                    return v(i) * v(j);
                });
                EXPECT_NEAR(M(i, j), o, 1e-13);
            }
    }
    // a tetrahedron and one of its faces
    const std::vector<Point<3>> tet{Point<3>(0.1, 0, 0), Point<3>(1, 0.2, 0), Point<3>(0, 1, 0.1), Point<3>(0.2, 0.3, 0.8)};
    const CellBasis<3>          b3(tet, 2);
    const Eigen::MatrixXd       M3 = mass_matrix(b3);
    const std::vector<Point<3>> tri{tet[0], tet[2], tet[3]};
    const FaceBasis<3>          f3(tri, 2);
    const Eigen::MatrixXd       F3 = mass_matrix(f3);
    for (std::size_t i = 0; i < b3.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            EXPECT_NEAR(M3(i, j), oracle::integrate<3>(tet, [&](const Point<3>& x) {
                            const auto v = b3.eval(x);
                            return v(i) * v(j);
                        }), 1e-13);
    for (std::size_t i = 0; i < f3.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            EXPECT_NEAR(F3(i, j), oracle::integrate<3>(tri, [&](const Point<3>& x) {
                            const auto v = f3.eval(x);
                            return v(i) * v(j);
                        }), 1e-13);
}

TEST(MassMatrix, RejectsZeroMeasure)
{
    const std::vector<Point<2>> flat{Point<2>(0, 0), Point<2>(1, 0), Point<2>(2, 0)};
    EXPECT_THROW(mass_matrix(CellBasis<2>(flat, 1)), std::exception);
}

TEST(Projection, ConstantAndLinearReproduction)
{
    const CellBasis<2>    b(ref_tri, 1);
    const Eigen::VectorXd c = l2_project(b, [](const Point<2>&) { return 3.0; });
    EXPECT_NEAR(c(0), 3.0, 1e-13);
    EXPECT_LT(c.tail(c.size() - 1).cwiseAbs().maxCoeff(), 1e-13);

    const Eigen::VectorXd cx = l2_project(b, [](const Point<2>& x) { return x(0); });
    for (const auto& x : {Point<2>(0.1, 0.2), Point<2>(0.7, 0.1), Point<2>(0.0, 1.0)})
        EXPECT_NEAR(b.evaluate(cx, x), x(0), 1e-13);
}

TEST(Projection, QuadraticOntoP1IsOrthogonal)
{
    const CellBasis<2>    b(ref_tri, 1);
    auto                  f = [](const Point<2>& x) { return x(0) * x(0); };
    const Eigen::VectorXd c = l2_project(b, f);
    const std::vector<std::function<double(const Point<2>&)>> tests{
        [](const Point<2>&) { return 1.0; }, [](const Point<2>& x) { return x(0); },
        [](const Point<2>& x) { return x(1); }};
    for (const auto& q : tests)
    {
        const double r = oracle::integrate<2>(ref_tri, [&](const Point<2>& x) { return (f(x) - b.evaluate(c, x)) * q(x); }, 6);
        EXPECT_LT(std::abs(r), 1e-12);
    }
}

TEST(Projection, FaceProjections)
{
    const std::vector<Point<2>> seg{Point<2>(0.2, 0.1), Point<2>(0.8, 0.9)};
    const FaceBasis<2>          b(seg, 2);
    const Eigen::VectorXd       one = l2_project(b, [](const Point<2>&) { return 1.0; });
    EXPECT_NEAR(one(0), 1.0, 1e-13);
    EXPECT_LT(one.tail(2).cwiseAbs().maxCoeff(), 1e-13);

    // arclength from the first vertex
    auto                  s  = [&](const Point<2>& x) { return (x - seg[0]).norm(); };
    const Eigen::VectorXd cs = l2_project(b, s);
    for (double t : {0.0, 0.25, 0.6, 1.0})
    {
        const Point<2> x = seg[0] + t * (seg[1] - seg[0]);
        EXPECT_NEAR(b.evaluate(cs, x), s(x), 1e-13);
    }

    // sin(x) on [(0,0),(1,0)] onto P2: residual orthogonal to 1, s, s^2
    const std::vector<Point<2>> e{Point<2>(0, 0), Point<2>(1, 0)};
    const FaceBasis<2>          be(e, 2);
    auto                        f  = [](const Point<2>& x) { return std::sin(x(0)); };
    const Eigen::VectorXd       cf = l2_project(be, f);
    for (int p = 0; p <= 2; ++p)
    {
        const double r = oracle::integrate<2>(e, [&](const Point<2>& x) {
            return (f(x) - be.evaluate(cf, x)) * std::pow(x(0), p);
        }, 20);
        EXPECT_LT(std::abs(r), 1e-12) << "moment " << p;
    }
}

TEST(Projection, Idempotent)
{
    const std::vector<Point<3>> tet{Point<3>(0, 0, 0), Point<3>(1, 0.2, 0), Point<3>(0, 1, 0.1), Point<3>(0.2, 0.3, 0.8)};
    const CellBasis<3>          b(tet, 2);
    const Eigen::VectorXd c1 = l2_project(b, [](const Point<3>& x) { return std::exp(x(0) - x(1) * x(2)); });
    const Eigen::VectorXd c2 = l2_project(b, [&](const Point<3>& x) { return b.evaluate(c1, x); });
    EXPECT_LT((c1 - c2).cwiseAbs().maxCoeff(), 1e-12 * c1.cwiseAbs().maxCoeff());
}

TEST(Projection, ReproducesPolynomialsOnDegenerateCells)
{
    const auto      mesh = build_degenerate_mesh<2>(4);
    std::mt19937    rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k <= 2; ++k)
    {
        // random polynomial of degree k
        std::vector<double> a(10);
        for (auto& v : a)
            v = U(rng);
        auto p = [&](const Point<2>& x) {
            double s = a[0];
            if (k >= 1)
                s += a[1] * x(0) + a[2] * x(1);
            if (k >= 2)
                s += a[3] * x(0) * x(0) + a[4] * x(0) * x(1) + a[5] * x(1) * x(1);
            return s;
        };
        for (index_t c = 0; c < mesh.num_cells(); c += 97)
        {
            const auto            b    = cell_basis(mesh, c, k);
            const Eigen::VectorXd coef = project_cell(mesh, c, p, k);
            double                pmax = 0.0, err = 0.0;
            for (const auto& v : mesh.cell_points(c))
            {
                pmax = std::max(pmax, std::abs(p(v)));
                err  = std::max(err, std::abs(b.evaluate(coef, v) - p(v)));
            }
            EXPECT_LE(err, 1e-11 * std::max(pmax, 1e-300)) << "cell " << c << " k " << k;
        }
    }
}

TEST(Projection, DegenerateMassMatricesAreSolvable)
{
    // every cell of the level-5 degenerate mesh, P_2 (the weak-gradient space for k = 1)
    const auto mesh   = build_degenerate_mesh<2>(5);
    double     worst  = 0.0;
    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const Eigen::MatrixXd M   = mass_matrix(cell_basis(mesh, c, 2));
        const Eigen::MatrixXd B   = Eigen::MatrixXd::Identity(M.rows(), M.cols());
        const Eigen::MatrixXd X   = solve_spd(M, B);
        const double          res = (M * X - B).norm() / B.norm();
        worst                     = std::max(worst, res);
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(Projection, SolveSpdRejectsSingular)
{
    Eigen::MatrixXd M(2, 2);
    M << 1, 1, 1, 1;
    EXPECT_THROW(solve_spd(M, Eigen::MatrixXd::Identity(2, 2)), numerical_error);
}
