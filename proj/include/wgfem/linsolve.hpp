#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#ifdef WGFEM_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include "wgfem/common.hpp"

namespace wgfem
{

using SparseMatrix = Eigen::SparseMatrix<double>;

/*
 * Symmetric system A x = b with both triangles of A stored. A is kept in
 * compressed column form; for a symmetric matrix its arrays are exactly the
 * compressed row arrays.
 */
struct SparseSystem
{
    SparseMatrix    A;
    Eigen::VectorXd b;

    Eigen::Index size() const { return A.rows(); }
};

enum class SolverMethod
{
    direct,
    cg
};

struct SolveOptions
{
    SolverMethod method = SolverMethod::direct;
    /* Relative residual target for CG; ignored by the direct solver. */
    double tol = 1e-12;
};

struct SolveResult
{
    Eigen::VectorXd x;
    double          relative_residual = 0.0;
    long            iterations        = 0;
};

class solver_error : public numerical_error
{
public:
    using numerical_error::numerical_error;
};

struct SpdReport
{
    bool   spd             = false;
    double smallest_pivot  = std::numeric_limits<double>::quiet_NaN();
};

/* Throws std::invalid_argument unless A is square, symmetric and has a nonzero diagonal. */
inline void
validate(const SparseSystem& sys)
{
    const auto& A = sys.A;
    if (A.rows() != A.cols())
        throw std::invalid_argument("SparseSystem: matrix is not square");
    if (sys.b.size() != A.rows())
        throw std::invalid_argument("SparseSystem: right-hand side has wrong length");
    const SparseMatrix At   = A.transpose();
    const SparseMatrix diff = A - At;
    const double       anorm = A.norm();
    if (diff.norm() > 1e-12 * anorm)
        throw std::invalid_argument("SparseSystem: matrix is not symmetric");
    for (Eigen::Index k = 0; k < A.outerSize(); ++k)
    {
        bool pattern_ok = true;
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            pattern_ok = pattern_ok && (At.coeff(it.row(), it.col()) != 0.0 || it.value() == 0.0);
        if (!pattern_ok)
            throw std::invalid_argument("SparseSystem: pattern is not symmetric");
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        if (A.coeff(i, i) == 0.0)
            throw std::invalid_argument("SparseSystem: zero diagonal entry at row " + std::to_string(i));
}

namespace detail
{

#ifdef WGFEM_HAVE_CHOLMOD

// simplicial LDL^T; CHOLMOD keeps going past negative pivots, so D is read back from the factor
class ldlt_solver : public Eigen::CholmodSimplicialLDLT<SparseMatrix, Eigen::Lower>
{
public:
    ldlt_solver() { cholmod().print = 0; }

    double
    min_pivot() const
    {
        const auto* L = m_cholmodFactor;
        if (L == nullptr || L->n == 0)
            return std::numeric_limits<double>::infinity();
        const auto* p = static_cast<const int*>(L->p);
        const auto* x = static_cast<const double*>(L->x);
        double      m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < L->n; ++j)
            m = std::min(m, x[p[j]]);
        return m;
    }
};

#else

class ldlt_solver : public Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>
{
public:
    double
    min_pivot() const
    {
        return vectorD().size() ? vectorD().minCoeff() : std::numeric_limits<double>::infinity();
    }
};

#endif

inline double
min_pivot(const ldlt_solver& ldlt)
{
    return ldlt.min_pivot();
}

} // namespace detail

/*
 * Square-root-free sparse Cholesky (A = P^T L D L^T P with a fill-reducing ordering).
 * The matrix is positive definite iff every pivot D_ii is positive.
 */
inline SpdReport
spd_check(const SparseMatrix& A)
{
    SpdReport           r;
    detail::ldlt_solver ldlt;
    ldlt.compute(A);
    if (A.rows() == 0)
    {
        r.spd = true;
        return r;
    }
    if (ldlt.info() != Eigen::Success)
    {
        r.smallest_pivot = 0.0;
        return r;
    }
    r.smallest_pivot = detail::min_pivot(ldlt);
    r.spd            = r.smallest_pivot > 0.0;
    return r;
}

inline SpdReport
spd_check(const SparseSystem& sys)
{
    return spd_check(sys.A);
}

/*
 * direct: sparse LDL^T (CHOLMOD if available, else Eigen) plus up to three steps of
 * iterative refinement, aiming at ||b - Ax|| <= 1e-11 ||b||.
 * cg: Jacobi-preconditioned conjugate gradients to `tol`, at most
 * 50 sqrt(n) iterations.
 */
inline SolveResult
solve(const SparseSystem& sys, const SolveOptions& opts = {})
{
    const auto n = sys.size();
    if (sys.b.size() != n)
        throw std::invalid_argument("solve: right-hand side has wrong length");
    if (!(opts.tol > 0.0 && opts.tol <= 1e-6))
        throw std::invalid_argument("solve: tolerance must lie in (0, 1e-6]");

    SolveResult  res;
    const double bnorm = sys.b.norm();
    if (n == 0 || bnorm == 0.0)
    {
        res.x = Eigen::VectorXd::Zero(n);
        return res;
    }

    if (opts.method == SolverMethod::direct)
    {
        detail::ldlt_solver ldlt;
        ldlt.compute(sys.A);
        if (ldlt.info() != Eigen::Success)
            throw solver_error("solve: sparse Cholesky failed (zero pivot)");
        if (!(detail::min_pivot(ldlt) > 0.0))
            throw solver_error("solve: non-positive pivot, matrix is not positive definite");

        res.x           = ldlt.solve(sys.b);
        Eigen::VectorXd r = sys.b - sys.A * res.x;
        for (int step = 0; step < 3 && r.norm() > 1e-11 * bnorm; ++step)
        {
            res.x += ldlt.solve(r);
            r = sys.b - sys.A * res.x;
            res.iterations = step + 1;
        }
        res.relative_residual = r.norm() / bnorm;
        return res;
    }

    // Eigen stops on its recursive residual; restart from the current iterate
    // until the true residual meets the tolerance, within one iteration budget
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    const auto cap = static_cast<long>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
    cg.setTolerance(opts.tol);
    cg.compute(sys.A);
    res.x = Eigen::VectorXd::Zero(n);
    for (;;)
    {
        cg.setMaxIterations(static_cast<Eigen::Index>(cap - res.iterations));
        res.x = cg.solveWithGuess(sys.b, res.x);
        res.iterations += static_cast<long>(cg.iterations());
        res.relative_residual = (sys.b - sys.A * res.x).norm() / bnorm;
        if (res.relative_residual <= opts.tol)
            return res;
        if (!std::isfinite(res.relative_residual) || res.iterations >= cap || cg.iterations() == 0)
            throw solver_error("solve: CG did not converge in " + std::to_string(cap) +
                               " iterations (relative residual " + std::to_string(res.relative_residual) + ")");
    }
}

/* MatrixMarket coordinate export of A (lower triangle, symmetric) and b (array). */
inline void
write_matrix_market(const SparseSystem& sys, const std::filesystem::path& matrix_path,
                    const std::filesystem::path& rhs_path)
{
    std::ofstream am(matrix_path);
    if (!am)
        throw std::runtime_error("write_matrix_market: cannot open '" + matrix_path.string() + "'");
    const SparseMatrix L = sys.A.triangularView<Eigen::Lower>();
    am << "%%MatrixMarket matrix coordinate real symmetric\n";
    am << sys.A.rows() << ' ' << sys.A.cols() << ' ' << L.nonZeros() << '\n';
    am << std::setprecision(17);
    for (Eigen::Index k = 0; k < L.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(L, k); it; ++it)
            am << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';

    std::ofstream bm(rhs_path);
    if (!bm)
        throw std::runtime_error("write_matrix_market: cannot open '" + rhs_path.string() + "'");
    bm << "%%MatrixMarket matrix array real general\n";
    bm << sys.b.size() << " 1\n";
    bm << std::setprecision(17);
    for (Eigen::Index i = 0; i < sys.b.size(); ++i)
        bm << sys.b(i) << '\n';
    if (!am || !bm)
        throw std::runtime_error("write_matrix_market: write failed");
}

} // namespace wgfem
