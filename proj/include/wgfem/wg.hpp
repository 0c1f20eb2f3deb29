#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "wgfem/basis.hpp"
#include "wgfem/linsolve.hpp"
#include "wgfem/mesh.hpp"
#include "wgfem/projection.hpp"

namespace wgfem
{

/*
 * Weak Galerkin space on a simplicial mesh: v = {v0, vb} with v0 in P_k on
 * every cell and vb in P_{k+1} on every face, vb = 0 on the boundary.
 *
 * Free dofs are numbered cell blocks first (cell order), then interior-face
 * blocks (face order). Boundary faces own no free dofs; their coefficient
 * blocks live in a separate vector so that Dirichlet traces can still be
 * represented (see WgFunction::boundary).
 */
template<int Dim>
class WgSpace
{
public:
    /* The space keeps a pointer to the mesh, which must outlive it. */
    WgSpace(Mesh<Dim>&&, int) = delete;
    WgSpace(const Mesh<Dim>& mesh, int k)
        : mesh_(&mesh), k_(k),
          cell_block_(polynomial_space_dim(k, Dim)), face_block_(polynomial_space_dim(k + 1, Dim - 1))
    {
        if (k < 0 || k > 2)
            throw std::invalid_argument("WgSpace: degree k must be 0, 1 or 2");

        face_offset_.assign(mesh.num_faces(), invalid_index);
        boundary_slot_.assign(mesh.num_faces(), invalid_index);
        index_t next = mesh.num_cells() * cell_block_;
        index_t bnd  = 0;
        for (index_t f = 0; f < mesh.num_faces(); ++f)
        {
            if (mesh.face(f).boundary)
                boundary_slot_[f] = (bnd++) * face_block_;
            else
            {
                face_offset_[f] = next;
                next += face_block_;
            }
        }
        num_free_     = next;
        num_boundary_ = bnd;
    }

    const Mesh<Dim>& mesh() const { return *mesh_; }
    int              degree() const { return k_; }

    /* dim P_k(T) */
    std::size_t cell_block() const { return cell_block_; }
    /* dim P_{k+1}(e) */
    std::size_t face_block() const { return face_block_; }
    /* Interior dofs followed by the Dim+1 face blocks in local face order. */
    std::size_t local_size() const { return cell_block_ + (Dim + 1) * face_block_; }

    std::size_t num_free() const { return num_free_; }
    std::size_t num_cell_dofs() const { return mesh_->num_cells() * cell_block_; }
    std::size_t num_boundary_faces() const { return num_boundary_; }

    index_t cell_offset(index_t c) const { return c * cell_block_; }
    /* First free dof of an interior face; invalid_index for boundary faces. */
    index_t face_offset(index_t f) const { return face_offset_[f]; }
    /* Offset of a boundary face block in WgFunction::boundary; invalid_index otherwise. */
    index_t boundary_slot(index_t f) const { return boundary_slot_[f]; }

    /* Global free dof of each local dof of cell c, invalid_index where eliminated. */
    std::vector<index_t>
    local_dofs(index_t c) const
    {
        std::vector<index_t> dofs(local_size(), invalid_index);
        for (std::size_t a = 0; a < cell_block_; ++a)
            dofs[a] = cell_offset(c) + a;
        const auto& cf = mesh_->cell_faces(c);
        for (int i = 0; i <= Dim; ++i)
        {
            const index_t off = face_offset_[cf[i].face];
            if (off == invalid_index)
                continue;
            for (std::size_t b = 0; b < face_block_; ++b)
                dofs[cell_block_ + i * face_block_ + b] = off + b;
        }
        return dofs;
    }

private:
    const Mesh<Dim>*     mesh_;
    int                  k_;
    std::size_t          cell_block_;
    std::size_t          face_block_;
    std::vector<index_t> face_offset_;
    std::vector<index_t> boundary_slot_;
    std::size_t          num_free_     = 0;
    std::size_t          num_boundary_ = 0;
};

/*
 * Coefficients of a weak function. `free` is indexed by the space's free
 * dofs; `boundary` holds the vb blocks of boundary faces, zero for members of
 * V_h and nonzero only when a trace is imposed (e.g. by interpolate_Qh).
 */
template<int Dim>
struct WgFunction
{
    const WgSpace<Dim>* space = nullptr;
    Eigen::VectorXd     free;
    Eigen::VectorXd     boundary;

    explicit WgFunction(const WgSpace<Dim>& s)
        : space(&s), free(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.num_free()))),
          boundary(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.num_boundary_faces() * s.face_block())))
    {}

    auto interior(index_t c) const
    {
        return free.segment(static_cast<Eigen::Index>(space->cell_offset(c)),
                            static_cast<Eigen::Index>(space->cell_block()));
    }

    /* Coefficients of face f, whichever vector holds them. */
    Eigen::VectorXd
    face(index_t f) const
    {
        const auto nb  = static_cast<Eigen::Index>(space->face_block());
        const auto off = space->face_offset(f);
        if (off != invalid_index)
            return free.segment(static_cast<Eigen::Index>(off), nb);
        return boundary.segment(static_cast<Eigen::Index>(space->boundary_slot(f)), nb);
    }

    /* Local coefficient vector of cell c in the layout of WgSpace::local_size(). */
    Eigen::VectorXd
    local_coefficients(index_t c) const
    {
        const auto      n0 = static_cast<Eigen::Index>(space->cell_block());
        const auto      nb = static_cast<Eigen::Index>(space->face_block());
        Eigen::VectorXd loc(static_cast<Eigen::Index>(space->local_size()));
        loc.head(n0) = interior(c);
        const auto& cf = space->mesh().cell_faces(c);
        for (int i = 0; i <= Dim; ++i)
            loc.segment(n0 + i * nb, nb) = face(cf[i].face);
        return loc;
    }
};

/*
 * Weak gradient on one cell. Row c*m + j of G is the coefficient of the
 * vector test function psi_j e_c, where psi is the P_{k+1} cell basis and
 * m = dim P_{k+1}(T); column a is the local dof a. For local coefficients v,
 * the weak gradient is sum_{c,j} (G v)_{c m + j} psi_j e_c.
 */
template<int Dim>
struct ElementWeakGradient
{
    index_t         cell = invalid_index;
    CellBasis<Dim>  basis;       // psi, degree k+1
    Eigen::MatrixXd scalar_mass; // m x m
    Eigen::MatrixXd G;           // (Dim m) x local_size

    std::size_t test_size() const { return basis.size(); }

    /* Block-diagonal mass matrix of [P_{k+1}(T)]^Dim. */
    Eigen::MatrixXd
    vector_mass() const
    {
        const auto      m = static_cast<Eigen::Index>(basis.size());
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(Dim * m, Dim * m);
        for (int c = 0; c < Dim; ++c)
            M.block(c * m, c * m, m, m) = scalar_mass;
        return M;
    }

    /* Value at x of the vector polynomial with stacked coefficients `coeffs`. */
    Point<Dim>
    evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point<Dim>& x) const
    {
        const auto            m   = static_cast<Eigen::Index>(basis.size());
        const Eigen::VectorXd psi = basis.eval(x);
        Point<Dim>            g;
        for (int c = 0; c < Dim; ++c)
            g(c) = psi.dot(coeffs.segment(c * m, m));
        return g;
    }
};

/*
 * Solves, for every local dof v,
 *   (grad_w v, q)_T = -(v0, div q)_T + sum_{e in dT} <vb, q.n>_e   for all q in [P_{k+1}(T)]^Dim
 * with n the outward normal of T.
 */
template<int Dim>
ElementWeakGradient<Dim>
weak_gradient_operator(const WgSpace<Dim>& space, index_t c)
{
    const auto& mesh = space.mesh();
    const int   k    = space.degree();
    const auto  pts  = mesh.cell_points(c);

    ElementWeakGradient<Dim> op{c, CellBasis<Dim>(pts, k + 1), {}, {}};
    const auto               m  = static_cast<Eigen::Index>(op.basis.size());
    const auto               n0 = static_cast<Eigen::Index>(space.cell_block());
    const auto               nb = static_cast<Eigen::Index>(space.face_block());
    const auto               L  = static_cast<Eigen::Index>(space.local_size());

    op.scalar_mass = mass_matrix(op.basis);

    // right-hand side, component blocks side by side: [B_0 | B_1 | ...], each m x L
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, Dim * L);

    // Integrated by parts once: (grad v0, q) + <vb - v0, q.n>. Same operator as
    // -(v0, div q) + <vb, q.n>, but constants and P_k pairs {p, p} cancel
    // exactly instead of through terms of size 1/h^2 on slivers. The first term
    // needs no solve: grad v0 already lies in [P_{k+1}]^Dim and is added below.

    // <vb, q.n> on each face; the -<v0, q.n> part is formed after the solve
    // from the same columns, with the trace of v0 written exactly in the face
    // basis, so that v0 = vb on a face cancels to rounding
    const CellBasis<Dim>         phi(pts, k);
    std::array<Eigen::MatrixXd, Dim + 1> trace;
    for (int i = 0; i <= Dim; ++i)
    {
        const index_t    f    = mesh.cell_faces(c)[i].face;
        const Point<Dim> n    = mesh.outward_normal(c, i);
        const auto       chi  = face_basis(mesh, f, k + 1);
        const auto       fpts = mesh.face_points(f);
        const auto       pq   = map_quadrature<Dim>(fpts, 2 * k + 2);
        Eigen::VectorXd  psi(m);
        Eigen::VectorXd  chiv(nb);
        Eigen::MatrixXd  face_block = Eigen::MatrixXd::Zero(m, nb);
        for (std::size_t q = 0; q < pq.size(); ++q)
        {
            op.basis.eval(pq.points[q], psi);
            chi.eval(pq.points[q], chiv);
            face_block.noalias() += pq.weights[q] * psi * chiv.transpose();
        }
        trace[i] = trace_matrix(phi, chi);
        for (int comp = 0; comp < Dim; ++comp)
            B.block(0, comp * L + n0 + i * nb, m, nb) += n(comp) * face_block;
    }

    const Eigen::MatrixXd X = solve_spd(op.scalar_mass, B);
    op.G.resize(Dim * m, L);
    for (int comp = 0; comp < Dim; ++comp)
        op.G.block(comp * m, 0, m, L) = X.block(0, comp * L, m, L);

    // d/dx_comp of s^e is e_comp / scale_comp * s^(e - 1_comp), itself a psi
    const auto& ex = op.basis.exponents();
    for (Eigen::Index a = 1; a < n0; ++a)
        for (int comp = 0; comp < Dim; ++comp)
        {
            auto e = ex[static_cast<std::size_t>(a)];
            if (e[comp] == 0)
                continue;
            const double factor = e[comp]-- / op.basis.scale()(comp);
            const auto   j      = std::find(ex.begin(), ex.end(), e) - ex.begin();
            op.G(comp * m + j, a) += factor;
        }

    for (int i = 0; i <= Dim; ++i)
        op.G.leftCols(n0).noalias() -= op.G.middleCols(n0 + i * nb, nb) * trace[i];

    return op;
}

/* Local stiffness S = G^T M G, symmetric positive semidefinite. */
template<int Dim>
Eigen::MatrixXd
element_stiffness(const ElementWeakGradient<Dim>& op)
{
    const auto      m = static_cast<Eigen::Index>(op.basis.size());
    const auto      L = op.G.cols();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(L, L);
    for (int comp = 0; comp < Dim; ++comp)
    {
        const auto Gc = op.G.block(comp * m, 0, m, L);
        S.noalias() += Gc.transpose() * (op.scalar_mass * Gc);
    }
    return 0.5 * (S + S.transpose());
}

/* Quadrature degree used for the load (f, v0)_T. */
inline int
load_quad_degree(int k)
{
    return k + 5;
}

/*
 * Global system (grad_w u, grad_w v) = (f, v0) over the free dofs; boundary
 * face blocks are dropped (homogeneous Dirichlet). Skeleton rows carry no load.
 */
template<int Dim, typename F>
SparseSystem
assemble(const WgSpace<Dim>& space, const F& f)
{
    const auto& mesh = space.mesh();
    const auto  n    = static_cast<Eigen::Index>(space.num_free());
    const auto  L    = space.local_size();
    const auto  n0   = static_cast<Eigen::Index>(space.cell_block());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_cells() * L * L);

    SparseSystem sys;
    sys.b = Eigen::VectorXd::Zero(n);

    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const auto op   = weak_gradient_operator(space, c);
        const auto S    = element_stiffness(op);
        const auto dofs = space.local_dofs(c);
        for (std::size_t i = 0; i < L; ++i)
        {
            if (dofs[i] == invalid_index)
                continue;
            for (std::size_t j = 0; j < L; ++j)
                if (dofs[j] != invalid_index)
                    trip.emplace_back(static_cast<int>(dofs[i]), static_cast<int>(dofs[j]),
                                      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }

        const auto phi = cell_basis(mesh, c, space.degree());
        sys.b.segment(static_cast<Eigen::Index>(space.cell_offset(c)), n0) +=
            moments(phi, f, load_quad_degree(space.degree()));
    }

    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

/* Q_h u = {Pi_k u, Pi_{k+1}^e u}; boundary traces go to WgFunction::boundary. */
template<int Dim, typename F>
WgFunction<Dim>
interpolate_Qh(const WgSpace<Dim>& space, const F& u)
{
    const auto&     mesh = space.mesh();
    WgFunction<Dim> w(space);
    const auto      n0 = static_cast<Eigen::Index>(space.cell_block());
    const auto      nb = static_cast<Eigen::Index>(space.face_block());
    for (index_t c = 0; c < mesh.num_cells(); ++c)
        w.free.segment(static_cast<Eigen::Index>(space.cell_offset(c)), n0) =
            project_cell(mesh, c, u, space.degree());
    for (index_t f = 0; f < mesh.num_faces(); ++f)
    {
        const Eigen::VectorXd p = project_face(mesh, f, u, space.degree() + 1);
        if (space.face_offset(f) != invalid_index)
            w.free.segment(static_cast<Eigen::Index>(space.face_offset(f)), nb) = p;
        else
            w.boundary.segment(static_cast<Eigen::Index>(space.boundary_slot(f)), nb) = p;
    }
    return w;
}

template<int Dim>
WgFunction<Dim>
make_function(const WgSpace<Dim>& space, const Eigen::VectorXd& free)
{
    if (free.size() != static_cast<Eigen::Index>(space.num_free()))
        throw std::invalid_argument("make_function: coefficient vector has wrong length");
    WgFunction<Dim> w(space);
    w.free = free;
    return w;
}

/* Stacked coefficients of Pi_{k+1} grad u on cell c in the weak-gradient basis. */
template<int Dim, typename G>
Eigen::VectorXd
project_gradient(const ElementWeakGradient<Dim>& op, const G& grad_u, int quad_degree = -1)
{
    const auto m  = static_cast<Eigen::Index>(op.basis.size());
    const int  qd = quad_degree < 0 ? projection_quad_degree(op.basis.degree()) : quad_degree;
    const auto pq = map_quadrature<Dim>(op.basis.vertices(), qd);

    Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(m, Dim);
    Eigen::VectorXd psi(m);
    for (std::size_t q = 0; q < pq.size(); ++q)
    {
        op.basis.eval(pq.points[q], psi);
        const Point<Dim> g = grad_u(pq.points[q]);
        mom.noalias() += pq.weights[q] * psi * g.transpose();
    }
    const Eigen::MatrixXd coef = solve_spd(op.scalar_mass, mom);
    Eigen::VectorXd       out(Dim * m);
    for (int comp = 0; comp < Dim; ++comp)
        out.segment(comp * m, m) = coef.col(comp);
    return out;
}

/* ( sum_T || Pi_{k+1} grad u - grad_w u_h ||_T^2 )^{1/2} */
template<int Dim, typename G>
double
energy_error(const WgSpace<Dim>& space, const G& grad_u, const WgFunction<Dim>& uh)
{
    const auto m   = [](const auto& op) { return static_cast<Eigen::Index>(op.basis.size()); };
    double     sum = 0.0;
    for (index_t c = 0; c < space.mesh().num_cells(); ++c)
    {
        const auto            op   = weak_gradient_operator(space, c);
        const Eigen::VectorXd diff = project_gradient(op, grad_u) - op.G * uh.local_coefficients(c);
        for (int comp = 0; comp < Dim; ++comp)
        {
            const auto d = diff.segment(comp * m(op), m(op));
            sum += d.dot(op.scalar_mass * d);
        }
    }
    return std::sqrt(std::max(sum, 0.0));
}

/* ( sum_T || Pi_k u - u_0 ||_T^2 )^{1/2} */
template<int Dim, typename F>
double
l2_error(const WgSpace<Dim>& space, const F& u, const WgFunction<Dim>& uh)
{
    const auto& mesh = space.mesh();
    double      sum  = 0.0;
    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const auto            phi  = cell_basis(mesh, c, space.degree());
        const Eigen::MatrixXd M    = mass_matrix(phi);
        const Eigen::VectorXd ref  = solve_spd(M, moments(phi, u, projection_quad_degree(space.degree())));
        const Eigen::VectorXd diff = ref - uh.interior(c);
        sum += diff.dot(M * diff);
    }
    return std::sqrt(std::max(sum, 0.0));
}

/* || grad_w v ||_0 over the whole mesh. */
template<int Dim>
double
weak_gradient_norm(const WgSpace<Dim>& space, const WgFunction<Dim>& v)
{
    double sum = 0.0;
    for (index_t c = 0; c < space.mesh().num_cells(); ++c)
    {
        const auto            op = weak_gradient_operator(space, c);
        const Eigen::VectorXd g  = op.G * v.local_coefficients(c);
        sum += g.dot(op.vector_mass() * g);
    }
    return std::sqrt(std::max(sum, 0.0));
}

/* Broken H1 seminorm || grad v0 ||_0 of the interior part. */
template<int Dim>
double
broken_gradient_norm(const WgSpace<Dim>& space, const WgFunction<Dim>& v)
{
    const auto& mesh = space.mesh();
    double      sum  = 0.0;
    for (index_t c = 0; c < mesh.num_cells(); ++c)
    {
        const auto            phi = cell_basis(mesh, c, space.degree());
        const auto            pq  = map_quadrature<Dim>(phi.vertices(), std::max(2 * space.degree() - 2, 0));
        const Eigen::VectorXd v0  = v.interior(c);
        for (std::size_t q = 0; q < pq.size(); ++q)
        {
            const Point<Dim> g = phi.eval_gradients(pq.points[q]).transpose() * v0;
            sum += pq.weights[q] * g.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

/* Assembles and solves the discrete problem for load f. */
template<int Dim, typename F>
WgFunction<Dim>
solve_wg(const WgSpace<Dim>& space, const F& f, const SolveOptions& opts = {})
{
    const SparseSystem sys = assemble(space, f);
    return make_function(space, solve(sys, opts).x);
}

} // namespace wgfem
