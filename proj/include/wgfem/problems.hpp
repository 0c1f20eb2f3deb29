#pragma once

#include <stdexcept>
#include <string>

#include "wgfem/projection.hpp"

namespace wgfem
{

/* -Laplace(u) = f on the unit square/cube with u = 0 on the boundary. */
template<int Dim>
struct Problem
{
    std::string         id;
    ScalarFunction<Dim> u;
    VectorFunction<Dim> grad_u;
    ScalarFunction<Dim> f;
};

/*
 * poly2d: u = 2^4 (x-x^2)(y-y^2)
 * poly3d: u = 2^6 (x-x^2)(y-y^2)(z-z^2)
 * zero:   u = 0, f = 0 (either dimension)
 */
template<int Dim>
Problem<Dim>
builtin_problem(const std::string& id)
{
    Problem<Dim> p;
    p.id = id;
    if (id == "zero")
    {
        p.u      = [](const Point<Dim>&) { return 0.0; };
        p.grad_u = [](const Point<Dim>&) { return Point<Dim>::Zero().eval(); };
        p.f      = [](const Point<Dim>&) { return 0.0; };
        return p;
    }
    if constexpr (Dim == 2)
    {
        if (id == "poly2d")
        {
            p.u = [](const Point<2>& x) { return 16.0 * (x(0) - x(0) * x(0)) * (x(1) - x(1) * x(1)); };
            p.grad_u = [](const Point<2>& x) {
                const double X = x(0) - x(0) * x(0), Y = x(1) - x(1) * x(1);
                return Point<2>(16.0 * (1.0 - 2.0 * x(0)) * Y, 16.0 * X * (1.0 - 2.0 * x(1)));
            };
            p.f = [](const Point<2>& x) {
                return 32.0 * (x(1) - x(1) * x(1) + x(0) - x(0) * x(0));
            };
            return p;
        }
    }
    else
    {
        if (id == "poly3d")
        {
            p.u = [](const Point<3>& x) {
                return 64.0 * (x(0) - x(0) * x(0)) * (x(1) - x(1) * x(1)) * (x(2) - x(2) * x(2));
            };
            p.grad_u = [](const Point<3>& x) {
                const double X = x(0) - x(0) * x(0), Y = x(1) - x(1) * x(1), Z = x(2) - x(2) * x(2);
                return Point<3>(64.0 * (1.0 - 2.0 * x(0)) * Y * Z, 64.0 * X * (1.0 - 2.0 * x(1)) * Z,
                                64.0 * X * Y * (1.0 - 2.0 * x(2)));
            };
            p.f = [](const Point<3>& x) {
                const double X = x(0) - x(0) * x(0), Y = x(1) - x(1) * x(1), Z = x(2) - x(2) * x(2);
                return 128.0 * ((Y + X) * Z + X * Y);
            };
            return p;
        }
    }
    throw std::invalid_argument("builtin_problem: unknown problem '" + id + "' in dimension " +
                                std::to_string(Dim));
}

} // namespace wgfem
