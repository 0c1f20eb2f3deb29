#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wgfem
{

using index_t = std::size_t;

inline constexpr index_t invalid_index = std::numeric_limits<index_t>::max();

template<int N>
using Point = Eigen::Matrix<double, N, 1>;

/* Raised when a numerical kernel meets a system it cannot factor or solve. */
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/* Number of monomials of total degree <= k in d variables, C(k+d, d). */
constexpr std::size_t
polynomial_space_dim(int k, int d)
{
    if (k < 0)
        return 0;
    std::size_t num = 1;
    std::size_t den = 1;
    for (int i = 1; i <= d; ++i)
    {
        num *= static_cast<std::size_t>(k + i);
        den *= static_cast<std::size_t>(i);
    }
    return num / den;
}

constexpr double
factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

} // namespace wgfem
