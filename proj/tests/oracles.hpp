#pragma once

// Independent reference computations for the unit tests. Nothing here calls the
// closed forms under test.

#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle
{

inline double simpson_step(const std::function<double(double)> &f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth)
{
    const auto m = (a + b) / 2;
    const auto lm = (a + m) / 2, rm = (m + b) / 2;
    const auto flm = f(lm), frm = f(rm);
    const auto left = (m - a) / 6 * (fa + 4 * flm + fm);
    const auto right = (b - m) / 6 * (fm + 4 * frm + fb);
    const auto delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) {
        return left + right + delta / 15;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
           + simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)> &f, double a, double b, double tol = 1e-10)
{
    if (a == b) {
        return 0;
    }
    const auto fa = f(a), fb = f(b), fm = f((a + b) / 2);
    const auto whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Density of rho_N, written out from its definition.
inline double nu(int N, double x)
{
    return 1 / (std::log(static_cast<double>(N) / (N - 1)) * (x + N - 1));
}

// rho_N([a, b]) by quadrature of the density.
inline double rho_mass(int N, double a, double b)
{
    return simpson([N](double x) { return nu(N, x); }, a, b, 1e-13);
}

// zeta(2, a) = trigamma(a).
inline double hurwitz2(double a)
{
    return boost::math::trigamma(a);
}

// sum_{i >= first} f(i) for terms decaying like i^-2: direct sum to `terms`, then
// the integral tail with a midpoint correction.
inline double series(const std::function<double(double)> &f, double first, long terms = 200000)
{
    double sum = 0;
    for (long k = terms - 1; k >= 0; --k) {
        sum += f(first + static_cast<double>(k));
    }
    const auto edge = first + static_cast<double>(terms) - 0.5;
    // tail integral of f over [edge, inf) by substitution u = 1/x
    auto g = [&](double u) {
        // the integrand has a finite limit at u = 0; approach it from 1e-9
        u = std::max(u, 1e-9);
        return f(1 / u) / (u * u);
    };
    sum += simpson(g, 0, 1 / edge, 1e-16);
    return sum;
}

} // namespace oracle
