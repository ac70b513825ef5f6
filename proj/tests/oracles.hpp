// Self-contained numerical helpers used as independent cross-checks in the
// tests.  Nothing here calls into the library under test.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// Bisection root of g on [lo, hi]; the bracket must change sign.
inline double bisect(const std::function<double(double)>& g, double lo,
                     double hi, int iters = 200) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0) == (ghi > 0))
        throw std::runtime_error("bisect: no sign change in bracket");
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Classical fourth order integrator for y' = f(s, y), fixed step count.
inline std::vector<double> rk4(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
    std::vector<double> y, double s0, double s1, int steps) {
    const double h = (s1 - s0) / steps;
    auto axpy = [](const std::vector<double>& a, double c,
                   const std::vector<double>& b) {
        std::vector<double> r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    for (int k = 0; k < steps; ++k) {
        const double s = s0 + k * h;
        const auto k1 = f(s, y);
        const auto k2 = f(s + 0.5 * h, axpy(y, 0.5 * h, k1));
        const auto k3 = f(s + 0.5 * h, axpy(y, 0.5 * h, k2));
        const auto k4 = f(s + h, axpy(y, h, k3));
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return y;
}

// Centered fourth order first and second derivative stencils.
inline double d1(const std::function<double(double)>& g, double x, double h) {
    return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) /
           (12 * h);
}

inline double d2(const std::function<double(double)>& g, double x, double h) {
    return (-g(x - 2 * h) + 16 * g(x - h) - 30 * g(x) + 16 * g(x + h) -
            g(x + 2 * h)) /
           (12 * h * h);
}

} // namespace oracle
