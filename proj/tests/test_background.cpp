#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ncflow/background.hpp"
#include "ncflow/errors.hpp"
#include "oracles.hpp"

using namespace ncflow;

TEST_CASE("flat cone closed forms") {
    for (int n : {2, 3, 7}) {
        const double r0 = 1.5;
        NullConeModel m = make_minkowski(n, r0, 2.0);
        CHECK(m.n == n);
        CHECK(m.theta_bar(0.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        for (double s : {0.0, 0.3, 1.0, 1.9}) {
            const double r = r0 * (1.0 + s / n);
            CHECK(m.theta_bar(s, 0) ==
                  doctest::Approx(n / (n + s)).epsilon(1e-14));
            CHECK(m.hvec2_slice(s, 0) ==
                  doctest::Approx(n * n / (r * r)).epsilon(1e-14));
            // flat space: no curvature, no shear, no torsion
            CHECK(m.ricci_LL(s, 0) == 0.0);
            CHECK(m.ricci_Lnu(s, 0) == 0.0);
            CHECK(m.weyl_nLnL(s, 0) == 0.0);
            CHECK(m.shear_norm(s, 0) == 0.0);
            CHECK(m.zeta_theta(s, 0) == 0.0);
        }
    }
}

TEST_CASE("black hole cone closed forms") {
    const double M = 1.0, r0 = 2.0;
    NullConeModel m = make_schwarzschild(M, r0, 2.0);
    // marginally trapped at the base radius 2M
    CHECK(m.hvec2_slice(0.0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    for (double s : {0.1, 0.5, 1.0, 1.7}) {
        const double r = r0 * (1.0 + s / 2.0);
        CHECK(m.theta_bar(s, 0) == doctest::Approx(r0 / r).epsilon(1e-14));
        CHECK(m.hvec2_slice(s, 0) ==
              doctest::Approx((1.0 - 2.0 * M / r) / (r * r)).epsilon(1e-13));
        CHECK(m.weyl_nLnL(s, 0) ==
              doctest::Approx(-M / (2.0 * r * r * r)).epsilon(1e-14));
        CHECK(m.ricci_LL(s, 0) == 0.0);
        CHECK(m.shear_norm(s, 0) == 0.0);
    }
    // the stored s-derivatives match an independent finite difference
    for (double s : {0.2, 0.8, 1.4}) {
        const double fd_tb =
            oracle::d1([&](double x) { return m.theta_bar(x, 0); }, s, 1e-3);
        const double fd_t =
            oracle::d1([&](double x) { return m.theta(x, 0); }, s, 1e-3);
        CHECK(m.theta_bar_ds(s, 0) == doctest::Approx(fd_tb).epsilon(1e-10));
        CHECK(m.theta_ds(s, 0) == doctest::Approx(fd_t).epsilon(1e-10));
    }
    // cross-focusing of the slice family: -theta' = (theta_bar/n) theta + W
    for (double s : {0.1, 0.6, 1.2, 1.8}) {
        const double lhs = -m.theta_ds(s, 0);
        const double rhs = m.theta_bar(s, 0) / m.n * m.theta(s, 0) +
                           m.weyl_nLnL(s, 0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("optical equation holds on the stored fields") {
    NullConeModel mink = make_minkowski(3, 1.0, 2.0);
    NullConeModel schw = make_schwarzschild(1.0, 2.0, 2.0);
    // the probe residual is pure central-difference truncation, h^2/6 times
    // the third derivative of theta_bar, so it shrinks 100x per decade of h
    CHECK(raychaudhuri_residual(mink, 1e-3, 40).sup < 1e-7);
    CHECK(raychaudhuri_residual(mink, 1e-4, 40).sup < 1e-9);
    CHECK(raychaudhuri_residual(schw, 1e-4, 40).sup < 1e-9);
}

TEST_CASE("perturbed cone integrates the optical equation") {
    NullConeModel base = make_schwarzschild(1.0, 2.0, 2.0, 48);
    Perturbations pert;
    pert.shear = [](double s, double th) {
        const double sn = std::sin(th);
        return 0.08 * sn * sn / (1.0 + s);
    };
    pert.ricci_LL = [](double s, double) {
        const double tb = 2.0 / (2.0 + s);
        return 0.05 * tb * tb;
    };
    NullConeModel m = make_perturbed_axisymmetric(base, pert);

    // independent reference: integrate theta_bar' = -|shear|^2
    //   - theta_bar^2/n - ricci_LL down one column with a fine fourth
    //   order integrator and compare at the far end
    const int j = 17;
    const double th = m.grid.theta[j];
    auto rhs = [&](double s, const std::vector<double>& y) {
        const double sh = pert.shear(s, th);
        const double rc = pert.ricci_LL(s, 0.0);
        return std::vector<double>{-sh * sh - y[0] * y[0] / 2.0 - rc};
    };
    for (double s_end : {0.5, 1.3, 1.9}) {
        const auto y = oracle::rk4(rhs, {1.0}, 0.0, s_end, 16384);
        CHECK(m.theta_bar(s_end, j) == doctest::Approx(y[0]).epsilon(1e-10));
    }
    CHECK(raychaudhuri_residual(m, 1e-3, 40).sup < 1e-6);

    // the perturbation leaves the round cells round
    CHECK(m.shear_norm(1.0, j) > 0.0);
    CHECK(m.symmetric() == false);
}

TEST_CASE("focal point reported when the generators refocus") {
    NullConeModel base = make_minkowski(2, 1.0, 2.0, 8);
    Perturbations pert;
    pert.shear = [](double, double) { return 40.0; };
    try {
        make_perturbed_axisymmetric(base, pert);
        FAIL("expected a focal point error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::focal_point);
    }
}
