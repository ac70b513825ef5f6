#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ncflow/errors.hpp"
#include "ncflow/flow.hpp"
#include "ncflow/stability.hpp"
#include "oracles.hpp"

using namespace ncflow;

namespace {

GraphSurface solve_leaf(const NullConeModel& m, double lambda, int n_theta) {
    FlowOptions opts;
    opts.tol = 1e-11;
    std::vector<double> omega0(n_theta, 0.6);
    RunResult res =
        run_to_stationary(m, Prescription::stcmc(lambda), omega0, opts);
    REQUIRE(res.status == ExitStatus::converged);
    return res.final_surface;
}

} // namespace

TEST_CASE("eigenvalue of a round leaf matches the closed form") {
    // on the vacuum n = 2 cone the zero-order coefficient collapses to
    // B = 1/(2 r^3) - lambda/2, and for a constant coefficient the
    // principal eigenvalue is B itself
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0);
    for (double lambda : {0.005, 0.02, 0.03}) {
        GraphSurface leaf = solve_leaf(m, lambda, 1);
        const double r = 2.0 * (1.0 + leaf.omega[0] / 2.0);
        const double expected = 1.0 / (2.0 * r * r * r) - lambda / 2.0;
        StabilityReport rep = analyze_stability(leaf, lambda, 1e-9);
        CHECK(rep.eigenvalue == doctest::Approx(expected).epsilon(1e-7));
        CHECK(rep.stable);
        CHECK(rep.b_positive);
        CHECK(rep.eigenfunction[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("resolved leaf keeps the constant-coefficient eigenvalue") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0, 64);
    const double lambda = 0.02;
    GraphSurface leaf = solve_leaf(m, lambda, 64);
    StabilityReport rep = analyze_stability(leaf, lambda, 1e-9);
    const double r = 2.0 * (1.0 + leaf.omega[0] / 2.0);
    CHECK(rep.eigenvalue ==
          doctest::Approx(1.0 / (2.0 * r * r * r) - lambda / 2.0)
              .epsilon(1e-6));
    // positive sup-normalized eigenfunction
    double mx = 0.0;
    for (double v : rep.eigenfunction) {
        CHECK(v > 0.0);
        mx = std::max(mx, v);
    }
    CHECK(mx == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.residual <= 1e-10);
}

TEST_CASE("upper branch slices are unstable") {
    // beyond the curvature peak at r = 3M the coefficient changes sign
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0);
    GraphSurface outer = build_slice(m, 1.4); // r = 3.4
    const double lambda = outer.hvec2[0];
    StabilityReport rep = analyze_stability(outer, lambda, 1e-9);
    CHECK(rep.eigenvalue < 0.0);
    CHECK(!rep.stable);
}

TEST_CASE("slice families tie the coefficient to the curvature profile") {
    // 2 theta_bar B = d/ds (2 theta theta_bar) along coordinate slices
    NullConeModel mink = make_minkowski(3, 1.0, 2.0);
    NullConeModel schw = make_schwarzschild(1.0, 2.0, 2.0);
    CHECK(slice_identity_residual(mink, 1.8, 64) < 1e-6);
    CHECK(slice_identity_residual(schw, 1.8, 64) < 1e-6);
}

TEST_CASE("pointwise coefficient on a sheared slice") {
    NullConeModel base = make_schwarzschild(1.0, 2.0, 2.0, 48);
    Perturbations pert;
    pert.shear = [](double s, double th) {
        const double sn = std::sin(th);
        return 0.1 * sn * sn / (1.0 + s);
    };
    NullConeModel m = make_perturbed_axisymmetric(base, pert);
    const double s = 0.8;
    GraphSurface slice = build_slice(m, s);
    const auto b = stability_b_field(slice, slice.hvec2);
    // against an independent height derivative of the local profile
    for (int j = 0; j < slice.cells(); ++j) {
        const double dprof = oracle::d1(
            [&](double x) { return m.hvec2_slice(x, j); }, s, 1e-4);
        CHECK(std::abs(2.0 * slice.theta_bar_on[j] * b[j] - dprof) < 1e-6);
    }
}

TEST_CASE("mismatched curvature is rejected") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0);
    GraphSurface slice = build_slice(m, 0.5);
    try {
        stability_b_field(slice, 0.5, 1e-12);
        FAIL("slice accepted as a leaf for the wrong lambda");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::precondition);
    }
}
