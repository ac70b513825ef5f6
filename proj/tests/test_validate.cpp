#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ncflow/errors.hpp"
#include "ncflow/validate.hpp"
#include "oracles.hpp"

using namespace ncflow;

namespace {

NullConeModel sheared_cone(int n_theta) {
    NullConeModel base = make_schwarzschild(1.0, 2.0, 2.0, n_theta);
    Perturbations pert;
    pert.shear = [](double s, double th) {
        const double sn = std::sin(th);
        return 0.06 * sn * sn / (1.0 + s);
    };
    pert.ricci_LL = [](double s, double) {
        const double tb = 2.0 / (2.0 + s);
        return 0.04 * tb * tb;
    };
    return make_perturbed_axisymmetric(base, pert);
}

SyntheticFamily default_family(const NullConeModel& m) {
    SyntheticFamily fam;
    fam.omega0.resize(m.grid.n_cells);
    fam.speed.resize(m.grid.n_cells);
    for (int j = 0; j < m.grid.n_cells; ++j) {
        const double sn = std::sin(m.grid.theta[j]);
        fam.omega0[j] = 0.5 + 0.1 * sn * sn;
        fam.speed[j] = 0.8 + 0.2 * std::cos(m.grid.theta[j]);
    }
    return fam;
}

} // namespace

TEST_CASE("evolution identities converge at second order off round cones") {
    NullConeModel m = sheared_cone(32);
    SyntheticFamily fam = default_family(m);
    ResidualReport metric = check_metric_evolution(m, fam, 0.1, 0.02, 4);
    ResidualReport u = check_u_evolution(m, fam, 0.1, 0.02, 4);
    ResidualReport h = check_H_evolution(m, 0.5, fam.speed, 0.02, 4);
    // the residuals are genuinely nonzero here, so the orders mean something
    CHECK(metric.sup_residuals.back() > 0.0);
    CHECK(u.sup_residuals.back() > 0.0);
    CHECK(metric.measured_order >= 1.9);
    CHECK(u.measured_order >= 1.9);
    CHECK(h.measured_order >= 1.9);
}

TEST_CASE("round cones satisfy the metric and gradient identities exactly") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0, 16);
    SyntheticFamily fam = default_family(m);
    ResidualReport metric = check_metric_evolution(m, fam, 0.1, 0.02, 3);
    // the conformal factor is linear in height, so the centered difference
    // is exact up to roundoff; the 1/h^2 amplification of the double
    // rounding caps the floor near 1e-12 at these spacings
    for (double r : metric.sup_residuals) CHECK(r < 1e-11);
}

TEST_CASE("curvature evolution ties into the stability coefficient") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0, 24);
    SyntheticFamily fam = default_family(m);
    ResidualReport h = check_H_evolution(m, 0.5, fam.speed, 0.02, 4);
    CHECK(h.measured_order >= 1.9);
    ResidualReport ray = check_raychaudhuri(m, 0.02, 4);
    CHECK(ray.measured_order >= 1.9);
}

TEST_CASE("speed field refines at first order in the time step") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0);
    SpeedOrderReport rep = check_speed_evolution(
        m, Prescription::stcmc(0.01), {0.5}, 0.1, 0.002, 4, {});
    CHECK(rep.measured_order >= 0.9);
    CHECK(rep.measured_order <= 1.5);
}

TEST_CASE("speed identity holds along reference trajectories") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0);
    CHECK(speed_identity_residual(m, Prescription::stcmc(0.01), 0.6, 2.0, 8) <
          1e-6);
    // prescribed profile with its height derivative supplied
    const NullConeModel* mp = &m;
    auto rho = [mp](double s, int j) {
        return mp->hvec2_slice(s, j) * (1.2 - 0.4 * s);
    };
    auto rho_ds = [mp](double s, int j) {
        const double p = mp->hvec2_slice(s, j);
        const double pp = 2.0 * (mp->theta_ds(s, j) * mp->theta_bar(s, j) +
                                 mp->theta(s, j) * mp->theta_bar_ds(s, j));
        return pp * (1.2 - 0.4 * s) - 0.4 * p;
    };
    CHECK(speed_identity_residual(m, Prescription::prescribed(rho, rho_ds),
                                  0.8, 2.0, 8) < 1e-6);
    NullConeModel mink = make_minkowski(3, 1.0, 2.0);
    const NullConeModel* kp = &mink;
    auto rho2 = [kp](double s, int j) {
        return kp->hvec2_slice(s, j) * (1.2 - 0.4 * s);
    };
    auto rho2_ds = [kp](double s, int j) {
        const double p = kp->hvec2_slice(s, j);
        const double pp = 2.0 * (kp->theta_ds(s, j) * kp->theta_bar(s, j) +
                                 kp->theta(s, j) * kp->theta_bar_ds(s, j));
        return pp * (1.2 - 0.4 * s) - 0.4 * p;
    };
    CHECK(speed_identity_residual(mink, Prescription::prescribed(rho2, rho2_ds),
                                  0.8, 2.0, 8) < 1e-6);
}

TEST_CASE("difference ladder needs at least three levels") {
    NullConeModel m = make_schwarzschild(1.0, 2.0, 2.0);
    SyntheticFamily fam = default_family(m);
    try {
        check_metric_evolution(m, fam, 0.1, 0.02, 2);
        FAIL("two levels accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parameter);
    }
}
