#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ncflow/field.hpp"
#include "ncflow/grid.hpp"

namespace ncflow {

// Truncated null cone [0, Lambda) x S with affinely parametrized generators,
// normalized so the generator expansion theta_bar equals 1 on the base
// cross-section.  Cross-section metric is round or axisymmetric,
//   gamma = a(s,th)^2 dth^2 + b(s,th)^2 sin^2(th) dphi^2   (n = 2),
// and in symmetric mode every field depends on s only (a = b = conformal
// radius).  theta is the expansion of the cross-sections toward the interior
// null direction; together with theta_bar it gives the squared mean curvature
// vector of a slice, hvec2 = 2 theta theta_bar.
//
// chibar_* are the mixed principal components of the cone's second
// fundamental form: chibar_aa = theta_bar/n + k, chibar_bb = theta_bar/n - k
// with k = shear_norm / sqrt(2) in axisymmetric mode (k = 0 when round).
// zeta_theta is the covariant colatitude component of the torsion one-form of
// the cross-sections; it must vanish at the poles.
struct NullConeModel {
    std::string family;
    int n = 2;            // cross-section dimension
    double s_max = 0.0;   // Lambda
    PolarGrid grid;

    ConeField theta_bar;
    ConeField theta_bar_ds;  // exact s-derivative (Raychaudhuri right side)
    ConeField theta;
    ConeField theta_ds;
    ConeField metric_a;      // sqrt(gamma_theta_theta)
    ConeField metric_b;      // sqrt(gamma_phi_phi) / sin(theta)
    ConeField chibar_aa;
    ConeField chibar_bb;
    ConeField shear_norm;    // |trace-free part of chibar|
    ConeField zeta_theta;
    ConeField ricci_LL;      // Ricci(generator, generator)
    ConeField ricci_Lnu;     // Ricci(generator, interior null normal)
    ConeField weyl_nLnL;     // <R(nu, L)nu, L> on cross-sections

    // parameters echoed into run manifests
    std::vector<std::pair<std::string, double>> params;

    bool symmetric() const { return grid.symmetric(); }
    double hvec2_slice(double s, int j) const {
        return 2.0 * theta(s, j) * theta_bar(s, j);
    }
};

// Flat model: conformal radius r(s) = r0 (1 + s/n), theta_bar = n/(n+s),
// theta chosen so 2 theta theta_bar = n^2 / r(s)^2.  All curvature
// contractions, shear and torsion vanish.
NullConeModel make_minkowski(int n, double r0, double s_max, int n_theta = 1);

// Standard cone in the Schwarzschild exterior (n = 2), mass M, base radius
// r0: r(s) = r0 (1 + s/2), theta_bar = r0 / r, theta defined through the
// profile 2 theta theta_bar = (1 - 2M/r) / r^2, so the marginally outer
// trapped slice sits at r = 2M and the profile peaks at r = 3M.  Vacuum:
// ricci_* = 0, shear-free; weyl_nLnL = -M / (2 r^3), the unique value
// consistent with d/ds (2 theta theta_bar) under the slice-family identity.
NullConeModel make_schwarzschild(double mass, double r0, double s_max,
                                 int n_theta = 1);

// Smooth perturbations applied on top of a round base model.  Each entry maps
// (s, colatitude) to a pointwise value; null entries mean zero.  shear gives
// |trace-free chibar| >= 0 directly.  weyl_extra is *added* to the derived
// (slice-consistent) weyl_nLnL; a nonzero value deliberately breaks the
// cross-focusing identity and is only meaningful for monitor stress tests.
struct Perturbations {
    std::function<double(double, double)> shear;
    std::function<double(double, double)> ricci_LL;
    std::function<double(double, double)> ricci_Lnu;
    std::function<double(double, double)> zeta_theta;
    std::function<double(double, double)> weyl_extra;
};

// Rebuilds theta_bar by integrating the optical equation
//   d theta_bar / ds = -|shear|^2 - theta_bar^2 / n - ricci_LL
// column by column (classical RK4, fixed step s_max / 4096), rescales the
// cross-section metric consistently with the perturbed chibar, keeps the
// base hvec2 profile (theta = base profile / (2 theta_bar)), and derives
// weyl_nLnL from the slice cross-focusing identity so that evolution
// residual checks converge on the perturbed model as well.
// Fails with ErrorKind::focal_point if theta_bar reaches zero before s_max.
NullConeModel make_perturbed_axisymmetric(const NullConeModel& base,
                                          const Perturbations& pert);

struct RaychaudhuriResidual {
    double sup = 0.0;   // worst |forward difference + right-hand side|
    double at_s = 0.0;
    int at_cell = 0;
};

// Midpoint finite-difference check of the optical equation on the stored
// theta_bar field: samples n_samples values of s per column with increment h.
RaychaudhuriResidual raychaudhuri_residual(const NullConeModel& model,
                                           double h, int n_samples);

// Shared helper: SampledField slopes from second-order differences of node
// values (used where no analytic right-hand side is available).
void fill_slopes_by_differences(SampledField& f);

} // namespace ncflow
