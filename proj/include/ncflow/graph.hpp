#pragma once

#include <vector>

#include "ncflow/background.hpp"

namespace ncflow {

// Spacelike graph omega : S -> [0, Lambda) over the cone cross-sections,
// with all geometric fields evaluated at the graph points (the induced
// metric of a graph equals the cross-section metric at the corresponding
// height, because the generators are null).
//
// Discrete conventions (cell-centered colatitude grid, even pole extension):
//  * omega_p is the central first difference; u = omega_p^2 / (2 a^2) uses
//    the same stencil family as the Laplacian so the trace identity stays
//    discretely consistent,
//  * lap is the conservative flux-form Laplace-Beltrami operator; its flux
//    coefficient bs/a is averaged from cell values onto faces and vanishes
//    at the poles, which makes the operator symmetric in the g-volume inner
//    product and exactly annihilates constants,
//  * H = theta - 2 zeta(grad omega) + u theta_bar - lap omega  (trace of the
//    graph Hessian identity; the torsion term vanishes for round models),
//  * hvec2 = 2 H theta_bar is the squared mean curvature vector,
//  * tau = zeta - chibar(. , grad omega) restricted to the colatitude slot,
//  * h_mix_a / h_mix_b are the principal mixed components of the second
//    fundamental form toward the interior normal, assembled from the same
//    Hessian identity with the round cross-section choice chi = (theta/n) g.
struct GraphSurface {
    const NullConeModel* model = nullptr;
    std::vector<double> omega;
    std::vector<double> a_on, bs_on, sqrtg, flux_coef;
    std::vector<double> theta_bar_on, theta_on;
    std::vector<double> shear_on, zeta_on, ricci_LL_on, ricci_Lnu_on, weyl_on;
    std::vector<double> chibar_a_on, chibar_b_on;
    std::vector<double> omega_p, u, lap, H, hvec2, tau;
    std::vector<double> h_mix_a, h_mix_b;
    double min_omega = 0, max_omega = 0, max_u = 0;
    double min_hvec2 = 0, max_hvec2 = 0;

    int cells() const { return int(omega.size()); }
};

// Builds the surface and every derived field.  omega must have one entry per
// grid cell (a single entry in symmetric mode), stay inside [0, Lambda), and
// produce finite discrete derivatives; otherwise ErrorKind::domain or
// ErrorKind::discretization is raised.
GraphSurface build_surface(const NullConeModel& model,
                           const std::vector<double>& omega);

// Coordinate slice at height s.
GraphSurface build_slice(const NullConeModel& model, double s);

// Torsion one-form of the surface (covariant colatitude component).
const std::vector<double>& torsion_tau(const GraphSurface& surface);

// Flux-form Laplace-Beltrami of a cell field in the surface metric, the
// same stencil that enters H (pole faces carry zero flux).
std::vector<double> surface_laplacian(const GraphSurface& surface,
                                      const std::vector<double>& field);

// Central colatitude derivative with the even pole extension.
std::vector<double> surface_gradient(const GraphSurface& surface,
                                     const std::vector<double>& field);

struct CurvatureProxy {
    double value = 0.0;  // sup(|h| + |chibar|)
    bool steep = false;  // gradient at the grid-resolution limit
};

// Pointwise |h|_g + |chibar|_g, maximized over the surface.  The steep flag
// trips when |omega_p| h reaches a fixed fraction of the domain height,
// signalling that the proxy is no longer trustworthy on this grid.
CurvatureProxy curvature_proxy(const GraphSurface& surface);

struct ComparisonFlag {
    bool ordered = false;     // omega_b >= omega_a - tol everywhere
    bool touching = false;    // min gap <= tol
    bool identical = false;   // max gap <= tol
    bool hvec2_dominates = false; // hvec2_b >= hvec2_a - tol everywhere
    bool violation = false;   // touching, distinct, ordered and dominating:
                              // impossible for exact solutions, so flags a
                              // discretization artifact
};

// Discrete strong-comparison test for an ordered touching pair.
ComparisonFlag strong_comparison_flag(const GraphSurface& a,
                                      const GraphSurface& b, double tol);

} // namespace ncflow
