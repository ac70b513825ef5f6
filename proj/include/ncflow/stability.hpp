#pragma once

#include <vector>

#include "ncflow/graph.hpp"

namespace ncflow {

// Linearized stability of a leaf with constant squared mean curvature
// vector lambda: the operator  L f = -Lap f - 2 tau(grad f) + B f  with
//
//   B = -tfchibar . h - (lambda/2)(|tfchibar|^2 / theta_bar^2 + 2/n
//         + ricci_LL / theta_bar^2) - div tau - |tau|^2 - ricci_Lnu
//         - weyl_nLnL,
//
// all contractions taken from the model fields at the graph points
// (tfchibar is the trace-free part of chibar).  A positive principal
// eigenvalue certifies that the leaf moves strictly outward under an
// increase of lambda, which is what the foliation sweep consumes.
struct StabilityReport {
    double lambda = 0.0;
    double eigenvalue = 0.0;
    double threshold = 0.0;
    bool stable = false;      // eigenvalue > threshold
    bool b_positive = false;  // min B > 0: cheap sufficient certificate
    double min_b = 0.0, max_b = 0.0;
    std::vector<double> b_field;
    std::vector<double> eigenfunction; // positive, sup-normalized
    int iterations = 0;
    double residual = 0.0;
};

// Zero-order coefficient per cell.  Requires the surface to be lambda-STCMC
// up to stcmc_tol: sup |hvec2 - lambda| <= stcmc_tol.
std::vector<double> stability_b_field(const GraphSurface& surface,
                                      double lambda, double stcmc_tol);

// Same assembly with a pointwise curvature value instead of a single
// lambda, for surfaces that are not leaves (for instance coordinate slices
// of a nonround cone, where hvec2 varies over the cross-section).
std::vector<double> stability_b_field(const GraphSurface& surface,
                                      const std::vector<double>& hvec2_local);

// Principal (smallest) eigenvalue of L on the surface via shifted inverse
// iteration on the tridiagonal discretization; the shift comes from a
// Gershgorin lower bound so the iteration matrix stays an M-matrix and the
// eigenfunction inherits positivity.
StabilityReport principal_eigenvalue(const GraphSurface& surface,
                                     const std::vector<double>& b_field,
                                     double threshold = 1e-8);

// stability_b_field + principal_eigenvalue in one call.
StabilityReport analyze_stability(const GraphSurface& surface, double lambda,
                                  double stcmc_tol, double threshold = 1e-8);

inline bool is_stable(const StabilityReport& report) { return report.stable; }

// Oracle for the coefficient assembly: on symmetric models every slice is a
// leaf for its own lambda = hvec2(s), and  2 theta_bar B  must equal
// d/ds (2 theta theta_bar).  Returns the sup of the mismatch over sampled
// heights in [0, s_hi].
double slice_identity_residual(const NullConeModel& model, double s_hi,
                               int n_samples);

} // namespace ncflow
