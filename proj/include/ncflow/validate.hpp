#pragma once

#include <string>
#include <vector>

#include "ncflow/flow.hpp"

namespace ncflow {

// Straight-line graph family omega(t) = omega0 + t * speed with a
// time-independent normal speed profile, used to probe the evolution
// identities of the induced geometry.
struct SyntheticFamily {
    std::vector<double> omega0;
    std::vector<double> speed;
};

// Residuals of one identity at a fixed base point for a ladder of halved
// spacings.  The convergence order is estimated from differences of the
// residual fields between consecutive levels: contributions that do not
// depend on the spacing (for instance the fixed spatial floor of the
// discrete coefficients) are identical on every level and drop out of the
// differences, so the ratios isolate the differencing error itself.
struct ResidualReport {
    std::string label;
    std::vector<double> spacings;
    std::vector<double> sup_residuals; // sup |R_h| per level
    std::vector<double> differences;   // sup |R_k - R_{k+1}|
    std::vector<double> orders;        // log2 of consecutive difference ratios
    double measured_order = 0.0;       // finest ratio
};

// d/dt g_ij = 2 f chibar_ij for both principal metric components, with the
// left side from a central time difference at t0.  The identity holds for
// any family, so the residual is pure differencing error.
ResidualReport check_metric_evolution(const NullConeModel& model,
                                      const SyntheticFamily& family,
                                      double t0, double h0, int levels);

// d/dt u = <grad f, grad omega> - 2 u f chibar^th_th, both sides assembled
// from the same discrete gradient; holds for any family.
ResidualReport check_u_evolution(const NullConeModel& model,
                                 const SyntheticFamily& family, double t0,
                                 double h0, int levels);

// d/dt hvec2 = 2 theta_bar (-Lap f - 2 tau(grad f) + B f) checked at
// slice-centered families (constant omega0 = s0, arbitrary speed).  B is the
// stability coefficient of the slice, so this ties the flow linearization
// and the stability assembly together.
ResidualReport check_H_evolution(const NullConeModel& model, double s0,
                                 const std::vector<double>& speed, double h0,
                                 int levels);

// Optical equation residual d theta_bar / ds + |tfchibar|^2 + theta_bar^2/n
// + ricci_LL on a fixed (s, cell) sample set with central differences.
ResidualReport check_raychaudhuri(const NullConeModel& model, double h0,
                                  int levels);

// Convergence of the recorded speed field in the time step: the same flow is
// rerun with dt, dt/2, ..., and the speed fields are compared at the matched
// time t0 = round(t0/dt) * dt.  The semi-implicit splitting is first order,
// so the measured order sits near one.
struct SpeedOrderReport {
    std::vector<double> dts;
    std::vector<double> differences; // sup |f_k(t0) - f_{k+1}(t0)|
    std::vector<double> orders;
    double measured_order = 0.0;
};

SpeedOrderReport check_speed_evolution(const NullConeModel& model,
                                       const Prescription& presc,
                                       const std::vector<double>& omega0,
                                       double t0, double dt0, int levels,
                                       const FlowOptions& base);

// On symmetric models every tangential term drops and the speed obeys
//   df/dt = f (d beta/ds + (theta_bar/n) H + ricci_Lnu + weyl_nLnL)
// exactly.  The residual is evaluated at checkpoints along a classical
// fourth-order reference trajectory of the height ODE; a prescribed rho
// must come with its height derivative.
double speed_identity_residual(const NullConeModel& model,
                               const Prescription& presc, double s0,
                               double t_end, int n_checkpoints);

} // namespace ncflow
