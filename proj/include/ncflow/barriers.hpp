#pragma once

#include <string>
#include <vector>

#include "ncflow/flow.hpp"

namespace ncflow {

// Scale-invariant curvature constants of a cone region: bounds of
// ricci_LL / theta_bar^2 and |tfchibar| / theta_bar over [s_lo, s_hi] x S.
// Estimated on a sampling grid with one refinement pass around the
// extremizers.  ricci_nonneg records the sign hypothesis c_r >= 0.
struct ConeConstants {
    double c_r = 0.0;   // inf ricci_LL / theta_bar^2
    double c_r_up = 0.0; // sup ricci_LL / theta_bar^2
    double c_chi = 0.0; // sup |tfchibar| / theta_bar
    bool ricci_nonneg = true;
    double s_lo = 0.0, s_hi = 0.0;
};

ConeConstants cone_constants(const NullConeModel& model, double s_lo,
                             double s_hi);

// Generator-expansion envelope: with W = n / (1 + n c_r) and
// Z = n / (1 + n (c_r_up + c_chi^2)), the optical equation forces
// Z/(Z+s) <= theta_bar <= W/(W+s).  slack absorbs integrator rounding on
// families that attain a bound exactly.
struct SandwichReport {
    bool ok = true;
    double w_upper = 0.0, z_lower = 0.0;
    double worst_low = 0.0;  // max(lower bound - theta_bar)
    double worst_high = 0.0; // max(theta_bar - upper bound)
};

SandwichReport theta_bar_sandwich(const NullConeModel& model,
                                  const ConeConstants& constants,
                                  int n_samples, double slack);

// Coefficients of the Euler-Cauchy comparison equation
//   A_delta/(s+W)^2 mu + B/(s+W) mu' + mu'' = 0
// and its discriminant  script_d = (B-1)^2 - 4 A_0.  The coefficient B and
// the branch hypothesis depend on the dimension:
//   n <= 6:  requires c_chi <= c_r/2 + (6-n)/(4n);
//            q = (n-4)/(2n) + 2 c_chi,  B = (q > 0 ? W : Z) q  (B <= 1),
//   n >= 7:  requires 2 c_chi + c_chi^2 + c_r_up <= (n-6)/(2n);
//            B = Z ((n-4)/(2n) - 2 c_chi)  (B >= 1).
// Values are always computed; hypothesis_ok records whether the branch
// smallness condition actually holds.
struct DiscriminantData {
    int n = 2;
    double c_r = 0.0, c_chi = 0.0, c_r_gap = 0.0; // c_r_up = c_r + gap
    int branch = 1;
    bool hypothesis_ok = true;
    std::string violated; // failed inequality, empty when ok
    double w_upper = 0.0, z_lower = 0.0;
    double b_coef = 0.0;
    double a0 = 0.0; // A_delta at delta = 0
    double script_d = 0.0;
};

DiscriminantData discriminant(int n, double c_r, double c_chi,
                              double c_r_gap);

// Closed form of script_d for c_chi = 0 and c_r_up = c_r:
//   (n/(1+n c_r))^2 ((n-2)(n-10)/(4 n^2) + ((n+6)/n) c_r + c_r^2).
double discriminant_closed_form(int n, double c_r);

// W (e^{pi / sqrt(-script_d)} - 1); +infinity when script_d >= 0 (no
// oscillation, so no intrinsic height restriction).
double height_bound(const DiscriminantData& data);

// Solution mu of the comparison equation used as the barrier test function.
//   power:       mu = (s+W)^{(1 - B + sqrt(D_delta))/2}        (D_delta >= 0)
//   oscillatory: mu = (s+W)^{(1-B)/2} trig(freq log(s/W + 1) + eta)
//                with trig = sin on branch 1 (mu' > 0) and cos on branch 2
//                (mu' < 0), valid while the phase stays short of pi/2:
//                s < W (e^{(pi - 2 eta)/sqrt(-D_delta)} - 1)
//   unit:        mu = 1 (used when the pointwise bound on Phi is negative)
struct TestFunction {
    enum class Kind { power, oscillatory, unit };
    Kind kind = Kind::unit;
    int branch = 1;
    double w_upper = 0.0, b_coef = 0.0;
    double delta = 0.0, eta = 0.0;
    double a_delta = 0.0, d_delta = 0.0;
    double exponent = 0.0; // power exponent, or (1-B)/2 in the trig case
    double freq = 0.0;     // sqrt(-D_delta)/2
    double window_end = 0.0; // +infinity for power / unit

    double mu(double s) const;
    double mu_p(double s) const;
    double mu_pp(double s) const;
    // Euler-Cauchy residual A_delta/(s+W)^2 mu + B/(s+W) mu' + mu''
    double ode_residual(double s) const;
};

// Builds mu for the given coefficients; fails with ErrorKind::interval
// (message carries the computed window) if [0, s_end] does not fit.
TestFunction build_test_function(const DiscriminantData& data, double delta,
                                 double eta, double s_end);

struct MuSample {
    double s = 0, mu = 0, mu_p = 0, mu_pp = 0, residual = 0;
};

std::vector<MuSample> sample_test_function(const TestFunction& tf,
                                           double s_end, int n_samples);

struct CertificateOptions {
    double delta = -1.0; // <= 0: largest 2^-k whose window covers the
                         // interval with 10% slack
    double eta = -1.0;   // <= 0: min(pi/8, half the remaining window angle)
};

// Full barrier certificate over the region [0, s_hi]: curvature constants,
// discriminant, the chosen test function on [0, interval_end], and the
// height bound.  If the pointwise upper bound for Phi is negative on the
// whole region the unit test function suffices and no branch hypothesis is
// needed; otherwise a violated hypothesis raises ErrorKind::hypothesis.
struct BarrierCertificate {
    ConeConstants constants;
    DiscriminantData disc;
    double phi_sup = 0.0; // sup of the pointwise Phi bound over the region
    bool phi_negative = false;
    double interval_end = 0.0;
    double delta = 0.0, eta = 0.0;
    TestFunction mu;
    double bound_height = 0.0; // height_bound(disc)
};

BarrierCertificate build_certificate(const NullConeModel& model, double s_hi,
                                     double interval_end,
                                     const CertificateOptions& opts = {});

// Pointwise bounds used by the certificate and the monitor.  The cross terms
// tfchibar(grad omega, grad omega)/u are bounded through Cauchy-Schwarz,
// |tfchibar_ij w^i w^j| <= |tfchibar| |grad omega|^2 = 2 u |tfchibar|:
//   Phi <= theta_bar^2/n^2 - ricci_LL/2 + (3/2)|tfchibar|^2
//          + (|4-n|/(2n)) theta_bar |tfchibar|,
//   Psi <= ((n-4)/(2n)) theta_bar + 2 |tfchibar|   (branch 1, mu' >= 0),
//   Psi >= ((n-4)/(2n)) theta_bar - 2 |tfchibar|   (branch 2, mu' <= 0).
double phi_upper_bound(const NullConeModel& model, double s, int j);
double psi_adverse_bound(const NullConeModel& model, double s, int j,
                         int branch);

// Checks  Phi mu + Psi mu' + mu'' < 0  with the adverse pointwise bounds on
// every recorded snapshot of a flow run.  reference_margin is the exact
// vacuum margin delta * mu / (s+W)^2 minimized over the same points.
struct KeyInequalityReport {
    bool ok = true;
    double min_margin = 0.0;
    double min_reference = 0.0;
    double min_ratio = 0.0; // min of margin / reference where reference > 0
    long points_checked = 0;
};

KeyInequalityReport key_inequality_monitor(const NullConeModel& model,
                                           const FlowRun& run,
                                           const BarrierCertificate& cert);

} // namespace ncflow
