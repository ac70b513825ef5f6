#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncflow/flow.hpp"
#include "ncflow/stability.hpp"

namespace ncflow {

// Sweep of leaves with constant squared mean curvature vector lambda,
// starting from a marginally trapped initial surface (hvec2 = 0) and
// climbing lambda adaptively.  Each step lifts the previous leaf along its
// positive principal eigenfunction until the lifted surface dominates the
// next target, then flows back down to stationarity, so every leaf is
// approached from above.
enum class FoliationTermination {
    reached_lambda_max,
    left_compact_region,
    curvature_blowup_proxy,
    instability_detected,
};

const char* to_string(FoliationTermination t);

struct FoliationOptions {
    double lambda_max = 0.03;
    double dlambda0 = 1.0 / 540.0;
    double dlambda_min = 1e-13;
    double dlambda_cap = -1.0;        // <= 0: same as dlambda0
    double stability_threshold = 1e-7;
    double instability_factor = 10.0; // stop when ev < factor * threshold
    double marginal_factor = 100.0;   // halve step when ev < factor * threshold
    long fast_steps = 800;            // double step when a leaf takes fewer
    double curvature_cap = 1e4;
    double mots_tol = 1e-7;           // sup |hvec2| allowed on the seed
    bool keep_profiles = true;        // store omega per leaf
    int max_leaves = 100000;
    FlowOptions flow;
};

struct LeafRecord {
    double lambda = 0.0;
    double eigenvalue = 0.0;
    double min_omega = 0.0, max_omega = 0.0;
    double max_u = 0.0;
    long flow_steps = 0;
    double t_flow = 0.0;
    std::vector<double> omega; // empty unless keep_profiles
};

struct FoliationResult {
    FoliationTermination termination = FoliationTermination::reached_lambda_max;
    std::string detail;
    double sigma_estimate = 0.0; // lambda of the last accepted leaf
    std::vector<LeafRecord> leaves;
    long lifts_failed = 0;
};

FoliationResult foliate(const NullConeModel& model,
                        const std::vector<double>& mots_omega,
                        const FoliationOptions& opts);

// Convenience seed: the constant slice omega = s0.
FoliationResult foliate_from_slice(const NullConeModel& model, double s0,
                                   const FoliationOptions& opts);

// Strict leaf ordering: min over cells of omega_{k+1} - omega_k for every
// consecutive pair must stay positive.
struct MonotonicityReport {
    bool ok = true;
    double min_gap = 0.0;
    int at_pair = -1; // index k of the worst pair (k, k+1)
};

MonotonicityReport monotonicity_check(const FoliationResult& result);

// Re-solves one leaf from randomized positive perturbations (each lifted
// surface still dominates lambda, so the approach stays one-sided) and
// reports the largest sup-norm deviation of the recovered leaves from the
// reference profile.
struct RestartReport {
    bool ok = true;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    int restarts = 0;
};

RestartReport uniqueness_restart(const NullConeModel& model, double lambda,
                                 const std::vector<double>& omega_ref,
                                 const FlowOptions& flow, int n_restarts,
                                 double tolerance, std::uint64_t seed);

// Weighted deviation monitor for a recorded run converging to omega_hat:
//   phitilde = u (omega - omega_hat) / mu(omega)^2,  mu(s) = 1 - amp^2 s^2,
// with amp = sqrt(c1 + c1^2 + 1) and c1 the sup of the pointwise curvature
// bounds (|Phi|, |Psi|) over the swept region.  mu stays above 3/4 on
// [0, 1/(2 amp)), the reported domain of validity.
struct OscillationReport {
    bool ok = true;
    bool domain_ok = true;
    double c1 = 0.0;
    double amp = 0.0;
    double domain_end = 0.0; // 1 / (2 amp)
    double initial = 0.0;
    double peak = 0.0;
    double final_value = 0.0;
};

OscillationReport small_oscillation_monitor(const NullConeModel& model,
                                            const FlowRun& run,
                                            const std::vector<double>& omega_hat);

} // namespace ncflow
