#include "ncflow/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ncflow/barriers.hpp"
#include "ncflow/errors.hpp"

namespace ncflow {

namespace {

struct LiftOutcome {
    bool ok = false;
    bool ceiling = false; // the gap was still closing at the domain top
    std::vector<double> omega;
};

double min_hvec2_at(const NullConeModel& model,
                    const std::vector<double>& base,
                    const std::vector<double>& dir, double xi,
                    bool* valid, std::vector<double>* out) {
    std::vector<double> omega(base.size());
    const double top = model.s_max * (1.0 - 1e-12);
    for (std::size_t j = 0; j < base.size(); ++j) {
        omega[j] = base[j] + xi * dir[j];
        if (!(omega[j] >= 0.0 && omega[j] <= top)) {
            *valid = false;
            return 0.0;
        }
    }
    try {
        GraphSurface s = build_surface(model, omega);
        *valid = true;
        if (out) *out = std::move(omega);
        return s.min_hvec2;
    } catch (const Error&) {
        *valid = false;
        return 0.0;
    }
}

// Smallest scaling xi of the (positive, sup-normalized) direction for which
// the lifted surface dominates the target, located by doubling plus
// bisection.  ceiling is set when the largest admissible lift still falls
// short but was improving, which means the target is simply not attained
// inside the cone.
LiftOutcome lift_above(const NullConeModel& model,
                       const std::vector<double>& base,
                       const std::vector<double>& dir, double target) {
    LiftOutcome res;
    double max_base = 0.0;
    for (double v : base) max_base = std::max(max_base, v);
    const double headroom = model.s_max * (1.0 - 1e-12) - max_base;
    if (headroom <= 0.0) return res;

    auto gap = [&](double xi, bool* valid, std::vector<double>* out) {
        return min_hvec2_at(model, base, dir, xi, valid, out) - target;
    };

    bool valid = false;
    double hi = -1.0;
    for (double xi = std::max(1e-12, headroom * 0x1p-40); xi <= headroom;
         xi *= 2.0) {
        if (gap(xi, &valid, nullptr) >= 0.0 && valid) {
            hi = xi;
            break;
        }
    }
    if (hi < 0.0) {
        // try the full headroom, and classify the failure
        const double g_top = gap(headroom, &valid, nullptr);
        if (valid && g_top >= 0.0) {
            hi = headroom;
        } else {
            bool v2 = false;
            const double g_half = gap(0.5 * headroom, &v2, nullptr);
            res.ceiling = valid && v2 && g_top > g_half;
            return res;
        }
    }

    double lo = hi > 2e-12 ? 0.5 * hi : 0.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid, &valid, nullptr) >= 0.0 && valid)
            hi = mid;
        else
            lo = mid;
    }
    const double g = gap(hi, &valid, &res.omega);
    require(valid && g >= 0.0, ErrorKind::solver,
            "lift_above: bisection lost the admissible endpoint");
    res.ok = true;
    return res;
}

LeafRecord make_record(double lambda, const StabilityReport& stab,
                       const GraphSurface& surface, long steps, double t_flow,
                       bool keep) {
    LeafRecord rec;
    rec.lambda = lambda;
    rec.eigenvalue = stab.eigenvalue;
    rec.min_omega = surface.min_omega;
    rec.max_omega = surface.max_omega;
    rec.max_u = surface.max_u;
    rec.flow_steps = steps;
    rec.t_flow = t_flow;
    if (keep) rec.omega = surface.omega;
    return rec;
}

} // namespace

const char* to_string(FoliationTermination t) {
    switch (t) {
    case FoliationTermination::reached_lambda_max: return "reached_lambda_max";
    case FoliationTermination::left_compact_region:
        return "left_compact_region";
    case FoliationTermination::curvature_blowup_proxy:
        return "curvature_blowup_proxy";
    case FoliationTermination::instability_detected:
        return "instability_detected";
    }
    return "unknown";
}

FoliationResult foliate(const NullConeModel& model,
                        const std::vector<double>& mots_omega,
                        const FoliationOptions& opts) {
    require(opts.lambda_max > 0.0 && opts.dlambda0 > 0.0 &&
                opts.dlambda_min > 0.0 && opts.stability_threshold > 0.0,
            ErrorKind::parameter, "foliate: nonpositive sweep parameter");

    FlowOptions flow = opts.flow;
    flow.record_stride = 0; // leaves keep profiles, not whole trajectories
    const double stcmc_tol = 10.0 * flow.tol;

    GraphSurface seed = build_surface(model, mots_omega);
    const double seed_h = std::max(std::abs(seed.min_hvec2),
                                   std::abs(seed.max_hvec2));
    if (seed_h > opts.mots_tol) {
        std::ostringstream msg;
        msg << "foliate: seed surface is not marginally trapped, sup |hvec2| = "
            << seed_h;
        fail(ErrorKind::precondition, msg.str());
    }

    FoliationResult res;
    StabilityReport stab = analyze_stability(
        seed, 0.0, std::max(opts.mots_tol, stcmc_tol), opts.stability_threshold);
    res.leaves.push_back(
        make_record(0.0, stab, seed, 0, 0.0, opts.keep_profiles));
    res.sigma_estimate = 0.0;

    std::vector<double> omega = mots_omega;
    std::vector<double> eigfun = stab.eigenfunction;
    double lambda = 0.0;
    double dlam = opts.dlambda0;
    const double cap = opts.dlambda_cap > 0.0 ? opts.dlambda_cap : opts.dlambda0;
    const double stop_ev = opts.instability_factor * opts.stability_threshold;
    const double marginal_ev = opts.marginal_factor * opts.stability_threshold;

    if (stab.eigenvalue < stop_ev) {
        res.termination = FoliationTermination::instability_detected;
        res.detail = "seed surface already sits at the stability margin";
        return res;
    }

    auto halve_or_stop = [&](const char* why) {
        if (dlam <= opts.dlambda_min * (1.0 + 1e-9)) {
            res.termination = FoliationTermination::instability_detected;
            std::ostringstream msg;
            msg << "lambda step floor " << opts.dlambda_min << " reached ("
                << why << ") at lambda = " << lambda;
            res.detail = msg.str();
            return true;
        }
        dlam = std::max(0.5 * dlam, opts.dlambda_min);
        return false;
    };

    while (true) {
        if (static_cast<int>(res.leaves.size()) >= opts.max_leaves)
            fail(ErrorKind::solver, "foliate: leaf budget exhausted");

        const double lambda_next = std::min(lambda + dlam, opts.lambda_max);
        LiftOutcome lift = lift_above(model, omega, eigfun, lambda_next);
        if (!lift.ok) {
            ++res.lifts_failed;
            if (lift.ceiling) {
                res.termination = FoliationTermination::left_compact_region;
                std::ostringstream msg;
                msg << "target lambda = " << lambda_next
                    << " is not attained below the top of the cone";
                res.detail = msg.str();
                return res;
            }
            if (halve_or_stop("lift failure")) return res;
            continue;
        }

        RunResult rr = run_to_stationary(model, Prescription::stcmc(lambda_next),
                                         lift.omega, flow);
        if (rr.status == ExitStatus::domain_exit) {
            res.termination = FoliationTermination::left_compact_region;
            std::ostringstream msg;
            msg << "flow exited the cone domain (direction "
                << rr.run.exit_direction << ") at t = " << rr.t_final;
            res.detail = msg.str();
            return res;
        }
        if (rr.status != ExitStatus::converged) {
            if (halve_or_stop(to_string(rr.status))) return res;
            continue;
        }

        stab = analyze_stability(rr.final_surface, lambda_next, stcmc_tol,
                                 opts.stability_threshold);
        res.leaves.push_back(make_record(lambda_next, stab, rr.final_surface,
                                         rr.run.steps, rr.t_final,
                                         opts.keep_profiles));
        omega = rr.final_surface.omega;
        eigfun = stab.eigenfunction;
        lambda = lambda_next;
        res.sigma_estimate = lambda;

        CurvatureProxy proxy = curvature_proxy(rr.final_surface);
        if (proxy.value > opts.curvature_cap || proxy.steep) {
            res.termination = FoliationTermination::curvature_blowup_proxy;
            std::ostringstream msg;
            msg << "curvature proxy " << proxy.value << " (steep = "
                << proxy.steep << ") at lambda = " << lambda;
            res.detail = msg.str();
            return res;
        }
        if (stab.eigenvalue < stop_ev) {
            res.termination = FoliationTermination::instability_detected;
            std::ostringstream msg;
            msg << "leaf eigenvalue " << stab.eigenvalue
                << " fell below the instability trigger " << stop_ev;
            res.detail = msg.str();
            return res;
        }
        if (lambda >= opts.lambda_max) {
            res.termination = FoliationTermination::reached_lambda_max;
            std::ostringstream msg;
            msg << "swept to lambda_max = " << opts.lambda_max;
            res.detail = msg.str();
            return res;
        }
        if (stab.eigenvalue < marginal_ev) {
            if (halve_or_stop("marginal leaf")) return res;
        } else if (rr.run.steps <= opts.fast_steps) {
            dlam = std::min(2.0 * dlam, cap);
        }
    }
}

FoliationResult foliate_from_slice(const NullConeModel& model, double s0,
                                   const FoliationOptions& opts) {
    return foliate(model,
                   std::vector<double>(model.grid.n_cells, s0), opts);
}

MonotonicityReport monotonicity_check(const FoliationResult& result) {
    MonotonicityReport rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    require(result.leaves.size() >= 2, ErrorKind::parameter,
            "monotonicity_check: need at least two leaves");
    for (std::size_t k = 0; k + 1 < result.leaves.size(); ++k) {
        const auto& a = result.leaves[k].omega;
        const auto& b = result.leaves[k + 1].omega;
        require(!a.empty() && a.size() == b.size(), ErrorKind::parameter,
                "monotonicity_check: leaf profiles were not recorded");
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double gap = b[j] - a[j];
            if (gap < rep.min_gap) {
                rep.min_gap = gap;
                rep.at_pair = static_cast<int>(k);
            }
        }
    }
    rep.ok = rep.min_gap > 0.0;
    return rep;
}

RestartReport uniqueness_restart(const NullConeModel& model, double lambda,
                                 const std::vector<double>& omega_ref,
                                 const FlowOptions& flow, int n_restarts,
                                 double tolerance, std::uint64_t seed) {
    require(n_restarts >= 1, ErrorKind::parameter,
            "uniqueness_restart: need at least one restart");
    FlowOptions f = flow;
    f.record_stride = 0;

    RestartReport rep;
    rep.tolerance = tolerance;
    rep.restarts = n_restarts;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.5, 1.0);
    double max_ref = 0.0;
    for (double v : omega_ref) max_ref = std::max(max_ref, v);
    const double headroom = model.s_max * (1.0 - 1e-12) - max_ref;
    require(headroom > 0.0, ErrorKind::precondition,
            "uniqueness_restart: no room above the reference leaf");

    for (int i = 0; i < n_restarts; ++i) {
        std::vector<double> dir(omega_ref.size());
        double sup = 0.0;
        for (double& d : dir) {
            d = unif(rng);
            sup = std::max(sup, d);
        }
        for (double& d : dir) d /= sup;

        // sizeable one-sided perturbation, halved until it dominates lambda
        double xi = std::min(0.05 * model.s_max, 0.5 * headroom);
        std::vector<double> start;
        bool found = false;
        for (int k = 0; k < 60 && !found; ++k, xi *= 0.5) {
            bool valid = false;
            std::vector<double> cand;
            const double h =
                min_hvec2_at(model, omega_ref, dir, xi, &valid, &cand);
            if (valid && h >= lambda) {
                start = std::move(cand);
                found = true;
            }
        }
        require(found, ErrorKind::precondition,
                "uniqueness_restart: no admissible positive perturbation");

        RunResult rr =
            run_to_stationary(model, Prescription::stcmc(lambda), start, f);
        require(rr.status == ExitStatus::converged, ErrorKind::solver,
                "uniqueness_restart: restarted flow did not converge");
        for (std::size_t j = 0; j < omega_ref.size(); ++j)
            rep.max_deviation =
                std::max(rep.max_deviation,
                         std::abs(rr.final_surface.omega[j] - omega_ref[j]));
    }
    rep.ok = rep.max_deviation <= tolerance;
    return rep;
}

OscillationReport small_oscillation_monitor(
    const NullConeModel& model, const FlowRun& run,
    const std::vector<double>& omega_hat) {
    require(!run.snapshots.empty(), ErrorKind::parameter,
            "small_oscillation_monitor: run carries no snapshots");
    require(omega_hat.size() == run.snapshots.front().size(),
            ErrorKind::parameter,
            "small_oscillation_monitor: profile size mismatch");

    double s_hi = 0.0;
    for (const auto& snap : run.snapshots)
        for (double v : snap) s_hi = std::max(s_hi, v);
    for (double v : omega_hat) s_hi = std::max(s_hi, v);

    OscillationReport rep;
    const int samples = 512;
    for (int i = 0; i <= samples; ++i) {
        const double s = s_hi * static_cast<double>(i) / samples;
        for (int j = 0; j < model.grid.n_cells; ++j) {
            rep.c1 = std::max(rep.c1, std::abs(phi_upper_bound(model, s, j)));
            rep.c1 = std::max(rep.c1,
                              std::abs(psi_adverse_bound(model, s, j, 1)));
            rep.c1 = std::max(rep.c1,
                              std::abs(psi_adverse_bound(model, s, j, 2)));
        }
    }
    rep.amp = std::sqrt(rep.c1 + rep.c1 * rep.c1 + 1.0);
    rep.domain_end = 0.5 / rep.amp;
    rep.domain_ok = s_hi < rep.domain_end;

    bool first = true;
    for (const auto& snap : run.snapshots) {
        GraphSurface surf = build_surface(model, snap);
        double val = 0.0;
        for (std::size_t j = 0; j < snap.size(); ++j) {
            const double mu = 1.0 - rep.amp * rep.amp * snap[j] * snap[j];
            val = std::max(val, std::abs(surf.u[j] * (snap[j] - omega_hat[j])) /
                                    (mu * mu));
        }
        if (first) {
            rep.initial = val;
            first = false;
        }
        rep.peak = std::max(rep.peak, val);
        rep.final_value = val;
    }
    rep.ok = rep.domain_ok && rep.final_value <= rep.initial + 1e-15;
    return rep;
}

} // namespace ncflow
