// Acceptance gate for the whole laboratory.  Each criterion prints exactly
// one PASS/FAIL line (plus indented evidence) and the exit code is the number
// of failures.  Every tolerance is pinned here on purpose: loosening one is a
// result change, not a cleanup.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ncflow/background.hpp"
#include "ncflow/barriers.hpp"
#include "ncflow/flow.hpp"
#include "ncflow/foliation.hpp"
#include "ncflow/graph.hpp"
#include "ncflow/stability.hpp"
#include "ncflow/validate.hpp"
#include "oracles.hpp"

using namespace ncflow;

namespace {

int g_failures = 0;
std::vector<std::string> g_detail;

void detail(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    g_detail.push_back(buf);
}

void criterion(int k, const char* what, bool pass) {
    std::printf("%s: criterion %d, %s\n", pass ? "PASS" : "FAIL", k, what);
    for (const auto& line : g_detail) std::printf("    %s\n", line.c_str());
    g_detail.clear();
    if (!pass) ++g_failures;
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

// Lower-branch comparison radius of the mass-1 black hole cone: the root of
// (1 - 2/r)/r^2 = lambda in [2, 3].
double comparison_radius(double lambda) {
    return oracle::bisect(
        [lambda](double r) { return (1.0 - 2.0 / r) / (r * r) - lambda; },
        2.0, 3.0);
}

// Independent re-evaluation of the certificate test function in long double,
// straight from the stored coefficients.  Double-precision second differences
// at h = 1e-4 bottom out near 1e-7, so the 1e-8 residual budget needs the
// extended type.
long double mu_oracle(const TestFunction& tf, long double s) {
    const long double w = tf.w_upper;
    switch (tf.kind) {
        case TestFunction::Kind::unit:
            return 1.0L;
        case TestFunction::Kind::power:
            return powl(s + w, static_cast<long double>(tf.exponent));
        case TestFunction::Kind::oscillatory: {
            const long double phase =
                static_cast<long double>(tf.freq) * log1pl(s / w) +
                static_cast<long double>(tf.eta);
            const long double amp =
                powl(s + w, static_cast<long double>(tf.exponent));
            return amp * (tf.branch == 1 ? sinl(phase) : cosl(phase));
        }
    }
    return 1.0L;
}

struct MuOracleReport {
    double sup_residual = 0.0; // FD residual of the comparison equation
    double sup_mu_gap = 0.0;   // library mu vs long double oracle
    bool signs_ok = true;      // mu > 0, branch-correct sign of mu'
};

MuOracleReport probe_test_function(const TestFunction& tf, double s_end,
                                   int n_samples) {
    MuOracleReport rep;
    const long double h = 1e-4L;
    const long double w = tf.w_upper;
    for (int i = 0; i <= n_samples; ++i) {
        const long double s = s_end * static_cast<long double>(i) / n_samples;
        const long double m0 = mu_oracle(tf, s);
        const long double mp =
            (mu_oracle(tf, s + h) - mu_oracle(tf, s - h)) / (2.0L * h);
        const long double mpp = (mu_oracle(tf, s + h) - 2.0L * m0 +
                                 mu_oracle(tf, s - h)) /
                                (h * h);
        const long double res =
            mpp + static_cast<long double>(tf.b_coef) * mp / (s + w) +
            static_cast<long double>(tf.a_delta) * m0 / ((s + w) * (s + w));
        rep.sup_residual =
            std::max(rep.sup_residual, static_cast<double>(fabsl(res)));
        const double sd = static_cast<double>(s);
        rep.sup_mu_gap = std::max(
            rep.sup_mu_gap,
            static_cast<double>(fabsl(tf.mu(sd) - m0)));
        if (!(tf.mu(sd) > 0.0)) rep.signs_ok = false;
        const double slope = tf.mu_p(sd);
        if (tf.kind == TestFunction::Kind::oscillatory ||
            tf.kind == TestFunction::Kind::power) {
            if (tf.branch == 1 && !(slope >= 0.0)) rep.signs_ok = false;
            if (tf.branch == 2 && !(slope <= 0.0)) rep.signs_ok = false;
        }
    }
    return rep;
}

} // namespace

int main() {
    auto schw = make_schwarzschild(1.0, 2.0, 2.0);

    // ------------------------------------------------------------------
    // 1. Stationary leaves land on the comparison radii.
    std::vector<RunResult> leaf_runs; // reused by the barrier monitor below
    std::vector<double> leaf_lambdas = {0.005, 0.01, 0.02, 0.03};
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        for (double lam : leaf_lambdas) {
            FlowOptions opts;
            opts.tol = 1e-8;
            auto res = run_to_stationary(schw, Prescription::stcmc(lam),
                                         {0.5}, opts);
            const double r = 2.0 + res.final_surface.min_omega;
            const double r_star = comparison_radius(lam);
            const double rel = std::fabs(r - r_star) / r_star;
            const bool line_ok =
                res.status == ExitStatus::converged && rel < 1e-6;
            detail("lambda %.3f: radius %.9f, root %.9f, rel err %.2e (%s)",
                   lam, r, r_star, rel, line_ok ? "ok" : "BAD");
            ok = ok && line_ok;
            leaf_runs.push_back(std::move(res));
        }
        const double elapsed = seconds_since(t0);
        detail("elapsed %.2f s (budget 5 s)", elapsed);
        ok = ok && elapsed < 5.0;
        criterion(1, "constant-curvature leaves match the comparison radii",
                  ok);
    }

    // ------------------------------------------------------------------
    // 2. The sweep climbs to the marginal leaf and stops there.
    {
        const auto t0 = std::chrono::steady_clock::now();
        FoliationOptions fopts;
        fopts.lambda_max = 0.05;
        auto sweep = foliate_from_slice(schw, 0.0, fopts);
        bool ok =
            sweep.termination == FoliationTermination::instability_detected;
        detail("termination %s, %zu leaves",
               to_string(sweep.termination), sweep.leaves.size());

        const double sigma_rel = std::fabs(sweep.sigma_estimate * 27.0 - 1.0);
        detail("sigma estimate %.9f vs 1/27 (rel err %.2e)",
               sweep.sigma_estimate, sigma_rel);
        ok = ok && sigma_rel <= 0.02;

        const double r_final = 2.0 + sweep.leaves.back().min_omega;
        detail("final leaf radius %.6f vs 3 (rel err %.2e)", r_final,
               std::fabs(r_final / 3.0 - 1.0));
        ok = ok && std::fabs(r_final / 3.0 - 1.0) <= 0.01;

        bool increasing = sweep.leaves.size() >= 3;
        for (size_t i = 0; i + 1 < sweep.leaves.size(); ++i)
            increasing = increasing &&
                         sweep.leaves[i].lambda < sweep.leaves[i + 1].lambda;
        auto mono = monotonicity_check(sweep);
        detail("lambda strictly increasing: %s, min profile gap %.3e",
               increasing ? "yes" : "NO", mono.min_gap);
        ok = ok && increasing && mono.ok;

        // Eigenvalue crossing: positive at the bottom, below the trigger at
        // the top, negative on the far branch of the same curvature value.
        const double ev_first = sweep.leaves.front().eigenvalue;
        const double ev_last = sweep.leaves.back().eigenvalue;
        auto far_slice = build_slice(schw, 1.4); // radius 3.4
        const double lam_far = schw.hvec2_slice(1.4, 0);
        auto far = analyze_stability(far_slice, lam_far, 1e-9);
        detail("eigenvalue: first %.3e, last %.3e, far branch %.3e",
               ev_first, ev_last, far.eigenvalue);
        ok = ok && ev_first > 1e-3 && ev_last < 1e-6 &&
             far.eigenvalue < 0.0;

        const double elapsed = seconds_since(t0);
        detail("elapsed %.2f s (budget 60 s)", elapsed);
        ok = ok && elapsed < 60.0;
        criterion(2, "sweep reaches the marginal leaf with the spectral "
                     "crossing", ok);
    }

    // ------------------------------------------------------------------
    // 3. Discriminant closed form.
    {
        bool ok = true;
        double worst = 0.0;
        for (int n = 2; n <= 12; ++n) {
            for (int ic = 0; ic <= 10; ++ic) {
                const double c = 0.1 * ic;
                const auto data = discriminant(n, c, 0.0, 0.0);
                const double gap =
                    std::fabs(data.script_d - discriminant_closed_form(n, c));
                worst = std::max(worst, gap);
            }
        }
        detail("worst |computed - closed form| = %.2e over n=2..12, "
               "c=0..1 (budget 1e-12)", worst);
        ok = ok && worst <= 1e-12;
        const double z2 = discriminant(2, 0.0, 0.0, 0.0).script_d;
        const double z10 = discriminant(10, 0.0, 0.0, 0.0).script_d;
        detail("exact zeros: n=2 gives %.1e, n=10 gives %.1e", z2, z10);
        ok = ok && z2 == 0.0 && z10 == 0.0;
        criterion(3, "discriminant matches its closed form", ok);
    }

    // ------------------------------------------------------------------
    // 4. Expansion sandwich on every built-in family.
    {
        bool ok = true;
        auto check = [&ok](const NullConeModel& m, const char* name,
                           bool exact) {
            const auto cc = cone_constants(m, 0.0, m.s_max);
            const auto rep = theta_bar_sandwich(m, cc, 1000, 1e-9);
            detail("%s: W %.6f Z %.6f, worst low %.2e high %.2e (%s)", name,
                   rep.w_upper, rep.z_lower, rep.worst_low, rep.worst_high,
                   rep.ok ? "ok" : "BAD");
            ok = ok && rep.ok;
            if (exact) {
                // vacuum shear-free cones attain both bounds
                ok = ok && rep.w_upper == rep.z_lower &&
                     rep.worst_low <= 1e-10 && rep.worst_high <= 1e-10;
            }
        };
        check(make_minkowski(2, 1.0, 2.0), "flat n=2", true);
        check(make_minkowski(3, 1.0, 2.0), "flat n=3", true);
        check(make_minkowski(7, 1.0, 2.0), "flat n=7", true);
        check(schw, "black hole", true);

        Perturbations pert;
        pert.shear = [](double s, double th) {
            return 0.06 * std::sin(th) * std::sin(th) / (1.0 + s);
        };
        pert.ricci_LL = [](double s, double) {
            const double tb = 2.0 / (2.0 + s);
            return 0.04 * tb * tb;
        };
        auto bumpy = make_perturbed_axisymmetric(
            make_schwarzschild(1.0, 2.0, 2.0, 32), pert);
        check(bumpy, "perturbed", false);
        criterion(4, "expansion sandwich holds on all model families", ok);
    }

    // ------------------------------------------------------------------
    // 5. Discrete evolution identities converge at the designed orders.
    {
        bool ok = true;
        auto family_for = [](const NullConeModel& m) {
            SyntheticFamily fam;
            fam.omega0.resize(m.grid.n_cells);
            fam.speed.resize(m.grid.n_cells);
            for (int j = 0; j < m.grid.n_cells; ++j) {
                const double sn = std::sin(m.grid.theta[j]);
                fam.omega0[j] = 0.5 + 0.1 * sn * sn;
                fam.speed[j] = 0.8 + 0.2 * std::cos(m.grid.theta[j]);
            }
            return fam;
        };
        auto require_order = [&ok](const char* name,
                                   const ResidualReport& rep, double floor) {
            detail("%s: order %.3f (floor %.2f)", name, rep.measured_order,
                   floor);
            ok = ok && rep.measured_order >= floor;
        };

        Perturbations pa;
        pa.shear = [](double s, double th) {
            return 0.06 * std::sin(th) * std::sin(th) / (1.0 + s);
        };
        Perturbations pb;
        pb.shear = [](double s, double th) {
            return 0.05 * std::sin(th) * std::sin(th) / (1.0 + 0.5 * s);
        };
        pb.ricci_LL = [](double s, double th) {
            const double tb = 2.0 / (2.0 + s);
            return 0.04 * (1.0 + 0.3 * std::cos(th)) * tb * tb;
        };
        auto mod_a = make_perturbed_axisymmetric(
            make_schwarzschild(1.0, 2.0, 2.0, 32), pa);
        auto mod_b = make_perturbed_axisymmetric(
            make_schwarzschild(1.0, 2.0, 2.0, 32), pb);
        auto schw24 = make_schwarzschild(1.0, 2.0, 2.0, 24);

        const auto fam_a = family_for(mod_a);
        const auto fam_b = family_for(mod_b);
        require_order("metric (model A)",
                      check_metric_evolution(mod_a, fam_a, 0.1, 0.02, 4),
                      1.9);
        require_order("metric (model B)",
                      check_metric_evolution(mod_b, fam_b, 0.1, 0.02, 4),
                      1.9);
        require_order("gradient energy (model A)",
                      check_u_evolution(mod_a, fam_a, 0.1, 0.02, 4), 1.9);
        require_order("gradient energy (model B)",
                      check_u_evolution(mod_b, fam_b, 0.1, 0.02, 4), 1.9);
        require_order("curvature (black hole)",
                      check_H_evolution(schw24, 0.5, family_for(schw24).speed,
                                        0.02, 4),
                      1.9);
        require_order("curvature (model A)",
                      check_H_evolution(mod_a, 0.5, fam_a.speed, 0.02, 4),
                      1.9);
        require_order("generator expansion (black hole)",
                      check_raychaudhuri(schw24, 0.02, 4), 1.9);
        require_order("generator expansion (flat n=3)",
                      check_raychaudhuri(make_minkowski(3, 1.0, 2.0), 0.02,
                                         4),
                      1.9);

        FlowOptions base;
        base.tol = 1e-12;
        auto speed = check_speed_evolution(schw, Prescription::stcmc(0.01),
                                           {0.5}, 0.1, 0.002, 4, base);
        detail("speed step order %.3f (floor 0.9)", speed.measured_order);
        ok = ok && speed.measured_order >= 0.9;
        criterion(5, "evolution identities converge at second order, "
                     "the time step at first", ok);
    }

    // ------------------------------------------------------------------
    // 6. Randomized admissible runs keep the speed sign and the ordering.
    {
        std::mt19937_64 rng(20260825ULL);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        bool ok = true;
        double worst_speed = -1e300;
        double worst_gap = 1e300;
        const double tol = 1e-8;
        for (int pair = 0; pair < 25; ++pair) {
            const double lam_lo = 0.002 + 0.022 * unit(rng);
            const double lam_hi = lam_lo + 0.002 + 0.006 * unit(rng);
            const double floor_omega = comparison_radius(lam_hi) - 2.0;
            const double w0 =
                floor_omega + 0.02 + (0.9 - floor_omega - 0.02) * unit(rng);

            FlowOptions opts;
            opts.tol = tol;
            opts.adaptive_dt = false;
            opts.dt_max = 0.01;
            opts.max_time = 30.0;
            auto lo = run_to_stationary(schw, Prescription::stcmc(lam_lo),
                                        {w0}, opts);
            auto hi = run_to_stationary(schw, Prescription::stcmc(lam_hi),
                                        {w0}, opts);

            const auto sign_lo = speed_sign_monitor(lo.run, tol);
            const auto sign_hi = speed_sign_monitor(hi.run, tol);
            worst_speed = std::max({worst_speed, sign_lo.worst,
                                    sign_hi.worst});
            ok = ok && sign_lo.ok && sign_hi.ok;

            const auto cmp = comparison_check(lo.run, hi.run, 1e-12);
            worst_gap = std::min(worst_gap, cmp.min_gap);
            ok = ok && cmp.ok;
        }
        detail("50 runs: max recorded speed %.3e (allowed %.0e), "
               "min ordering gap %.3e", worst_speed, 10 * tol, worst_gap);
        criterion(6, "randomized runs stay one-signed and ordered", ok);
    }

    // ------------------------------------------------------------------
    // 7. Interior leaves are recovered from random restarts.
    {
        FoliationOptions fopts;
        fopts.lambda_max = 0.03;
        auto sweep = foliate_from_slice(schw, 0.0, fopts);
        bool ok =
            sweep.termination == FoliationTermination::reached_lambda_max;
        int tested = 0;
        double worst = 0.0;
        for (size_t k = 1; k + 1 < sweep.leaves.size(); ++k) {
            const auto& leaf = sweep.leaves[k];
            if (leaf.lambda <= 0.0) continue;
            auto rep = uniqueness_restart(schw, leaf.lambda, leaf.omega,
                                          fopts.flow, 3, 1e-6,
                                          7000 + static_cast<uint64_t>(k));
            ok = ok && rep.ok;
            worst = std::max(worst, rep.max_deviation);
            ++tested;
        }
        detail("%d interior leaves, 3 restarts each, worst deviation %.3e "
               "(tolerance 1e-6)", tested, worst);
        ok = ok && tested >= 5;
        criterion(7, "foliation leaves are unique under restart", ok);
    }

    // ------------------------------------------------------------------
    // 8. Barrier certificates: test function against an independent finite
    //    difference oracle, and the key inequality along the actual runs.
    {
        bool ok = true;
        for (int n : {2, 3, 7}) {
            auto mink = make_minkowski(n, 1.0, 2.0);
            auto cert = build_certificate(mink, 1.0, 1.0);
            auto probe = probe_test_function(cert.mu, 1.0, 200);
            detail("flat n=%d: FD residual %.2e (budget 1e-8), mu gap %.1e, "
                   "signs %s", n, probe.sup_residual, probe.sup_mu_gap,
                   probe.signs_ok ? "ok" : "BAD");
            ok = ok && probe.sup_residual < 1e-8 && probe.sup_mu_gap < 1e-12 &&
                 probe.signs_ok;
            if (n == 3) {
                const double expected = 3.0 * std::expm1(M_PI /
                                                         std::sqrt(1.75));
                detail("flat n=3 height bound %.9f vs %.9f",
                       cert.bound_height, expected);
                ok = ok && std::fabs(cert.bound_height - expected) <= 1e-6;
            }

            // prescribed-curvature run on the same cone, watched by the
            // monitor; the profile is stationary at height 1/2
            auto profile = [n](double s) {
                const double r = 1.0 + s / n;
                return n * n / (r * r);
            };
            auto profile_ds = [n](double s) {
                const double r = 1.0 + s / n;
                return -2.0 * n / (r * r * r);
            };
            auto presc = Prescription::prescribed(
                [profile](double s, int) {
                    return profile(s) * (1.2 - 0.4 * s);
                },
                [profile, profile_ds](double s, int) {
                    return profile_ds(s) * (1.2 - 0.4 * s) -
                           0.4 * profile(s);
                });
            FlowOptions opts;
            opts.tol = 1e-8;
            auto res = run_to_stationary(mink, presc, {0.8}, opts);
            const bool landed = res.status == ExitStatus::converged &&
                                std::fabs(res.final_surface.min_omega - 0.5) <
                                    1e-5;
            auto mon = key_inequality_monitor(mink, res.run, cert);
            detail("flat n=%d run: stationary at %.7f, margin %.3e, "
                   "ratio %.12f over %ld points", n,
                   res.final_surface.min_omega, mon.min_margin,
                   mon.min_ratio, mon.points_checked);
            ok = ok && landed && mon.ok && mon.min_margin > 0.0 &&
                 mon.min_ratio >= 0.99;
        }

        // the criterion-1 runs, re-watched under the black hole certificate
        auto cert_schw = build_certificate(schw, 1.0, 1.0);
        for (size_t i = 0; i < leaf_runs.size(); ++i) {
            auto mon = key_inequality_monitor(schw, leaf_runs[i].run,
                                              cert_schw);
            detail("black hole lambda %.3f: margin %.3e, ratio %.12f",
                   leaf_lambdas[i], mon.min_margin, mon.min_ratio);
            ok = ok && mon.ok && mon.min_margin > 0.0 &&
                 mon.min_ratio >= 0.99;
        }
        criterion(8, "certificate test functions verify against the FD "
                     "oracle and the key inequality holds on runs", ok);
    }

    // ------------------------------------------------------------------
    // 9. Stability coefficient vs the slice family derivative.
    {
        const double flat = slice_identity_residual(
            make_minkowski(3, 1.0, 2.0), 1.8, 64);
        const double hole = slice_identity_residual(schw, 1.8, 64);
        detail("sup residual: flat n=3 %.2e, black hole %.2e (budget 1e-6)",
               flat, hole);
        criterion(9, "slice identity ties stability to the leaf family",
                  flat < 1e-6 && hole < 1e-6);
    }

    if (g_failures == 0)
        std::printf("all 9 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
