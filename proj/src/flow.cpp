#include "ncflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncflow {

Prescription Prescription::stcmc(double lambda) {
    Prescription p;
    p.kind = Kind::stcmc;
    p.lambda = lambda;
    return p;
}

Prescription Prescription::prescribed(ConeField rho, ConeField rho_ds) {
    require(bool(rho), ErrorKind::parameter,
            "Prescription::prescribed: rho is empty");
    Prescription p;
    p.kind = Kind::prescribed;
    p.rho = std::move(rho);
    p.rho_ds = std::move(rho_ds);
    return p;
}

std::string Prescription::label() const {
    if (kind == Kind::stcmc) return "stcmc(" + std::to_string(lambda) + ")";
    return "prescribed";
}

std::vector<double> speed_field(const Prescription& presc,
                                const GraphSurface& surface) {
    std::vector<double> f(surface.cells());
    for (int j = 0; j < surface.cells(); ++j)
        f[j] = (presc.target(surface.omega[j], j) - surface.hvec2[j]) /
               (2.0 * surface.theta_bar_on[j]);
    return f;
}

namespace {

void thomas_solve(std::vector<double>& low, std::vector<double>& diag,
                  std::vector<double>& up, std::vector<double>& rhs) {
    const int n = int(diag.size());
    for (int i = 1; i < n; ++i) {
        double w = low[i] / diag[i - 1];
        diag[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
        rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / diag[i];
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

StepResult flow_step(const Prescription& presc, const GraphSurface& current,
                     double dt) {
    require(dt > 0.0, ErrorKind::parameter, "flow_step: dt must be > 0");
    const NullConeModel& model = *current.model;
    const PolarGrid& grid = model.grid;
    const int n = current.cells();

    // explicit source: beta - theta + 2 zeta(grad omega) - u theta_bar
    std::vector<double> rhs(n), low(n, 0.0), up(n, 0.0), diag(n, 1.0);
    for (int j = 0; j < n; ++j) {
        double w = current.omega[j];
        double beta = presc.target(w, j) / (2.0 * current.theta_bar_on[j]);
        double a2 = current.a_on[j] * current.a_on[j];
        double src = beta - current.theta_on[j] +
                     2.0 * current.zeta_on[j] * current.omega_p[j] / a2 -
                     current.u[j] * current.theta_bar_on[j];
        rhs[j] = w + dt * src;
    }
    if (n > 1) {
        const double h2 = grid.h * grid.h;
        for (int j = 0; j < n; ++j) {
            double cl = j > 0 ? 0.5 * (current.flux_coef[j - 1] +
                                       current.flux_coef[j])
                              : 0.0;
            double cr = j + 1 < n ? 0.5 * (current.flux_coef[j] +
                                           current.flux_coef[j + 1])
                                  : 0.0;
            double scale = dt / (h2 * current.sqrtg[j]);
            low[j] = -scale * cl;
            up[j] = -scale * cr;
            diag[j] = 1.0 + scale * (cl + cr);
        }
    }
    thomas_solve(low, diag, up, rhs);

    StepResult out;
    for (double w : rhs) {
        if (!std::isfinite(w)) {
            out.outcome = StepResult::Outcome::nonfinite;
            return out;
        }
        if (w < 0.0) {
            out.outcome = StepResult::Outcome::domain_exit_low;
            return out;
        }
        if (w >= model.s_max) {
            out.outcome = StepResult::Outcome::domain_exit_high;
            return out;
        }
    }
    out.surface = build_surface(model, rhs);
    out.outcome = StepResult::Outcome::ok;
    return out;
}

namespace {

// A sub-solution slice below the initial surface: hvec2 <= target on the
// whole slice.  Scanned on a fixed sample of heights including both ends.
bool subsolution_slice_exists(const NullConeModel& model,
                              const Prescription& presc, double below,
                              double slack) {
    const int samples = 257;
    for (int i = 0; i < samples; ++i) {
        double s = below * i / (samples - 1);
        bool ok = true;
        for (int j = 0; j < model.grid.n_cells && ok; ++j)
            ok = model.hvec2_slice(s, j) <= presc.target(s, j) + slack;
        if (ok) return true;
    }
    return false;
}

} // namespace

RunResult run_to_stationary(const NullConeModel& model,
                            const Prescription& presc,
                            const std::vector<double>& omega0,
                            const FlowOptions& opts) {
    require(opts.tol > 0.0, ErrorKind::parameter,
            "run_to_stationary: tol must be > 0");
    GraphSurface surface = build_surface(model, omega0);
    std::vector<double> f = speed_field(presc, surface);
    double sup_f = *std::max_element(f.begin(), f.end());
    require(sup_f <= 1e-10, ErrorKind::precondition,
            "run_to_stationary: beta - H must be <= 0 on the initial "
            "surface (sup = " +
                std::to_string(sup_f) + ")");
    require(subsolution_slice_exists(model, presc, surface.min_omega,
                                     10.0 * opts.tol),
            ErrorKind::precondition,
            "run_to_stationary: no sub-solution slice below the initial "
            "surface");

    RunResult out;
    out.run.tol = opts.tol;
    double dt_target = opts.dt_max;
    if (model.grid.n_cells > 1) {
        double tb_max = 0.0;
        for (int j = 0; j < model.grid.n_cells; ++j)
            tb_max = std::max(tb_max, model.theta_bar(0.0, j));
        dt_target = std::min(
            dt_target, opts.cfl * model.grid.h * model.grid.h / tb_max);
    }
    double dt = dt_target;
    double t = 0.0;
    double prev_metric = sup_abs(f);

    auto record = [&](double time, double step_dt) {
        DiagRow row;
        row.t = time;
        row.dt = step_dt;
        auto mm = std::minmax_element(f.begin(), f.end());
        row.inf_f = *mm.first;
        row.sup_f = *mm.second;
        row.max_u = surface.max_u;
        row.min_omega = surface.min_omega;
        row.max_omega = surface.max_omega;
        out.run.diag.push_back(row);
        if (opts.record_stride > 0 &&
            out.run.steps % opts.record_stride == 0) {
            out.run.snapshot_times.push_back(time);
            out.run.snapshots.push_back(surface.omega);
        }
    };
    record(0.0, 0.0);

    while (true) {
        if (sup_abs(f) < opts.tol) {
            out.status = ExitStatus::converged;
            break;
        }
        if (t >= opts.max_time || out.run.steps >= opts.max_steps) {
            out.status = ExitStatus::max_time;
            break;
        }
        StepResult step = flow_step(presc, surface, dt);
        if (step.outcome == StepResult::Outcome::domain_exit_low ||
            step.outcome == StepResult::Outcome::domain_exit_high) {
            out.status = ExitStatus::domain_exit;
            out.run.exit_direction =
                step.outcome == StepResult::Outcome::domain_exit_low ? -1
                                                                     : 1;
            break;
        }
        bool reject = step.outcome == StepResult::Outcome::nonfinite;
        std::vector<double> f_new;
        double metric = 0.0;
        if (!reject) {
            f_new = speed_field(presc, step.surface);
            metric = sup_abs(f_new);
            reject = opts.adaptive_dt &&
                     metric > 4.0 * prev_metric + 10.0 * opts.tol;
        }
        if (reject) {
            out.run.rejects++;
            dt *= 0.5;
            if (dt < opts.dt_min) {
                out.status = ExitStatus::solver_failure;
                break;
            }
            continue;
        }
        surface = std::move(step.surface);
        f = std::move(f_new);
        prev_metric = metric;
        t += dt;
        out.run.steps++;
        record(t, dt);
        if (opts.adaptive_dt && dt < dt_target)
            dt = std::min(dt * opts.growth, dt_target);
    }

    out.run.status = out.status;
    out.final_surface = std::move(surface);
    out.t_final = t;
    return out;
}

MonitorReport speed_sign_monitor(const FlowRun& run, double tol) {
    MonitorReport rep;
    for (const DiagRow& row : run.diag) {
        if (row.sup_f > rep.worst) {
            rep.worst = row.sup_f;
            rep.at_t = row.t;
        }
    }
    rep.ok = rep.worst <= 10.0 * tol;
    return rep;
}

ComparisonReport comparison_check(const FlowRun& a, const FlowRun& b,
                                  double slack) {
    require(a.snapshot_times.size() == b.snapshot_times.size() &&
                !a.snapshot_times.empty(),
            ErrorKind::parameter,
            "comparison_check: runs must record the same snapshot times");
    ComparisonReport rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < a.snapshot_times.size(); ++i) {
        require(std::abs(a.snapshot_times[i] - b.snapshot_times[i]) <= 1e-12,
                ErrorKind::parameter,
                "comparison_check: snapshot times differ; rerun with a "
                "fixed dt");
        const auto& wa = a.snapshots[i];
        const auto& wb = b.snapshots[i];
        require(wa.size() == wb.size(), ErrorKind::parameter,
                "comparison_check: mismatched grids");
        for (size_t j = 0; j < wa.size(); ++j) {
            double gap = wb[j] - wa[j];
            rep.min_gap = std::min(rep.min_gap, gap);
            if (gap < -slack && rep.ok) {
                rep.ok = false;
                rep.first_crossing_t = a.snapshot_times[i];
            }
        }
    }
    return rep;
}

const char* to_string(ExitStatus status) {
    switch (status) {
        case ExitStatus::converged: return "converged";
        case ExitStatus::max_time: return "max_time";
        case ExitStatus::domain_exit: return "domain_exit";
        case ExitStatus::solver_failure: return "solver_failure";
    }
    return "unknown";
}

} // namespace ncflow
