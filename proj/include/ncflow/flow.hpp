#pragma once

#include <string>
#include <vector>

#include "ncflow/graph.hpp"

namespace ncflow {

// Normal speed prescription for the flow  d omega / dt = beta - H  with
// beta = target / (2 theta_bar): target is the constant lambda (surfaces of
// constant squared mean curvature vector) or a prescribed cone function rho.
struct Prescription {
    enum class Kind { stcmc, prescribed };
    Kind kind = Kind::stcmc;
    double lambda = 0.0;
    ConeField rho;
    ConeField rho_ds; // optional, only consumed by validation checks

    static Prescription stcmc(double lambda);
    static Prescription prescribed(ConeField rho, ConeField rho_ds = {});

    double target(double s, int j) const {
        return kind == Kind::stcmc ? lambda : rho(s, j);
    }
    std::string label() const;
};

// f = beta - H = (target - hvec2) / (2 theta_bar) per cell.
std::vector<double> speed_field(const Prescription& presc,
                                const GraphSurface& surface);

enum class ExitStatus { converged, max_time, domain_exit, solver_failure };
const char* to_string(ExitStatus status);

struct FlowOptions {
    double tol = 1e-8;        // stationarity threshold on sup |f|
    double dt_max = 0.05;
    double cfl = 1.0;         // dt <= cfl * h^2 / max theta_bar (grids > 1)
    double dt_min = 1e-12;
    double growth = 1.25;
    bool adaptive_dt = true;
    double max_time = 1e5;
    long max_steps = 20000000;
    int record_stride = 1;    // snapshot cadence; <= 0 disables snapshots
};

struct DiagRow {
    double t = 0, dt = 0, sup_f = 0, inf_f = 0;
    double max_u = 0, min_omega = 0, max_omega = 0;
};

struct FlowRun {
    ExitStatus status = ExitStatus::max_time;
    int exit_direction = 0; // -1: fell below s = 0, +1: reached Lambda
    double tol = 0.0;
    long steps = 0, rejects = 0;
    std::vector<DiagRow> diag;
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshots;
};

// One semi-implicit step: the Laplacian is treated implicitly with the
// metric frozen at the current surface (tridiagonal solve), the remaining
// source beta - theta + 2 zeta(grad omega) - u theta_bar explicitly.
struct StepResult {
    enum class Outcome { ok, domain_exit_low, domain_exit_high, nonfinite };
    Outcome outcome = Outcome::ok;
    GraphSurface surface; // populated when outcome == ok
};

StepResult flow_step(const Prescription& presc, const GraphSurface& current,
                     double dt);

struct RunResult {
    ExitStatus status = ExitStatus::max_time;
    GraphSurface final_surface;
    FlowRun run;
    double t_final = 0.0;
};

// Runs the flow until sup |f| < tol.  Preconditions (ErrorKind::precondition
// when violated): f <= 0 pointwise on the initial surface, and a sub-solution
// slice must exist below it (a slice s0 <= min omega0 whose hvec2 does not
// exceed the prescription target there).  Domain exit is reported as a
// barrier violation through ExitStatus::domain_exit plus the direction.
RunResult run_to_stationary(const NullConeModel& model,
                            const Prescription& presc,
                            const std::vector<double>& omega0,
                            const FlowOptions& opts);

struct MonitorReport {
    bool ok = true;
    double worst = 0.0; // largest recorded sup f
    double at_t = 0.0;
};

// The speed of an admissible run must stay nonpositive; tolerate 10 tol of
// discrete overshoot.
MonitorReport speed_sign_monitor(const FlowRun& run, double tol);

struct ComparisonReport {
    bool ok = true;
    double min_gap = 0.0;
    double first_crossing_t = -1.0;
};

// Discrete comparison of two recorded runs: omega_b >= omega_a - slack at
// every common snapshot (runs must share snapshot times, e.g. fixed dt).
ComparisonReport comparison_check(const FlowRun& a, const FlowRun& b,
                                  double slack);

} // namespace ncflow
