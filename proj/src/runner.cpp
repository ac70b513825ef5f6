#include "ncflow/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "ncflow/background.hpp"
#include "ncflow/barriers.hpp"
#include "ncflow/config.hpp"
#include "ncflow/flow.hpp"
#include "ncflow/foliation.hpp"
#include "ncflow/graph.hpp"
#include "ncflow/io.hpp"
#include "ncflow/stability.hpp"
#include "ncflow/validate.hpp"

namespace ncflow {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json new_manifest(const std::string& command) {
    json m;
    m["command"] = command;
    m["versions"]["ncflow"] = tool_version;
    m["versions"]["config_format"] = 1;
    return m;
}

void write_json_file(const fs::path& file, const json& j) {
    write_text(file, j.dump(2) + "\n");
}

// JSON has no infinities; keep unbounded results readable instead of null.
json json_number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

// Model field dump shared by the flow-like commands: a fixed sampling of
// the cone data so a run directory can be inspected without the binary.
void dump_model_fields(const fs::path& file, const NullConeModel& model) {
    CsvWriter csv(file, {"s", "vartheta", "theta_bar", "theta", "tfchibar",
                         "ricci_LL"});
    const int heights = 65;
    for (int k = 0; k < heights; ++k) {
        const double s = model.s_max * k / double(heights);
        for (int j = 0; j < model.grid.n_cells; ++j)
            csv.row_numbers({s, model.grid.theta[j], model.theta_bar(s, j),
                             model.theta(s, j), model.shear_norm(s, j),
                             model.ricci_LL(s, j)});
    }
}

void write_diag_csv(const fs::path& file, const FlowRun& run) {
    CsvWriter csv(file, {"t", "dt", "sup_f", "inf_f", "max_u", "min_omega",
                         "max_omega"});
    for (const auto& d : run.diag)
        csv.row_numbers(
            {d.t, d.dt, d.sup_f, d.inf_f, d.max_u, d.min_omega, d.max_omega});
}

void write_surface_csv(const fs::path& file, const NullConeModel& model,
                       const GraphSurface& surf) {
    CsvWriter csv(file, {"cell", "vartheta", "omega", "hvec2"});
    for (int j = 0; j < surf.cells(); ++j)
        csv.row_numbers({double(j), model.grid.theta[j], surf.omega[j],
                         surf.hvec2[j]});
}

void finish_summary(const fs::path& dir, const std::string& text) {
    write_text(dir / "summary.txt", text);
    std::fputs(text.c_str(), stdout);
    std::printf("outputs: %s\n", dir.string().c_str());
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

int cmd_flow(KeyValueConfig& cfg) {
    json manifest = new_manifest("flow");
    NullConeModel model = make_model(cfg, manifest);
    Prescription presc = make_prescription(cfg, model, manifest);
    FlowOptions opts = make_flow_options(cfg, manifest);
    std::vector<double> omega0 = make_initial_omega(cfg, model, manifest);
    config_seed(cfg, manifest);
    const std::string dir_name = config_output_dir(cfg, manifest, "run_flow");
    cfg.require_consumed();

    RunResult result = run_to_stationary(model, presc, omega0, opts);

    const fs::path dir = resolve_output_dir(dir_name);
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json", manifest);
    dump_model_fields(dir / "fields.csv", model);
    write_diag_csv(dir / "diag.csv", result.run);
    write_surface_csv(dir / "final_omega.csv", model, result.final_surface);

    const double sup_f = sup_abs(speed_field(presc, result.final_surface));
    json res;
    res["status"] = to_string(result.status);
    res["exit_direction"] = result.run.exit_direction;
    res["t_final"] = result.t_final;
    res["steps"] = result.run.steps;
    res["rejects"] = result.run.rejects;
    res["sup_speed_final"] = sup_f;
    res["min_omega"] = result.final_surface.min_omega;
    res["max_omega"] = result.final_surface.max_omega;
    res["max_u"] = result.final_surface.max_u;
    res["min_hvec2"] = result.final_surface.min_hvec2;
    res["max_hvec2"] = result.final_surface.max_hvec2;
    write_json_file(dir / "result.json", res);

    std::ostringstream sum;
    sum << "flow " << presc.label() << ": " << to_string(result.status)
        << " after " << result.run.steps
        << " steps, t = " << format_double(result.t_final) << "\n"
        << "final omega in [" << format_double(result.final_surface.min_omega)
        << ", " << format_double(result.final_surface.max_omega)
        << "], sup |f| = " << format_double(sup_f) << "\n";
    finish_summary(dir, sum.str());
    return result.status == ExitStatus::converged ? 0 : 4;
}

int cmd_foliate(KeyValueConfig& cfg) {
    json manifest = new_manifest("foliate");
    NullConeModel model = make_model(cfg, manifest);
    FoliationOptions opts = make_foliation_options(cfg, manifest);
    std::vector<double> omega0 = make_initial_omega(cfg, model, manifest);
    const std::uint64_t seed = config_seed(cfg, manifest);
    const int restarts = int(cfg.get_integer("foliation", "restarts", 0));
    const double restart_tol =
        cfg.get_number("foliation", "restart_tol", 1e-6);
    manifest["foliation"]["restarts"] = restarts;
    manifest["foliation"]["restart_tol"] = restart_tol;
    require(restarts == 0 || opts.keep_profiles, ErrorKind::parameter,
            "config: restarts need keep_profiles = true");
    const std::string dir_name =
        config_output_dir(cfg, manifest, "run_foliate");
    cfg.require_consumed();

    FoliationResult result = foliate(model, omega0, opts);

    const fs::path dir = resolve_output_dir(dir_name);
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json", manifest);
    dump_model_fields(dir / "fields.csv", model);
    {
        CsvWriter csv(dir / "leaves.csv",
                      {"lambda", "eigenvalue", "min_omega", "max_omega",
                       "max_u", "flow_steps", "t_flow"});
        for (const auto& l : result.leaves)
            csv.row_numbers({l.lambda, l.eigenvalue, l.min_omega, l.max_omega,
                             l.max_u, double(l.flow_steps), l.t_flow});
    }
    if (opts.keep_profiles) {
        CsvWriter csv(dir / "profiles.csv",
                      {"lambda", "cell", "vartheta", "omega"});
        for (const auto& l : result.leaves)
            for (int j = 0; j < int(l.omega.size()); ++j)
                csv.row_numbers(
                    {l.lambda, double(j), model.grid.theta[j], l.omega[j]});
    }

    json res;
    res["termination"] = to_string(result.termination);
    res["detail"] = result.detail;
    res["sigma_estimate"] = result.sigma_estimate;
    res["n_leaves"] = result.leaves.size();
    res["lifts_failed"] = result.lifts_failed;
    if (opts.keep_profiles && result.leaves.size() >= 2) {
        const MonotonicityReport mono = monotonicity_check(result);
        res["monotonicity"]["ok"] = mono.ok;
        res["monotonicity"]["min_gap"] = mono.min_gap;
        res["monotonicity"]["at_pair"] = mono.at_pair;
    }
    if (restarts > 0) {
        // Interior leaves only: the seed sits at lambda = 0 and the last
        // leaf may be nearly marginal, where a restart flow would crawl.
        json rs = json::array();
        for (std::size_t k = 1; k + 1 < result.leaves.size(); ++k) {
            const auto& leaf = result.leaves[k];
            if (leaf.lambda <= 0.0) continue;
            if (leaf.eigenvalue <
                opts.instability_factor * opts.stability_threshold)
                continue;
            const RestartReport rr =
                uniqueness_restart(model, leaf.lambda, leaf.omega, opts.flow,
                                   restarts, restart_tol, seed + k);
            json one;
            one["lambda"] = leaf.lambda;
            one["ok"] = rr.ok;
            one["max_deviation"] = rr.max_deviation;
            rs.push_back(one);
        }
        res["restarts"] = rs;
    }
    write_json_file(dir / "result.json", res);

    std::ostringstream sum;
    sum << "foliate: " << to_string(result.termination) << " with "
        << result.leaves.size()
        << " leaves, sigma_estimate = " << format_double(result.sigma_estimate)
        << "\n";
    if (!result.detail.empty()) sum << "detail: " << result.detail << "\n";
    finish_summary(dir, sum.str());
    return 0;
}

int cmd_stability(KeyValueConfig& cfg) {
    json manifest = new_manifest("stability");
    NullConeModel model = make_model(cfg, manifest);
    Prescription presc = make_prescription(cfg, model, manifest);
    require(presc.kind == Prescription::Kind::stcmc, ErrorKind::parameter,
            "config: stability needs a constant curvature target "
            "(prescription kind = stcmc)");
    FlowOptions opts = make_flow_options(cfg, manifest);
    std::vector<double> omega0 = make_initial_omega(cfg, model, manifest);
    const double threshold = cfg.get_number("stability", "threshold", 1e-8);
    manifest["stability"]["threshold"] = threshold;
    config_seed(cfg, manifest);
    const std::string dir_name =
        config_output_dir(cfg, manifest, "run_stability");
    cfg.require_consumed();

    RunResult result = run_to_stationary(model, presc, omega0, opts);

    const fs::path dir = resolve_output_dir(dir_name);
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json", manifest);
    write_surface_csv(dir / "final_omega.csv", model, result.final_surface);

    json res;
    res["flow"]["status"] = to_string(result.status);
    res["flow"]["steps"] = result.run.steps;
    res["flow"]["t_final"] = result.t_final;
    if (result.status != ExitStatus::converged) {
        write_json_file(dir / "result.json", res);
        std::ostringstream sum;
        sum << "stability: flow did not converge (" << to_string(result.status)
            << "), no eigenvalue computed\n";
        finish_summary(dir, sum.str());
        return 4;
    }

    const StabilityReport report = analyze_stability(
        result.final_surface, presc.lambda, 10.0 * opts.tol, threshold);
    {
        CsvWriter csv(dir / "b_field.csv",
                      {"cell", "vartheta", "b", "eigenfunction"});
        for (int j = 0; j < result.final_surface.cells(); ++j)
            csv.row_numbers({double(j), model.grid.theta[j],
                             report.b_field[j], report.eigenfunction[j]});
    }
    res["lambda"] = report.lambda;
    res["eigenvalue"] = report.eigenvalue;
    res["threshold"] = report.threshold;
    res["stable"] = report.stable;
    res["b_positive"] = report.b_positive;
    res["min_b"] = report.min_b;
    res["max_b"] = report.max_b;
    res["iterations"] = report.iterations;
    res["residual"] = report.residual;
    write_json_file(dir / "result.json", res);

    std::ostringstream sum;
    sum << "stability at lambda = " << format_double(report.lambda)
        << ": eigenvalue = " << format_double(report.eigenvalue) << " ("
        << (report.stable ? "stable" : "not stable above threshold ")
        << (report.stable ? "" : format_double(report.threshold)) << ")\n"
        << "B in [" << format_double(report.min_b) << ", "
        << format_double(report.max_b) << "]\n";
    finish_summary(dir, sum.str());
    return 0;
}

int cmd_barriers(KeyValueConfig& cfg) {
    json manifest = new_manifest("barriers");
    NullConeModel model = make_model(cfg, manifest);
    const double s_hi = cfg.get_number("barriers", "s_hi", 0.5 * model.s_max);
    const double interval_end =
        cfg.get_number("barriers", "interval_end", s_hi);
    CertificateOptions copts;
    copts.delta = cfg.get_number("barriers", "delta", copts.delta);
    copts.eta = cfg.get_number("barriers", "eta", copts.eta);
    const int mu_samples = int(cfg.get_integer("barriers", "mu_samples", 257));
    const int sandwich_samples =
        int(cfg.get_integer("barriers", "sandwich_samples", 1000));
    const double sandwich_slack =
        cfg.get_number("barriers", "sandwich_slack", 1e-9);
    const bool monitor = cfg.get_flag("barriers", "monitor_flow", false);
    json& mb = manifest["barriers"];
    mb["s_hi"] = s_hi;
    mb["interval_end"] = interval_end;
    mb["delta"] = copts.delta;
    mb["eta"] = copts.eta;
    mb["mu_samples"] = mu_samples;
    mb["sandwich_samples"] = sandwich_samples;
    mb["sandwich_slack"] = sandwich_slack;
    mb["monitor_flow"] = monitor;

    std::optional<Prescription> presc;
    FlowOptions fopts;
    std::vector<double> omega0;
    if (monitor) {
        presc = make_prescription(cfg, model, manifest);
        fopts = make_flow_options(cfg, manifest);
        omega0 = make_initial_omega(cfg, model, manifest);
    }
    config_seed(cfg, manifest);
    const std::string dir_name =
        config_output_dir(cfg, manifest, "run_barriers");
    cfg.require_consumed();

    const BarrierCertificate cert =
        build_certificate(model, s_hi, interval_end, copts);
    const SandwichReport sandwich = theta_bar_sandwich(
        model, cert.constants, sandwich_samples, sandwich_slack);
    const std::vector<MuSample> samples =
        sample_test_function(cert.mu, interval_end, mu_samples);

    std::optional<KeyInequalityReport> mon;
    std::optional<RunResult> flow_result;
    if (monitor) {
        flow_result = run_to_stationary(model, *presc, omega0, fopts);
        mon = key_inequality_monitor(model, flow_result->run, cert);
    }

    const fs::path dir = resolve_output_dir(dir_name);
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json", manifest);
    {
        CsvWriter csv(dir / "mu.csv", {"s", "mu", "mu_p", "mu_pp", "residual"});
        for (const auto& p : samples)
            csv.row_numbers({p.s, p.mu, p.mu_p, p.mu_pp, p.residual});
    }

    json res;
    res["constants"]["c_r"] = cert.constants.c_r;
    res["constants"]["c_r_up"] = cert.constants.c_r_up;
    res["constants"]["c_chi"] = cert.constants.c_chi;
    res["constants"]["ricci_nonneg"] = cert.constants.ricci_nonneg;
    res["discriminant"]["branch"] = cert.disc.branch;
    res["discriminant"]["hypothesis_ok"] = cert.disc.hypothesis_ok;
    res["discriminant"]["w_upper"] = cert.disc.w_upper;
    res["discriminant"]["z_lower"] = cert.disc.z_lower;
    res["discriminant"]["b_coef"] = cert.disc.b_coef;
    res["discriminant"]["a0"] = cert.disc.a0;
    res["discriminant"]["script_d"] = cert.disc.script_d;
    res["phi_sup"] = cert.phi_sup;
    res["phi_negative"] = cert.phi_negative;
    res["interval_end"] = cert.interval_end;
    res["delta"] = cert.delta;
    res["eta"] = cert.eta;
    res["window_end"] = json_number(cert.mu.window_end);
    res["bound_height"] = json_number(cert.bound_height);
    res["sandwich"]["ok"] = sandwich.ok;
    res["sandwich"]["worst_low"] = sandwich.worst_low;
    res["sandwich"]["worst_high"] = sandwich.worst_high;
    if (mon) {
        res["monitor"]["ok"] = mon->ok;
        res["monitor"]["min_margin"] = mon->min_margin;
        res["monitor"]["min_reference"] = mon->min_reference;
        res["monitor"]["min_ratio"] = mon->min_ratio;
        res["monitor"]["points_checked"] = mon->points_checked;
        res["monitor"]["flow_status"] = to_string(flow_result->status);
    }
    write_json_file(dir / "certificate.json", res);

    std::ostringstream sum;
    sum << "barriers on [0, " << format_double(s_hi)
        << "]: c_r = " << format_double(cert.constants.c_r)
        << ", c_chi = " << format_double(cert.constants.c_chi)
        << ", script_d = " << format_double(cert.disc.script_d) << "\n"
        << "test function valid to s = " << format_double(cert.mu.window_end)
        << ", height bound = " << format_double(cert.bound_height) << "\n"
        << "theta_bar sandwich: " << (sandwich.ok ? "ok" : "VIOLATED") << "\n";
    if (mon)
        sum << "flow monitor: " << (mon->ok ? "ok" : "VIOLATED")
            << ", min margin = " << format_double(mon->min_margin) << " over "
            << mon->points_checked << " points\n";
    finish_summary(dir, sum.str());

    if (!sandwich.ok || (mon && !mon->ok)) return 5;
    return 0;
}

struct CheckLine {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    bool is_order = true; // order >= threshold, otherwise value < threshold
};

int cmd_verify(KeyValueConfig& cfg) {
    json manifest = new_manifest("verify");
    NullConeModel model = make_model(cfg, manifest);
    Prescription presc = make_prescription(cfg, model, manifest);
    FlowOptions base = make_flow_options(cfg, manifest);

    const double h0 = cfg.get_number("verify", "h0", 0.02);
    const int levels = int(cfg.get_integer("verify", "levels", 4));
    const double t0 = cfg.get_number("verify", "t0", 0.1);
    const double dt0 = cfg.get_number("verify", "dt0", 0.002);
    const double s0 = cfg.get_number("verify", "s0", 0.5);
    const double bump = cfg.get_number("verify", "bump", 0.1);
    const double speed_base = cfg.get_number("verify", "speed_base", 0.8);
    const double speed_cos = cfg.get_number("verify", "speed_cos", 0.2);
    const double identity_s0 = cfg.get_number("verify", "identity_s0", 0.6);
    const double identity_t = cfg.get_number("verify", "identity_t", 0.5);
    const int identity_checkpoints =
        int(cfg.get_integer("verify", "identity_checkpoints", 8));
    json& mv = manifest["verify"];
    mv["h0"] = h0;
    mv["levels"] = levels;
    mv["t0"] = t0;
    mv["dt0"] = dt0;
    mv["s0"] = s0;
    mv["bump"] = bump;
    mv["speed_base"] = speed_base;
    mv["speed_cos"] = speed_cos;
    mv["identity_s0"] = identity_s0;
    mv["identity_t"] = identity_t;
    mv["identity_checkpoints"] = identity_checkpoints;
    config_seed(cfg, manifest);
    const std::string dir_name =
        config_output_dir(cfg, manifest, "run_verify");
    cfg.require_consumed();

    SyntheticFamily family;
    family.omega0.resize(model.grid.n_cells);
    family.speed.resize(model.grid.n_cells);
    for (int j = 0; j < model.grid.n_cells; ++j) {
        const double sn = std::sin(model.grid.theta[j]);
        family.omega0[j] = s0 + bump * sn * sn;
        family.speed[j] = speed_base + speed_cos * std::cos(model.grid.theta[j]);
    }

    const ResidualReport metric =
        check_metric_evolution(model, family, t0, h0, levels);
    const ResidualReport urep = check_u_evolution(model, family, t0, h0, levels);
    const ResidualReport hrep =
        check_H_evolution(model, s0, family.speed, h0, levels);
    const ResidualReport ray = check_raychaudhuri(model, h0, levels);
    const SpeedOrderReport speed =
        check_speed_evolution(model, presc, family.omega0, t0, dt0, levels, base);

    // Expected orders, pinned: second order for the centered geometric
    // checks, first order for the semi-implicit speed comparison.
    std::vector<CheckLine> lines = {
        {"metric_evolution", metric.measured_order, 1.9, false, true},
        {"u_evolution", urep.measured_order, 1.9, false, true},
        {"curvature_evolution", hrep.measured_order, 1.9, false, true},
        {"raychaudhuri", ray.measured_order, 1.9, false, true},
        {"speed_order", speed.measured_order, 0.9, false, true},
    };
    if (model.symmetric()) {
        const double resid = speed_identity_residual(
            model, presc, identity_s0, identity_t, identity_checkpoints);
        lines.push_back({"speed_identity", resid, 1e-6, false, false});
    }
    bool all_pass = true;
    for (auto& l : lines) {
        l.pass = l.is_order ? l.value >= l.threshold : l.value < l.threshold;
        all_pass = all_pass && l.pass;
    }

    const fs::path dir = resolve_output_dir(dir_name);
    fs::create_directories(dir);
    write_json_file(dir / "manifest.json", manifest);
    {
        CsvWriter csv(dir / "orders.csv", {"check", "level", "spacing",
                                           "sup_residual", "difference",
                                           "order"});
        auto write_report = [&](const ResidualReport& r) {
            for (std::size_t k = 0; k < r.spacings.size(); ++k)
                csv.row({r.label, format_double(double(k)),
                         format_double(r.spacings[k]),
                         format_double(r.sup_residuals[k]),
                         k < r.differences.size()
                             ? format_double(r.differences[k])
                             : "",
                         k < r.orders.size() ? format_double(r.orders[k])
                                             : ""});
        };
        write_report(metric);
        write_report(urep);
        write_report(hrep);
        write_report(ray);
        for (std::size_t k = 0; k < speed.dts.size(); ++k)
            csv.row({"speed", format_double(double(k)),
                     format_double(speed.dts[k]), "",
                     k < speed.differences.size()
                         ? format_double(speed.differences[k])
                         : "",
                     k < speed.orders.size() ? format_double(speed.orders[k])
                                             : ""});
    }

    json res;
    for (const auto& l : lines) {
        res["checks"][l.name]["value"] = json_number(l.value);
        res["checks"][l.name]["threshold"] = l.threshold;
        res["checks"][l.name]["kind"] = l.is_order ? "order_at_least"
                                                   : "residual_below";
        res["checks"][l.name]["pass"] = l.pass;
    }
    res["all_pass"] = all_pass;
    write_json_file(dir / "result.json", res);

    std::ostringstream sum;
    sum << "verify on " << model.family << ":\n";
    for (const auto& l : lines)
        sum << "  " << l.name << ": " << format_double(l.value)
            << (l.is_order ? " (want >= " : " (want < ")
            << format_double(l.threshold) << ") "
            << (l.pass ? "pass" : "FAIL") << "\n";
    finish_summary(dir, sum.str());
    return all_pass ? 0 : 4;
}

// ---- plot emission

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
    const std::string text = read_text(file);
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ',')) fields.push_back(cur);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        rows.push_back(std::move(fields));
    }
    require(!rows.empty(), ErrorKind::io, "empty csv " + file.string());
    return rows;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name, const fs::path& file) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    fail(ErrorKind::io,
         "column " + name + " missing in " + file.string());
}

int emit_plots_impl(const std::string& run_dir) {
    const fs::path dir = resolve_output_dir(run_dir);
    require(fs::exists(dir / "manifest.json"), ErrorKind::io,
            "no manifest.json under " + dir.string());
    const json manifest = json::parse(read_text(dir / "manifest.json"));
    int written = 0;

    if (fs::exists(dir / "diag.csv")) {
        const auto rows = read_csv(dir / "diag.csv");
        const auto ct = column_index(rows[0], "t", dir / "diag.csv");
        const auto cf = column_index(rows[0], "sup_f", dir / "diag.csv");
        std::ostringstream out;
        out << "# largest graph speed against flow time\n# columns: t sup_f\n";
        for (std::size_t i = 1; i < rows.size(); ++i)
            out << rows[i][ct] << " " << rows[i][cf] << "\n";
        write_text(dir / "plot_supf_vs_t.txt", out.str());
        ++written;
    }
    if (fs::exists(dir / "leaves.csv")) {
        const auto rows = read_csv(dir / "leaves.csv");
        const auto cl = column_index(rows[0], "lambda", dir / "leaves.csv");
        const auto ce = column_index(rows[0], "eigenvalue", dir / "leaves.csv");
        const auto clo = column_index(rows[0], "min_omega", dir / "leaves.csv");
        const auto chi = column_index(rows[0], "max_omega", dir / "leaves.csv");
        {
            std::ostringstream out;
            out << "# principal stability eigenvalue per leaf\n"
                << "# columns: lambda eigenvalue\n";
            for (std::size_t i = 1; i < rows.size(); ++i)
                out << rows[i][cl] << " " << rows[i][ce] << "\n";
            write_text(dir / "plot_eigenvalue_vs_lambda.txt", out.str());
        }
        require(manifest.contains("model"), ErrorKind::io,
                "manifest carries no model block");
        const double r0 = manifest["model"].value("r0", 1.0);
        const double n = manifest["model"].value("n", 2);
        std::ostringstream out;
        out << "# area radius proxy r = r0 (1 + omega/n) per leaf\n"
            << "# columns: lambda r\n";
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double lo = std::strtod(rows[i][clo].c_str(), nullptr);
            const double hi = std::strtod(rows[i][chi].c_str(), nullptr);
            const double r = r0 * (1.0 + 0.5 * (lo + hi) / n);
            out << rows[i][cl] << " " << format_double(r) << "\n";
        }
        write_text(dir / "plot_radius_vs_lambda.txt", out.str());
        written += 2;
    }
    if (fs::exists(dir / "mu.csv")) {
        const auto rows = read_csv(dir / "mu.csv");
        const auto cs = column_index(rows[0], "s", dir / "mu.csv");
        const auto cm = column_index(rows[0], "mu", dir / "mu.csv");
        std::ostringstream out;
        out << "# barrier test function\n";
        if (fs::exists(dir / "certificate.json")) {
            const json cert = json::parse(read_text(dir / "certificate.json"));
            if (cert.contains("window_end"))
                out << "# window_end = "
                    << format_double(cert["window_end"].get<double>()) << "\n";
            if (cert.contains("interval_end"))
                out << "# interval_end = "
                    << format_double(cert["interval_end"].get<double>())
                    << "\n";
        }
        out << "# columns: s mu\n";
        for (std::size_t i = 1; i < rows.size(); ++i)
            out << rows[i][cs] << " " << rows[i][cm] << "\n";
        write_text(dir / "plot_mu.txt", out.str());
        ++written;
    }
    if (fs::exists(dir / "b_field.csv")) {
        const auto rows = read_csv(dir / "b_field.csv");
        const auto cv = column_index(rows[0], "vartheta", dir / "b_field.csv");
        const auto ce =
            column_index(rows[0], "eigenfunction", dir / "b_field.csv");
        std::ostringstream out;
        out << "# principal eigenfunction over the cross section\n"
            << "# columns: vartheta eigenfunction\n";
        for (std::size_t i = 1; i < rows.size(); ++i)
            out << rows[i][cv] << " " << rows[i][ce] << "\n";
        write_text(dir / "plot_eigenfunction.txt", out.str());
        ++written;
    }

    require(written > 0, ErrorKind::io,
            "no plottable artifacts under " + dir.string());
    std::printf("emit_plots: wrote %d plot file(s) under %s\n", written,
                dir.string().c_str());
    return 0;
}

} // namespace

int cli_exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::io:
        return 2;
    case ErrorKind::precondition:
    case ErrorKind::domain:
        return 3;
    case ErrorKind::focal_point:
    case ErrorKind::discretization:
    case ErrorKind::solver:
        return 4;
    case ErrorKind::hypothesis:
    case ErrorKind::interval:
        return 5;
    }
    return 1;
}

int run_command(const std::string& command, const std::string& config_path) {
    try {
        KeyValueConfig cfg = KeyValueConfig::from_file(config_path);
        if (command == "flow") return cmd_flow(cfg);
        if (command == "foliate") return cmd_foliate(cfg);
        if (command == "stability") return cmd_stability(cfg);
        if (command == "barriers") return cmd_barriers(cfg);
        if (command == "verify") return cmd_verify(cfg);
        fail(ErrorKind::parameter, "unknown command " + command);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli_exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

int emit_plots(const std::string& run_dir) {
    try {
        return emit_plots_impl(run_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli_exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

} // namespace ncflow
