#include "ncflow/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncflow/errors.hpp"
#include "ncflow/stability.hpp"

namespace ncflow {

namespace {

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

ResidualReport order_from_fields(std::string label,
                                 std::vector<double> spacings,
                                 const std::vector<std::vector<double>>& r) {
    require(spacings.size() >= 3 && r.size() == spacings.size(),
            ErrorKind::parameter,
            "order estimate needs at least three levels");
    ResidualReport rep;
    rep.label = std::move(label);
    rep.spacings = std::move(spacings);
    for (const auto& field : r) rep.sup_residuals.push_back(sup_abs(field));
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        require(r[k].size() == r[k + 1].size(), ErrorKind::parameter,
                "order estimate: residual fields must share the sample set");
        double d = 0.0;
        for (std::size_t i = 0; i < r[k].size(); ++i)
            d = std::max(d, std::abs(r[k][i] - r[k + 1][i]));
        rep.differences.push_back(d);
    }
    for (std::size_t k = 0; k + 1 < rep.differences.size(); ++k) {
        const double num = rep.differences[k], den = rep.differences[k + 1];
        rep.orders.push_back(den > 0.0
                                 ? std::log2(num / den)
                                 : std::numeric_limits<double>::infinity());
    }
    rep.measured_order = rep.orders.back();
    return rep;
}

std::vector<double> family_omega(const SyntheticFamily& fam, double t) {
    std::vector<double> out(fam.omega0.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = fam.omega0[j] + t * fam.speed[j];
    return out;
}

void check_family(const NullConeModel& model, const SyntheticFamily& fam) {
    require(!fam.omega0.empty() &&
                fam.omega0.size() == fam.speed.size() &&
                int(fam.omega0.size()) == model.grid.n_cells,
            ErrorKind::parameter, "synthetic family does not fit the grid");
}

} // namespace

ResidualReport check_metric_evolution(const NullConeModel& model,
                                      const SyntheticFamily& family,
                                      double t0, double h0, int levels) {
    check_family(model, family);
    GraphSurface center = build_surface(model, family_omega(family, t0));
    const int n = center.cells();

    std::vector<std::vector<double>> fields;
    std::vector<double> spacings;
    for (int k = 0; k < levels; ++k) {
        const double h = h0 / std::ldexp(1.0, k);
        GraphSurface plus = build_surface(model, family_omega(family, t0 + h));
        GraphSurface minus =
            build_surface(model, family_omega(family, t0 - h));
        std::vector<double> r(2 * n);
        for (int j = 0; j < n; ++j) {
            const double f = family.speed[j];
            const double g_tt = center.a_on[j] * center.a_on[j];
            const double g_pp = center.bs_on[j] * center.bs_on[j];
            const double dg_tt = (plus.a_on[j] * plus.a_on[j] -
                                  minus.a_on[j] * minus.a_on[j]) /
                                 (2.0 * h);
            const double dg_pp = (plus.bs_on[j] * plus.bs_on[j] -
                                  minus.bs_on[j] * minus.bs_on[j]) /
                                 (2.0 * h);
            r[j] = dg_tt - 2.0 * f * center.chibar_a_on[j] * g_tt;
            r[n + j] = dg_pp - 2.0 * f * center.chibar_b_on[j] * g_pp;
        }
        fields.push_back(std::move(r));
        spacings.push_back(h);
    }
    return order_from_fields("metric evolution", std::move(spacings), fields);
}

ResidualReport check_u_evolution(const NullConeModel& model,
                                 const SyntheticFamily& family, double t0,
                                 double h0, int levels) {
    check_family(model, family);
    GraphSurface center = build_surface(model, family_omega(family, t0));
    const int n = center.cells();
    std::vector<double> grad_f = surface_gradient(center, family.speed);

    std::vector<std::vector<double>> fields;
    std::vector<double> spacings;
    for (int k = 0; k < levels; ++k) {
        const double h = h0 / std::ldexp(1.0, k);
        GraphSurface plus = build_surface(model, family_omega(family, t0 + h));
        GraphSurface minus =
            build_surface(model, family_omega(family, t0 - h));
        std::vector<double> r(n);
        for (int j = 0; j < n; ++j) {
            const double a2 = center.a_on[j] * center.a_on[j];
            const double rhs =
                grad_f[j] * center.omega_p[j] / a2 -
                2.0 * center.u[j] * family.speed[j] * center.chibar_a_on[j];
            r[j] = (plus.u[j] - minus.u[j]) / (2.0 * h) - rhs;
        }
        fields.push_back(std::move(r));
        spacings.push_back(h);
    }
    return order_from_fields("u evolution", std::move(spacings), fields);
}

ResidualReport check_H_evolution(const NullConeModel& model, double s0,
                                 const std::vector<double>& speed, double h0,
                                 int levels) {
    SyntheticFamily family{std::vector<double>(model.grid.n_cells, s0),
                           speed};
    check_family(model, family);
    GraphSurface center = build_surface(model, family.omega0);
    const int n = center.cells();

    // the right side combines the surface operator with the pointwise
    // stability coefficient of the slice
    std::vector<double> b = stability_b_field(center, center.hvec2);
    std::vector<double> lap_f = surface_laplacian(center, speed);
    std::vector<double> grad_f = surface_gradient(center, speed);
    std::vector<double> rhs(n);
    for (int j = 0; j < n; ++j) {
        const double a2 = center.a_on[j] * center.a_on[j];
        rhs[j] = 2.0 * center.theta_bar_on[j] *
                 (-lap_f[j] - 2.0 * center.tau[j] * grad_f[j] / a2 +
                  b[j] * speed[j]);
    }

    std::vector<std::vector<double>> fields;
    std::vector<double> spacings;
    for (int k = 0; k < levels; ++k) {
        const double h = h0 / std::ldexp(1.0, k);
        GraphSurface plus = build_surface(model, family_omega(family, h));
        GraphSurface minus = build_surface(model, family_omega(family, -h));
        std::vector<double> r(n);
        for (int j = 0; j < n; ++j)
            r[j] = (plus.hvec2[j] - minus.hvec2[j]) / (2.0 * h) - rhs[j];
        fields.push_back(std::move(r));
        spacings.push_back(h);
    }
    return order_from_fields("hvec2 evolution", std::move(spacings), fields);
}

ResidualReport check_raychaudhuri(const NullConeModel& model, double h0,
                                  int levels) {
    const int n_cells = model.grid.n_cells;
    const int n_heights = 65;
    const double lo = 2.0 * h0;
    const double hi = model.s_max - 2.0 * h0;
    require(hi > lo, ErrorKind::parameter,
            "check_raychaudhuri: h0 too large for the cone height");

    std::vector<std::vector<double>> fields;
    std::vector<double> spacings;
    for (int k = 0; k < levels; ++k) {
        const double h = h0 / std::ldexp(1.0, k);
        std::vector<double> r;
        r.reserve(n_heights * n_cells);
        for (int i = 0; i < n_heights; ++i) {
            const double s = lo + (hi - lo) * i / (n_heights - 1);
            for (int j = 0; j < n_cells; ++j) {
                const double d = (model.theta_bar(s + h, j) -
                                  model.theta_bar(s - h, j)) /
                                 (2.0 * h);
                const double tb = model.theta_bar(s, j);
                const double sh = model.shear_norm(s, j);
                r.push_back(d + sh * sh + tb * tb / model.n +
                            model.ricci_LL(s, j));
            }
        }
        fields.push_back(std::move(r));
        spacings.push_back(h);
    }
    return order_from_fields("optical equation", std::move(spacings), fields);
}

SpeedOrderReport check_speed_evolution(const NullConeModel& model,
                                       const Prescription& presc,
                                       const std::vector<double>& omega0,
                                       double t0, double dt0, int levels,
                                       const FlowOptions& base) {
    require(levels >= 3, ErrorKind::parameter,
            "check_speed_evolution: need at least three levels");
    require(t0 > 0.0 && dt0 > 0.0 && t0 >= dt0, ErrorKind::parameter,
            "check_speed_evolution: bad t0 or dt0");

    SpeedOrderReport rep;
    std::vector<std::vector<double>> fields;
    for (int k = 0; k < levels; ++k) {
        const double dt = dt0 / std::ldexp(1.0, k);
        const long m = std::lround(t0 / dt);
        require(std::abs(m * dt - t0) <= 1e-9 * t0, ErrorKind::parameter,
                "check_speed_evolution: t0 must be a multiple of dt0");
        FlowOptions o = base;
        o.adaptive_dt = false;
        o.dt_max = dt;
        o.cfl = 1e300; // pin the step to dt regardless of the grid
        o.record_stride = 1;
        o.tol = 1e-300; // never stop on stationarity inside the window
        o.max_time = t0 + 0.5 * dt;
        o.max_steps = m + 2;
        RunResult rr = run_to_stationary(model, presc, omega0, o);
        require(rr.run.rejects == 0, ErrorKind::solver,
                "check_speed_evolution: fixed step was rejected");
        require(long(rr.run.snapshots.size()) > m, ErrorKind::solver,
                "check_speed_evolution: run ended before the matched time");
        GraphSurface surface = build_surface(model, rr.run.snapshots[m]);
        fields.push_back(speed_field(presc, surface));
        rep.dts.push_back(dt);
    }
    for (int k = 0; k + 1 < levels; ++k) {
        double d = 0.0;
        for (std::size_t j = 0; j < fields[k].size(); ++j)
            d = std::max(d, std::abs(fields[k][j] - fields[k + 1][j]));
        rep.differences.push_back(d);
    }
    for (std::size_t k = 0; k + 1 < rep.differences.size(); ++k)
        rep.orders.push_back(
            std::log2(rep.differences[k] / rep.differences[k + 1]));
    rep.measured_order = rep.orders.back();
    return rep;
}

double speed_identity_residual(const NullConeModel& model,
                               const Prescription& presc, double s0,
                               double t_end, int n_checkpoints) {
    require(model.symmetric(), ErrorKind::parameter,
            "speed_identity_residual: symmetric models only");
    require(n_checkpoints >= 1 && t_end > 0.0, ErrorKind::parameter,
            "speed_identity_residual: bad checkpoint request");
    const bool prescribed = presc.kind == Prescription::Kind::prescribed;
    require(!prescribed || bool(presc.rho_ds), ErrorKind::parameter,
            "speed_identity_residual: prescribed rho needs rho_ds");

    auto fval = [&](double c) {
        return (presc.target(c, 0) - model.hvec2_slice(c, 0)) /
               (2.0 * model.theta_bar(c, 0));
    };
    auto residual = [&](double c) {
        const double tb = model.theta_bar(c, 0);
        const double tbp = model.theta_bar_ds(c, 0);
        const double th = model.theta(c, 0);
        const double thp = model.theta_ds(c, 0);
        const double rho = presc.target(c, 0);
        const double rhop = prescribed ? presc.rho_ds(c, 0) : 0.0;
        const double f = fval(c);
        const double pp = 2.0 * (thp * tb + th * tbp);
        const double fp = (rhop - pp) / (2.0 * tb) - f * tbp / tb;
        const double betap =
            rhop / (2.0 * tb) - rho * tbp / (2.0 * tb * tb);
        const double bracket = betap + tb / model.n * th +
                               model.ricci_Lnu(c, 0) + model.weyl_nLnL(c, 0);
        return std::abs(f * fp - f * bracket);
    };

    const int per = 32;
    const double h = t_end / (n_checkpoints * per);
    double c = s0, sup = residual(s0);
    const double top = model.s_max * (1.0 - 1e-12);
    for (int cp = 0; cp < n_checkpoints; ++cp) {
        for (int i = 0; i < per; ++i) {
            const double k1 = fval(c);
            const double k2 = fval(c + 0.5 * h * k1);
            const double k3 = fval(c + 0.5 * h * k2);
            const double k4 = fval(c + h * k3);
            c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!(c > 0.0 && c < top)) return sup;
        }
        sup = std::max(sup, residual(c));
    }
    return sup;
}

} // namespace ncflow
