#include "ncflow/stability.hpp"

#include <algorithm>
#include <cmath>

namespace ncflow {

std::vector<double> stability_b_field(const GraphSurface& surface,
                                      double lambda, double stcmc_tol) {
    double mismatch = 0.0;
    for (int j = 0; j < surface.cells(); ++j)
        mismatch = std::max(mismatch, std::abs(surface.hvec2[j] - lambda));
    require(mismatch <= stcmc_tol, ErrorKind::precondition,
            "stability_b_field: surface is not lambda-STCMC within "
            "tolerance (mismatch = " +
                std::to_string(mismatch) + ")");
    return stability_b_field(surface,
                             std::vector<double>(surface.cells(), lambda));
}

std::vector<double> stability_b_field(const GraphSurface& surface,
                                      const std::vector<double>& hvec2_local) {
    const NullConeModel& model = *surface.model;
    const PolarGrid& grid = model.grid;
    const int n_cells = surface.cells();
    const int n = model.n;
    require(int(hvec2_local.size()) == n_cells, ErrorKind::parameter,
            "stability_b_field: coefficient size does not match the grid");

    // divergence of the torsion one-form, flux form, zero at the poles
    std::vector<double> div_tau(n_cells, 0.0);
    if (n_cells > 1) {
        std::vector<double> g(n_cells);
        for (int j = 0; j < n_cells; ++j)
            g[j] = surface.flux_coef[j] * surface.tau[j];
        for (int j = 0; j < n_cells; ++j) {
            double left = j > 0 ? 0.5 * (g[j - 1] + g[j]) : 0.0;
            double right = j + 1 < n_cells ? 0.5 * (g[j] + g[j + 1]) : 0.0;
            div_tau[j] = (right - left) / (grid.h * surface.sqrtg[j]);
        }
    }

    std::vector<double> b(n_cells);
    for (int j = 0; j < n_cells; ++j) {
        double tb = surface.theta_bar_on[j];
        double sh = surface.shear_on[j];
        double dev = 0.5 * (surface.chibar_a_on[j] - surface.chibar_b_on[j]);
        double tfchibar_dot_h = dev * (surface.h_mix_a[j] - surface.h_mix_b[j]);
        double a2 = surface.a_on[j] * surface.a_on[j];
        double tau_sq = surface.tau[j] * surface.tau[j] / a2;
        b[j] = -tfchibar_dot_h -
               0.5 * hvec2_local[j] *
                   (sh * sh / (tb * tb) + 2.0 / n +
                    surface.ricci_LL_on[j] / (tb * tb)) -
               div_tau[j] - tau_sq - surface.ricci_Lnu_on[j] -
               surface.weyl_on[j];
    }
    return b;
}

namespace {

struct Tridiag {
    std::vector<double> low, diag, up;
};

// rows of  L f = -Lap f - 2 tau(grad f) + B f  with even pole extension
Tridiag assemble_operator(const GraphSurface& surface,
                          const std::vector<double>& b_field) {
    const PolarGrid& grid = surface.model->grid;
    const int n = surface.cells();
    Tridiag m;
    m.low.assign(n, 0.0);
    m.up.assign(n, 0.0);
    m.diag = b_field;
    if (n == 1) return m;
    const double h = grid.h;
    for (int j = 0; j < n; ++j) {
        double cl = j > 0
                        ? 0.5 * (surface.flux_coef[j - 1] +
                                 surface.flux_coef[j])
                        : 0.0;
        double cr = j + 1 < n
                        ? 0.5 * (surface.flux_coef[j] +
                                 surface.flux_coef[j + 1])
                        : 0.0;
        double scale = 1.0 / (h * h * surface.sqrtg[j]);
        double advect = surface.tau[j] /
                        (surface.a_on[j] * surface.a_on[j] * h);
        // -Lap part
        double low = -scale * cl, up = -scale * cr;
        double diag = scale * (cl + cr);
        // -2 tau grad part (central difference, reflected at the poles)
        if (j > 0) low -= advect;
        else diag -= advect; // ghost f_{-1} = f_0
        if (j + 1 < n) up += advect;
        else diag += advect; // ghost f_n = f_{n-1}
        m.low[j] += low;
        m.up[j] += up;
        m.diag[j] += diag;
    }
    return m;
}

void apply(const Tridiag& m, const std::vector<double>& x,
           std::vector<double>& y) {
    const int n = int(x.size());
    for (int j = 0; j < n; ++j) {
        y[j] = m.diag[j] * x[j];
        if (j > 0) y[j] += m.low[j] * x[j - 1];
        if (j + 1 < n) y[j] += m.up[j] * x[j + 1];
    }
}

void solve_shifted(Tridiag m, double shift, std::vector<double>& x) {
    const int n = int(x.size());
    for (int j = 0; j < n; ++j) m.diag[j] -= shift;
    for (int j = 1; j < n; ++j) {
        double w = m.low[j] / m.diag[j - 1];
        m.diag[j] -= w * m.up[j - 1];
        x[j] -= w * x[j - 1];
    }
    x[n - 1] /= m.diag[n - 1];
    for (int j = n - 2; j >= 0; --j)
        x[j] = (x[j] - m.up[j] * x[j + 1]) / m.diag[j];
}

} // namespace

StabilityReport principal_eigenvalue(const GraphSurface& surface,
                                     const std::vector<double>& b_field,
                                     double threshold) {
    const int n = surface.cells();
    require(int(b_field.size()) == n, ErrorKind::parameter,
            "principal_eigenvalue: b_field size mismatch");

    StabilityReport rep;
    rep.threshold = threshold;
    rep.b_field = b_field;
    auto mm = std::minmax_element(b_field.begin(), b_field.end());
    rep.min_b = *mm.first;
    rep.max_b = *mm.second;
    rep.b_positive = rep.min_b > 0.0;

    Tridiag m = assemble_operator(surface, b_field);
    double bound = m.diag[0];
    for (int j = 0; j < n; ++j)
        bound = std::min(bound,
                         m.diag[j] - std::abs(m.low[j]) - std::abs(m.up[j]));
    const double shift = bound - 1.0;

    std::vector<double> v(n, 1.0), av(n);
    double op_norm = 1.0;
    for (int j = 0; j < n; ++j)
        op_norm = std::max(op_norm, std::abs(m.low[j]) + std::abs(m.diag[j]) +
                                        std::abs(m.up[j]));
    double mu = 0.0;
    const int max_iters = 500;
    int it = 0;
    for (; it < max_iters; ++it) {
        solve_shifted(m, shift, v);
        double sup = 0.0;
        for (double x : v) sup = std::max(sup, std::abs(x));
        require(sup > 0.0 && std::isfinite(sup), ErrorKind::solver,
                "principal_eigenvalue: inverse iteration collapsed");
        for (double& x : v) x /= sup;
        // g-volume Rayleigh quotient
        apply(m, v, av);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            double w = surface.sqrtg[j];
            num += w * v[j] * av[j];
            den += w * v[j] * v[j];
        }
        mu = num / den;
        double res = 0.0;
        for (int j = 0; j < n; ++j)
            res = std::max(res, std::abs(av[j] - mu * v[j]));
        rep.residual = res;
        if (res <= 1e-13 * op_norm) break;
    }
    require(it < max_iters, ErrorKind::solver,
            "principal_eigenvalue: no convergence in 500 iterations");

    double vmin = *std::min_element(v.begin(), v.end());
    double vmax = *std::max_element(v.begin(), v.end());
    if (vmax < 0.0) {
        for (double& x : v) x = -x;
        std::swap(vmin, vmax);
        vmin = -vmin;
    }
    require(vmin > 0.0, ErrorKind::solver,
            "principal_eigenvalue: eigenfunction lost positivity (advection "
            "too strong for this grid)");

    rep.eigenvalue = mu;
    rep.eigenfunction = std::move(v);
    rep.iterations = it + 1;
    rep.stable = rep.eigenvalue > threshold;
    return rep;
}

StabilityReport analyze_stability(const GraphSurface& surface, double lambda,
                                  double stcmc_tol, double threshold) {
    StabilityReport rep = principal_eigenvalue(
        surface, stability_b_field(surface, lambda, stcmc_tol), threshold);
    rep.lambda = lambda;
    return rep;
}

double slice_identity_residual(const NullConeModel& model, double s_hi,
                               int n_samples) {
    require(model.symmetric(), ErrorKind::parameter,
            "slice_identity_residual: symmetric models only");
    require(s_hi > 0.0 && s_hi < model.s_max && n_samples >= 2,
            ErrorKind::parameter, "slice_identity_residual: bad sample spec");
    double sup = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double s = s_hi * i / (n_samples - 1);
        GraphSurface slice = build_slice(model, s);
        double lambda = slice.hvec2[0];
        std::vector<double> b = stability_b_field(slice, lambda, 1e-12);
        double lhs = 2.0 * slice.theta_bar_on[0] * b[0];
        double rhs = 2.0 * (model.theta_ds(s, 0) * model.theta_bar(s, 0) +
                            model.theta(s, 0) * model.theta_bar_ds(s, 0));
        sup = std::max(sup, std::abs(lhs - rhs));
    }
    return sup;
}

} // namespace ncflow
