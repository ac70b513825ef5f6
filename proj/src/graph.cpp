#include "ncflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncflow {

namespace {

// central difference of cell data with even pole extension
double central(const PolarGrid& g, const std::vector<double>& v, int j) {
    return (v[g.reflect(j + 1)] - v[g.reflect(j - 1)]) / (2.0 * g.h);
}

double second(const PolarGrid& g, const std::vector<double>& v, int j) {
    return (v[g.reflect(j + 1)] - 2.0 * v[j] + v[g.reflect(j - 1)]) /
           (g.h * g.h);
}

} // namespace

GraphSurface build_surface(const NullConeModel& model,
                           const std::vector<double>& omega) {
    const PolarGrid& grid = model.grid;
    const int n_cells = grid.n_cells;
    require(int(omega.size()) == n_cells, ErrorKind::parameter,
            "build_surface: omega size does not match the grid");

    GraphSurface s;
    s.model = &model;
    s.omega = omega;
    auto resize_all = [&](auto&... vecs) { (vecs.resize(n_cells), ...); };
    resize_all(s.a_on, s.bs_on, s.sqrtg, s.flux_coef, s.theta_bar_on,
               s.theta_on, s.shear_on, s.zeta_on, s.ricci_LL_on,
               s.ricci_Lnu_on, s.weyl_on, s.chibar_a_on, s.chibar_b_on,
               s.omega_p, s.u, s.lap, s.H, s.hvec2, s.tau, s.h_mix_a,
               s.h_mix_b);

    for (int j = 0; j < n_cells; ++j) {
        double w = omega[j];
        require(std::isfinite(w), ErrorKind::domain,
                "build_surface: non-finite omega");
        require(w >= 0.0 && w < model.s_max, ErrorKind::domain,
                "build_surface: omega left [0, Lambda)");
        s.a_on[j] = model.metric_a(w, j);
        s.bs_on[j] = model.metric_b(w, j) * grid.sin_center[j];
        s.sqrtg[j] = s.a_on[j] * s.bs_on[j];
        s.flux_coef[j] = s.bs_on[j] / s.a_on[j];
        s.theta_bar_on[j] = model.theta_bar(w, j);
        s.theta_on[j] = model.theta(w, j);
        s.shear_on[j] = model.shear_norm(w, j);
        s.zeta_on[j] = model.zeta_theta(w, j);
        s.ricci_LL_on[j] = model.ricci_LL(w, j);
        s.ricci_Lnu_on[j] = model.ricci_Lnu(w, j);
        s.weyl_on[j] = model.weyl_nLnL(w, j);
        s.chibar_a_on[j] = model.chibar_aa(w, j);
        s.chibar_b_on[j] = model.chibar_bb(w, j);
    }

    // flux-form Laplace-Beltrami; pole faces carry zero flux
    std::vector<double> face(n_cells + 1, 0.0);
    for (int j = 1; j < n_cells; ++j)
        face[j] = 0.5 * (s.flux_coef[j - 1] + s.flux_coef[j]) *
                  (omega[j] - omega[j - 1]) / grid.h;

    const int n = model.n;
    for (int j = 0; j < n_cells; ++j) {
        double wp = central(grid, omega, j);
        double a2 = s.a_on[j] * s.a_on[j];
        s.omega_p[j] = wp;
        s.u[j] = 0.5 * wp * wp / a2;
        s.lap[j] =
            n_cells == 1 ? 0.0
                         : (face[j + 1] - face[j]) / (grid.h * s.sqrtg[j]);
        double zeta_grad = s.zeta_on[j] * wp / a2;
        s.H[j] = s.theta_on[j] - 2.0 * zeta_grad +
                 s.u[j] * s.theta_bar_on[j] - s.lap[j];
        s.hvec2[j] = 2.0 * s.H[j] * s.theta_bar_on[j];
        s.tau[j] = s.zeta_on[j] - s.chibar_a_on[j] * wp;
        require(std::isfinite(s.H[j]) && std::isfinite(s.u[j]),
                ErrorKind::discretization,
                "build_surface: non-finite discrete curvature (grid too "
                "coarse for this omega)");
    }

    // principal mixed components of the second fundamental form:
    // h_ij = chi_ij - omega_i zeta_j - omega_j zeta_i + u chibar_ij
    //        - Hess_ij omega, with the round cross-section chi = (theta/n) g.
    if (n_cells == 1) {
        s.h_mix_a[0] = s.H[0] / n;
        s.h_mix_b[0] = s.H[0] / n;
    } else {
        std::vector<double> g_phph(n_cells);
        for (int j = 0; j < n_cells; ++j)
            g_phph[j] = s.bs_on[j] * s.bs_on[j];
        for (int j = 0; j < n_cells; ++j) {
            double wp = s.omega_p[j];
            double a2 = s.a_on[j] * s.a_on[j];
            double gamma_tt = central(grid, s.a_on, j) / s.a_on[j];
            double hess_tt = second(grid, s.omega, j) - gamma_tt * wp;
            double hess_pp = 0.5 * central(grid, g_phph, j) * wp / a2;
            double round = s.theta_on[j] / n;
            s.h_mix_a[j] = round + s.u[j] * s.chibar_a_on[j] +
                           (-2.0 * wp * s.zeta_on[j] - hess_tt) / a2;
            s.h_mix_b[j] =
                round + s.u[j] * s.chibar_b_on[j] - hess_pp / g_phph[j];
        }
    }

    s.min_omega = *std::min_element(omega.begin(), omega.end());
    s.max_omega = *std::max_element(omega.begin(), omega.end());
    s.max_u = *std::max_element(s.u.begin(), s.u.end());
    s.min_hvec2 = *std::min_element(s.hvec2.begin(), s.hvec2.end());
    s.max_hvec2 = *std::max_element(s.hvec2.begin(), s.hvec2.end());
    return s;
}

GraphSurface build_slice(const NullConeModel& model, double s) {
    return build_surface(model,
                         std::vector<double>(model.grid.n_cells, s));
}

const std::vector<double>& torsion_tau(const GraphSurface& surface) {
    return surface.tau;
}

std::vector<double> surface_laplacian(const GraphSurface& surface,
                                      const std::vector<double>& field) {
    const PolarGrid& grid = surface.model->grid;
    const int n = surface.cells();
    require(int(field.size()) == n, ErrorKind::parameter,
            "surface_laplacian: field size does not match the grid");
    std::vector<double> out(n, 0.0);
    if (n == 1) return out;
    std::vector<double> face(n + 1, 0.0);
    for (int j = 1; j < n; ++j)
        face[j] = 0.5 * (surface.flux_coef[j - 1] + surface.flux_coef[j]) *
                  (field[j] - field[j - 1]) / grid.h;
    for (int j = 0; j < n; ++j)
        out[j] = (face[j + 1] - face[j]) / (grid.h * surface.sqrtg[j]);
    return out;
}

std::vector<double> surface_gradient(const GraphSurface& surface,
                                     const std::vector<double>& field) {
    const PolarGrid& grid = surface.model->grid;
    const int n = surface.cells();
    require(int(field.size()) == n, ErrorKind::parameter,
            "surface_gradient: field size does not match the grid");
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = central(grid, field, j);
    return out;
}

CurvatureProxy curvature_proxy(const GraphSurface& surface) {
    const NullConeModel& m = *surface.model;
    CurvatureProxy out;
    for (int j = 0; j < surface.cells(); ++j) {
        double dev_h = 0.5 * (surface.h_mix_a[j] - surface.h_mix_b[j]);
        double h_norm = std::sqrt(surface.H[j] * surface.H[j] / m.n +
                                  2.0 * dev_h * dev_h);
        double sh = surface.shear_on[j];
        double tb = surface.theta_bar_on[j];
        double chibar_norm = std::sqrt(sh * sh + tb * tb / m.n);
        out.value = std::max(out.value, h_norm + chibar_norm);
        if (std::abs(surface.omega_p[j]) * m.grid.h > 0.1 * m.s_max)
            out.steep = true;
    }
    return out;
}

ComparisonFlag strong_comparison_flag(const GraphSurface& a,
                                      const GraphSurface& b, double tol) {
    require(a.cells() == b.cells(), ErrorKind::parameter,
            "strong_comparison_flag: mismatched grids");
    ComparisonFlag f;
    double min_gap = std::numeric_limits<double>::infinity();
    double max_gap = -min_gap;
    f.ordered = true;
    f.hvec2_dominates = true;
    for (int j = 0; j < a.cells(); ++j) {
        double gap = b.omega[j] - a.omega[j];
        min_gap = std::min(min_gap, gap);
        max_gap = std::max(max_gap, gap);
        if (gap < -tol) f.ordered = false;
        if (b.hvec2[j] < a.hvec2[j] - tol) f.hvec2_dominates = false;
    }
    f.touching = min_gap <= tol;
    f.identical = max_gap <= tol && min_gap >= -tol;
    f.violation =
        f.ordered && f.touching && !f.identical && f.hvec2_dominates;
    return f;
}

} // namespace ncflow
