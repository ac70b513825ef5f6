#include "ncflow/background.hpp"

#include <cmath>
#include <memory>

namespace ncflow {

namespace {

constexpr int kOpticalSteps = 4096; // fixed RK4 resolution along generators

double zero2(double, double) { return 0.0; }

std::function<double(double, double)> or_zero(
    const std::function<double(double, double)>& f) {
    return f ? f : zero2;
}

} // namespace

void fill_slopes_by_differences(SampledField& f) {
    const int k_max = f.steps();
    const double ds = f.step();
    for (int j = 0; j < f.columns(); ++j) {
        for (int k = 1; k < k_max; ++k)
            f.slope_at(k, j) =
                (f.value_at(k + 1, j) - f.value_at(k - 1, j)) / (2.0 * ds);
        f.slope_at(0, j) = (-3.0 * f.value_at(0, j) + 4.0 * f.value_at(1, j) -
                            f.value_at(2, j)) /
                           (2.0 * ds);
        f.slope_at(k_max, j) =
            (3.0 * f.value_at(k_max, j) - 4.0 * f.value_at(k_max - 1, j) +
             f.value_at(k_max - 2, j)) /
            (2.0 * ds);
    }
}

NullConeModel make_minkowski(int n, double r0, double s_max, int n_theta) {
    require(n >= 2, ErrorKind::parameter, "make_minkowski: n must be >= 2");
    require(r0 > 0.0, ErrorKind::parameter, "make_minkowski: r0 must be > 0");
    require(s_max > 0.0, ErrorKind::parameter,
            "make_minkowski: Lambda must be > 0");
    require(n_theta == 1 || n == 2, ErrorKind::parameter,
            "make_minkowski: axisymmetric grids require n = 2");

    NullConeModel m;
    m.family = "minkowski";
    m.n = n;
    m.s_max = s_max;
    m.grid = PolarGrid::make(n_theta);
    m.params = {{"n", double(n)}, {"r0", r0}, {"Lambda", s_max}};

    const double nn = n;
    auto radius = [r0, nn](double s) { return r0 * (1.0 + s / nn); };
    m.theta_bar = [nn](double s, int) { return nn / (nn + s); };
    m.theta_bar_ds = [nn](double s, int) {
        double tb = nn / (nn + s);
        return -tb * tb / nn;
    };
    m.theta = [nn, r0](double s, int) {
        return nn * nn * nn / (2.0 * r0 * r0 * (nn + s));
    };
    m.theta_ds = [nn, r0](double s, int) {
        return -nn * nn * nn / (2.0 * r0 * r0 * (nn + s) * (nn + s));
    };
    m.metric_a = [radius](double s, int) { return radius(s); };
    m.metric_b = m.metric_a;
    m.chibar_aa = [nn](double s, int) { return 1.0 / (nn + s); };
    m.chibar_bb = m.chibar_aa;
    m.shear_norm = constant_field(0.0);
    m.zeta_theta = constant_field(0.0);
    m.ricci_LL = constant_field(0.0);
    m.ricci_Lnu = constant_field(0.0);
    m.weyl_nLnL = constant_field(0.0);
    return m;
}

NullConeModel make_schwarzschild(double mass, double r0, double s_max,
                                 int n_theta) {
    require(mass > 0.0, ErrorKind::parameter,
            "make_schwarzschild: mass must be > 0");
    require(r0 > 0.0, ErrorKind::parameter,
            "make_schwarzschild: r0 must be > 0");
    require(s_max > 0.0, ErrorKind::parameter,
            "make_schwarzschild: Lambda must be > 0");

    NullConeModel m;
    m.family = "schwarzschild";
    m.n = 2;
    m.s_max = s_max;
    m.grid = PolarGrid::make(n_theta);
    m.params = {{"M", mass}, {"r0", r0}, {"Lambda", s_max}};

    auto radius = [r0](double s) { return r0 * (1.0 + 0.5 * s); };
    m.theta_bar = [r0, radius](double s, int) { return r0 / radius(s); };
    m.theta_bar_ds = [r0, radius](double s, int) {
        double r = radius(s); // d/ds (r0/r) with dr/ds = r0/2
        return -0.5 * r0 * r0 / (r * r);
    };
    m.theta = [mass, r0, radius](double s, int) {
        double r = radius(s);
        return (1.0 / r - 2.0 * mass / (r * r)) / (2.0 * r0);
    };
    m.theta_ds = [mass, radius](double s, int) {
        double r = radius(s);
        return (-1.0 / (r * r) + 4.0 * mass / (r * r * r)) / 4.0;
    };
    m.metric_a = [radius](double s, int) { return radius(s); };
    m.metric_b = m.metric_a;
    m.chibar_aa = [r0, radius](double s, int) {
        return 0.5 * r0 / radius(s);
    };
    m.chibar_bb = m.chibar_aa;
    m.shear_norm = constant_field(0.0);
    m.zeta_theta = constant_field(0.0);
    m.ricci_LL = constant_field(0.0);
    m.ricci_Lnu = constant_field(0.0);
    m.weyl_nLnL = [mass, radius](double s, int) {
        double r = radius(s);
        return -0.5 * mass / (r * r * r);
    };
    return m;
}

NullConeModel make_perturbed_axisymmetric(const NullConeModel& base,
                                          const Perturbations& pert) {
    require(base.grid.n_cells == 1 || base.n == 2, ErrorKind::parameter,
            "make_perturbed_axisymmetric: axisymmetric base requires n = 2");

    const int n_cells = base.grid.n_cells;
    const int n = base.n;
    const double s_max = base.s_max;
    const PolarGrid grid = base.grid;
    const bool axisym = n_cells > 1;

    auto shear = or_zero(pert.shear);
    auto ricci_LL = or_zero(pert.ricci_LL);
    auto ricci_Lnu = or_zero(pert.ricci_Lnu);
    auto zeta = or_zero(pert.zeta_theta);
    auto weyl_extra = or_zero(pert.weyl_extra);

    auto tb = std::make_shared<SampledField>(s_max, kOpticalSteps, n_cells);
    auto ma = std::make_shared<SampledField>(s_max, kOpticalSteps, n_cells);
    auto mb = std::make_shared<SampledField>(s_max, kOpticalSteps, n_cells);

    const double ds = s_max / kOpticalSteps;
    for (int j = 0; j < n_cells; ++j) {
        const double th = grid.theta[j];
        // state y = (theta_bar, a, b); the metric follows the perturbed
        // chibar, whose trace-free principal value is k = |shear| / sqrt(2)
        // (axisymmetric sign convention: + on the d theta^2 factor).
        auto rhs = [&](double s, const double* y, double* dy) {
            double sh = shear(s, th);
            double k = axisym ? sh / std::sqrt(2.0) : 0.0;
            dy[0] = -sh * sh - y[0] * y[0] / n - ricci_LL(s, th);
            dy[1] = (y[0] / n + k) * y[1];
            dy[2] = (y[0] / n - k) * y[2];
        };
        double y[3] = {1.0, base.metric_a(0.0, j), base.metric_b(0.0, j)};
        double dy[3];
        rhs(0.0, y, dy);
        tb->value_at(0, j) = y[0];
        tb->slope_at(0, j) = dy[0];
        ma->value_at(0, j) = y[1];
        ma->slope_at(0, j) = dy[1];
        mb->value_at(0, j) = y[2];
        mb->slope_at(0, j) = dy[2];
        for (int k = 0; k < kOpticalSteps; ++k) {
            double s = k * ds;
            double k1[3], k2[3], k3[3], k4[3], yt[3];
            rhs(s, y, k1);
            for (int i = 0; i < 3; ++i) yt[i] = y[i] + 0.5 * ds * k1[i];
            rhs(s + 0.5 * ds, yt, k2);
            for (int i = 0; i < 3; ++i) yt[i] = y[i] + 0.5 * ds * k2[i];
            rhs(s + 0.5 * ds, yt, k3);
            for (int i = 0; i < 3; ++i) yt[i] = y[i] + ds * k3[i];
            rhs(s + ds, yt, k4);
            for (int i = 0; i < 3; ++i)
                y[i] += ds / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if (!(y[0] > 1e-10))
                fail(ErrorKind::focal_point,
                     "make_perturbed_axisymmetric: theta_bar reached zero "
                     "near s = " +
                         std::to_string(s + ds));
            rhs(s + ds, y, dy);
            tb->value_at(k + 1, j) = y[0];
            tb->slope_at(k + 1, j) = dy[0];
            ma->value_at(k + 1, j) = y[1];
            ma->slope_at(k + 1, j) = dy[1];
            mb->value_at(k + 1, j) = y[2];
            mb->slope_at(k + 1, j) = dy[2];
        }
    }

    // Keep the base hvec2 profile: theta = Q / (2 theta_bar) with
    // Q = 2 theta_base theta_bar_base.
    auto q_of = [base](double s, int j) {
        return 2.0 * base.theta(s, j) * base.theta_bar(s, j);
    };
    auto q_ds_of = [base](double s, int j) {
        return 2.0 * (base.theta_ds(s, j) * base.theta_bar(s, j) +
                      base.theta(s, j) * base.theta_bar_ds(s, j));
    };

    NullConeModel m;
    m.family = base.family + "+perturbed";
    m.n = n;
    m.s_max = s_max;
    m.grid = grid;
    m.params = base.params;

    m.theta_bar = [tb](double s, int j) { return tb->eval(s, j).first; };
    m.theta_bar_ds = [tb](double s, int j) { return tb->eval(s, j).second; };
    m.metric_a = [ma](double s, int j) { return ma->eval(s, j).first; };
    m.metric_b = [mb](double s, int j) { return mb->eval(s, j).first; };
    m.theta = [tb, q_of](double s, int j) {
        return q_of(s, j) / (2.0 * tb->eval(s, j).first);
    };
    m.theta_ds = [tb, q_of, q_ds_of](double s, int j) {
        auto [v, d] = tb->eval(s, j);
        double th = q_of(s, j) / (2.0 * v);
        return (q_ds_of(s, j) - 2.0 * th * d) / (2.0 * v);
    };
    auto k_of = [shear, grid, axisym](double s, int j) {
        return axisym ? shear(s, grid.theta[j]) / std::sqrt(2.0) : 0.0;
    };
    m.chibar_aa = [tb, k_of, n](double s, int j) {
        return tb->eval(s, j).first / n + k_of(s, j);
    };
    m.chibar_bb = [tb, k_of, n](double s, int j) {
        return tb->eval(s, j).first / n - k_of(s, j);
    };
    m.shear_norm = [shear, grid](double s, int j) {
        return shear(s, grid.theta[j]);
    };
    m.zeta_theta = [zeta, grid](double s, int j) {
        return zeta(s, grid.theta[j]);
    };
    m.ricci_LL = [ricci_LL, grid](double s, int j) {
        return ricci_LL(s, grid.theta[j]);
    };
    m.ricci_Lnu = [ricci_Lnu, grid](double s, int j) {
        return ricci_Lnu(s, grid.theta[j]);
    };

    // weyl_nLnL from the slice cross-focusing identity,
    //   d theta / ds = -( (theta/n) theta_bar + div zeta + |zeta|^2
    //                     + ricci_Lnu + weyl ),
    // evaluated on the integration nodes; gamma-divergence of zeta in flux
    // form with zero flux through the poles.
    auto wf = std::make_shared<SampledField>(s_max, kOpticalSteps, n_cells);
    {
        std::vector<double> flux(n_cells + 1, 0.0), g(n_cells, 0.0);
        for (int k = 0; k <= kOpticalSteps; ++k) {
            double s = k * ds;
            for (int j = 0; j < n_cells; ++j) {
                double a = ma->value_at(k, j), b = mb->value_at(k, j);
                g[j] = b * grid.sin_center[j] * zeta(s, grid.theta[j]) / a;
            }
            for (int j = 1; j < n_cells; ++j)
                flux[j] = 0.5 * (g[j - 1] + g[j]);
            flux[0] = 0.0;
            flux[n_cells] = 0.0;
            for (int j = 0; j < n_cells; ++j) {
                double a = ma->value_at(k, j), b = mb->value_at(k, j);
                double div = axisym ? (flux[j + 1] - flux[j]) /
                                          (grid.h * a * b * grid.sin_center[j])
                                    : 0.0;
                double zj = zeta(s, grid.theta[j]);
                double zeta_sq = (zj / a) * (zj / a);
                wf->value_at(k, j) =
                    -m.theta_ds(s, j) -
                    m.theta(s, j) * m.theta_bar(s, j) / n - div - zeta_sq -
                    ricci_Lnu(s, grid.theta[j]) +
                    weyl_extra(s, grid.theta[j]);
            }
        }
        fill_slopes_by_differences(*wf);
    }
    m.weyl_nLnL = [wf](double s, int j) { return wf->eval(s, j).first; };
    return m;
}

RaychaudhuriResidual raychaudhuri_residual(const NullConeModel& model,
                                           double h, int n_samples) {
    require(h > 0.0 && n_samples >= 1, ErrorKind::parameter,
            "raychaudhuri_residual: need h > 0 and n_samples >= 1");
    RaychaudhuriResidual out;
    const double span = model.s_max - h;
    require(span > 0.0, ErrorKind::parameter,
            "raychaudhuri_residual: h exceeds the domain");
    for (int j = 0; j < model.grid.n_cells; ++j) {
        for (int i = 0; i < n_samples; ++i) {
            double s = span * i / std::max(1, n_samples - 1);
            double fd =
                (model.theta_bar(s + h, j) - model.theta_bar(s, j)) / h;
            double sm = s + 0.5 * h;
            double sh = model.shear_norm(sm, j);
            double tb = model.theta_bar(sm, j);
            double rhs = -sh * sh - tb * tb / model.n - model.ricci_LL(sm, j);
            double r = std::abs(fd - rhs);
            if (r > out.sup) {
                out.sup = r;
                out.at_s = s;
                out.at_cell = j;
            }
        }
    }
    return out;
}

} // namespace ncflow
