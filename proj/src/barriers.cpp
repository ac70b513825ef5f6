#include "ncflow/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncflow/errors.hpp"

namespace ncflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return out;
}

struct Extremum {
    double value;
    double s;
};

} // namespace

ConeConstants cone_constants(const NullConeModel& model, double s_lo,
                             double s_hi) {
    require(s_lo >= 0.0 && s_hi > s_lo && s_hi <= model.s_max,
            ErrorKind::parameter, "cone_constants: bad region [s_lo, s_hi]");

    Extremum rc_min{kInf, s_lo}, rc_max{-kInf, s_lo}, chi_max{-kInf, s_lo};
    auto scan = [&](const std::vector<double>& samples) {
        for (double s : samples) {
            for (int j = 0; j < model.grid.n_cells; ++j) {
                const double tb = model.theta_bar(s, j);
                require(tb > 0.0, ErrorKind::focal_point,
                        "cone_constants: theta_bar not positive in region");
                const double r = model.ricci_LL(s, j) / (tb * tb);
                const double x = model.shear_norm(s, j) / tb;
                if (r < rc_min.value) rc_min = {r, s};
                if (r > rc_max.value) rc_max = {r, s};
                if (x > chi_max.value) chi_max = {x, s};
            }
        }
    };

    const int coarse = 512;
    scan(linspace(s_lo, s_hi, coarse + 1));
    // one refinement pass around each extremizer
    const double step = (s_hi - s_lo) / coarse;
    for (const Extremum* e : {&rc_min, &rc_max, &chi_max}) {
        const double a = std::max(s_lo, e->s - 2.0 * step);
        const double b = std::min(s_hi, e->s + 2.0 * step);
        if (b > a) scan(linspace(a, b, 65));
    }

    ConeConstants out;
    out.c_r = rc_min.value;
    out.c_r_up = rc_max.value;
    out.c_chi = chi_max.value;
    out.ricci_nonneg = rc_min.value >= -1e-14;
    out.s_lo = s_lo;
    out.s_hi = s_hi;
    return out;
}

SandwichReport theta_bar_sandwich(const NullConeModel& model,
                                  const ConeConstants& constants,
                                  int n_samples, double slack) {
    require(constants.s_lo == 0.0, ErrorKind::parameter,
            "theta_bar_sandwich: comparison bounds anchor at s = 0");
    require(n_samples >= 2, ErrorKind::parameter,
            "theta_bar_sandwich: need at least two samples");
    const double n = model.n;
    const double dw = 1.0 + n * constants.c_r;
    const double dz = 1.0 + n * (constants.c_r_up +
                                 constants.c_chi * constants.c_chi);
    require(dw > 0.0 && dz > 0.0, ErrorKind::hypothesis,
            "theta_bar_sandwich: curvature constants leave no envelope");

    SandwichReport rep;
    rep.w_upper = n / dw;
    rep.z_lower = n / dz;
    rep.worst_low = -kInf;
    rep.worst_high = -kInf;
    for (double s : linspace(0.0, constants.s_hi, n_samples)) {
        const double lo = rep.z_lower / (rep.z_lower + s);
        const double hi = rep.w_upper / (rep.w_upper + s);
        for (int j = 0; j < model.grid.n_cells; ++j) {
            const double tb = model.theta_bar(s, j);
            rep.worst_low = std::max(rep.worst_low, lo - tb);
            rep.worst_high = std::max(rep.worst_high, tb - hi);
        }
    }
    rep.ok = rep.worst_low <= slack && rep.worst_high <= slack;
    return rep;
}

DiscriminantData discriminant(int n, double c_r, double c_chi,
                              double c_r_gap) {
    require(n >= 2, ErrorKind::parameter, "discriminant: dimension below 2");
    require(c_chi >= 0.0 && c_r_gap >= 0.0, ErrorKind::parameter,
            "discriminant: c_chi and the c_r gap must be nonnegative");
    const double nd = n;
    const double c_r_up = c_r + c_r_gap;
    const double dw = 1.0 + nd * c_r;
    const double dz = 1.0 + nd * (c_r_up + c_chi * c_chi);
    require(dw > 0.0 && dz > 0.0, ErrorKind::parameter,
            "discriminant: curvature constants too negative for the envelope");

    DiscriminantData d;
    d.n = n;
    d.c_r = c_r;
    d.c_chi = c_chi;
    d.c_r_gap = c_r_gap;
    d.branch = n <= 6 ? 1 : 2;
    d.w_upper = nd / dw;
    d.z_lower = nd / dz;

    std::ostringstream bad;
    if (c_r < 0.0) {
        bad << "ricci_LL >= 0 fails: c_r = " << c_r;
    } else if (d.branch == 1) {
        const double cap = 0.5 * c_r + (6.0 - nd) / (4.0 * nd);
        if (c_chi > cap + 1e-15)
            bad << "n <= 6 smallness fails: c_chi = " << c_chi
                << " > c_r/2 + (6-n)/(4n) = " << cap;
    } else {
        const double cap = (nd - 6.0) / (2.0 * nd);
        const double lhs = 2.0 * c_chi + c_chi * c_chi + c_r_up;
        if (lhs > cap + 1e-15)
            bad << "n >= 7 smallness fails: 2 c_chi + c_chi^2 + c_r_up = "
                << lhs << " > (n-6)/(2n) = " << cap;
    }
    d.violated = bad.str();
    d.hypothesis_ok = d.violated.empty();

    if (d.branch == 1) {
        const double q = (nd - 4.0) / (2.0 * nd) + 2.0 * c_chi;
        d.b_coef = (q > 0.0 ? d.w_upper : d.z_lower) * q;
    } else {
        d.b_coef = d.z_lower * ((nd - 4.0) / (2.0 * nd) - 2.0 * c_chi);
    }
    d.a0 = d.w_upper * d.w_upper *
               (1.0 / (nd * nd) - 0.5 * c_r + 1.5 * c_chi * c_chi +
                std::abs(4.0 - nd) / (2.0 * nd) * c_chi) ;
    d.script_d = (d.b_coef - 1.0) * (d.b_coef - 1.0) - 4.0 * d.a0;
    return d;
}

double discriminant_closed_form(int n, double c_r) {
    const double nd = n;
    const double w = nd / (1.0 + nd * c_r);
    return w * w *
           ((nd - 2.0) * (nd - 10.0) / (4.0 * nd * nd) +
            (nd + 6.0) / nd * c_r + c_r * c_r);
}

double height_bound(const DiscriminantData& data) {
    if (data.script_d >= 0.0) return kInf;
    return data.w_upper * std::expm1(kPi / std::sqrt(-data.script_d));
}

double TestFunction::mu(double s) const {
    const double x = s + w_upper;
    switch (kind) {
    case Kind::unit:
        return 1.0;
    case Kind::power:
        return std::pow(x, exponent);
    case Kind::oscillatory: {
        const double phase = freq * std::log1p(s / w_upper) + eta;
        const double trig =
            branch == 1 ? std::sin(phase) : std::cos(phase);
        return std::pow(x, exponent) * trig;
    }
    }
    return 1.0;
}

double TestFunction::mu_p(double s) const {
    const double x = s + w_upper;
    switch (kind) {
    case Kind::unit:
        return 0.0;
    case Kind::power:
        return exponent * std::pow(x, exponent - 1.0);
    case Kind::oscillatory: {
        const double phase = freq * std::log1p(s / w_upper) + eta;
        const double trig =
            branch == 1 ? std::sin(phase) : std::cos(phase);
        const double dtrig =
            branch == 1 ? std::cos(phase) : -std::sin(phase);
        return std::pow(x, exponent - 1.0) *
               (exponent * trig + freq * dtrig);
    }
    }
    return 0.0;
}

double TestFunction::mu_pp(double s) const {
    const double x = s + w_upper;
    switch (kind) {
    case Kind::unit:
        return 0.0;
    case Kind::power:
        return exponent * (exponent - 1.0) * std::pow(x, exponent - 2.0);
    case Kind::oscillatory: {
        const double phase = freq * std::log1p(s / w_upper) + eta;
        const double trig =
            branch == 1 ? std::sin(phase) : std::cos(phase);
        const double dtrig =
            branch == 1 ? std::cos(phase) : -std::sin(phase);
        const double q = exponent;
        return std::pow(x, q - 2.0) *
               ((q * (q - 1.0) - freq * freq) * trig +
                freq * (2.0 * q - 1.0) * dtrig);
    }
    }
    return 0.0;
}

double TestFunction::ode_residual(double s) const {
    if (kind == Kind::unit) return 0.0;
    const double x = s + w_upper;
    return a_delta / (x * x) * mu(s) + b_coef / x * mu_p(s) + mu_pp(s);
}

TestFunction build_test_function(const DiscriminantData& data, double delta,
                                 double eta, double s_end) {
    require(delta >= 0.0, ErrorKind::parameter,
            "build_test_function: delta must be nonnegative");
    require(s_end > 0.0, ErrorKind::parameter,
            "build_test_function: interval end must be positive");

    TestFunction tf;
    tf.branch = data.branch;
    tf.w_upper = data.w_upper;
    tf.b_coef = data.b_coef;
    tf.delta = delta;
    tf.a_delta = data.a0 + delta;
    tf.d_delta = data.script_d - 4.0 * delta;
    if (tf.d_delta >= 0.0) {
        tf.kind = TestFunction::Kind::power;
        tf.eta = 0.0;
        tf.exponent = 0.5 * (1.0 - data.b_coef + std::sqrt(tf.d_delta));
        tf.window_end = kInf;
        return tf;
    }

    require(eta > 0.0 && eta < 0.5 * kPi, ErrorKind::parameter,
            "build_test_function: oscillatory case needs eta in (0, pi/2)");
    tf.kind = TestFunction::Kind::oscillatory;
    tf.eta = eta;
    tf.exponent = 0.5 * (1.0 - data.b_coef);
    const double root = std::sqrt(-tf.d_delta);
    tf.freq = 0.5 * root;
    tf.window_end = data.w_upper * std::expm1((kPi - 2.0 * eta) / root);
    if (s_end >= tf.window_end) {
        std::ostringstream msg;
        msg << "test function window [0, " << tf.window_end
            << ") does not cover the requested interval [0, " << s_end << "]";
        fail(ErrorKind::interval, msg.str());
    }
    return tf;
}

std::vector<MuSample> sample_test_function(const TestFunction& tf,
                                           double s_end, int n_samples) {
    require(n_samples >= 2, ErrorKind::parameter,
            "sample_test_function: need at least two samples");
    require(s_end < tf.window_end, ErrorKind::interval,
            "sample_test_function: samples leave the validity window");
    std::vector<MuSample> out(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double s = s_end * static_cast<double>(i) / (n_samples - 1);
        out[i] = {s, tf.mu(s), tf.mu_p(s), tf.mu_pp(s), tf.ode_residual(s)};
    }
    return out;
}

double phi_upper_bound(const NullConeModel& model, double s, int j) {
    const double nd = model.n;
    const double tb = model.theta_bar(s, j);
    const double sh = model.shear_norm(s, j);
    return tb * tb / (nd * nd) - 0.5 * model.ricci_LL(s, j) +
           1.5 * sh * sh + std::abs(4.0 - nd) / (2.0 * nd) * tb * sh;
}

double psi_adverse_bound(const NullConeModel& model, double s, int j,
                         int branch) {
    const double nd = model.n;
    const double base = (nd - 4.0) / (2.0 * nd) * model.theta_bar(s, j);
    const double sh = model.shear_norm(s, j);
    return branch == 1 ? base + 2.0 * sh : base - 2.0 * sh;
}

BarrierCertificate build_certificate(const NullConeModel& model, double s_hi,
                                     double interval_end,
                                     const CertificateOptions& opts) {
    require(interval_end > 0.0 && interval_end <= s_hi, ErrorKind::parameter,
            "build_certificate: interval must sit inside the region");

    BarrierCertificate cert;
    cert.constants = cone_constants(model, 0.0, s_hi);
    cert.disc = discriminant(model.n, cert.constants.c_r, cert.constants.c_chi,
                             cert.constants.c_r_up - cert.constants.c_r);
    cert.interval_end = interval_end;
    cert.bound_height = height_bound(cert.disc);

    cert.phi_sup = -kInf;
    const int phi_samples = 1024;
    for (int i = 0; i <= phi_samples; ++i) {
        const double s = s_hi * static_cast<double>(i) / phi_samples;
        for (int j = 0; j < model.grid.n_cells; ++j)
            cert.phi_sup = std::max(cert.phi_sup, phi_upper_bound(model, s, j));
    }
    if (cert.phi_sup < 0.0) {
        // a constant test function already certifies the barrier
        cert.phi_negative = true;
        cert.mu.kind = TestFunction::Kind::unit;
        cert.mu.branch = cert.disc.branch;
        cert.mu.w_upper = cert.disc.w_upper;
        cert.mu.window_end = kInf;
        return cert;
    }

    if (!cert.disc.hypothesis_ok)
        fail(ErrorKind::hypothesis, "build_certificate: " + cert.disc.violated);

    double delta = opts.delta;
    if (delta <= 0.0) {
        delta = -1.0;
        for (int k = 0; k <= 60; ++k) {
            const double cand = std::ldexp(1.0, -k);
            const double d_delta = cert.disc.script_d - 4.0 * cand;
            if (d_delta >= 0.0) {
                delta = cand;
                break;
            }
            const double window =
                cert.disc.w_upper * std::expm1(kPi / std::sqrt(-d_delta));
            if (window >= 1.1 * interval_end) {
                delta = cand;
                break;
            }
        }
        if (delta < 0.0) {
            std::ostringstream msg;
            msg << "no margin fits: even the delta -> 0 window [0, "
                << height_bound(cert.disc)
                << ") cannot cover the requested interval [0, " << interval_end
                << "] with 10% slack";
            fail(ErrorKind::interval, msg.str());
        }
    }

    double eta = opts.eta;
    const double d_delta = cert.disc.script_d - 4.0 * delta;
    if (eta <= 0.0) {
        if (d_delta >= 0.0) {
            eta = 0.0;
        } else {
            const double used = std::sqrt(-d_delta) *
                                std::log1p(1.1 * interval_end /
                                           cert.disc.w_upper);
            const double remaining = kPi - used;
            require(remaining > 0.0, ErrorKind::interval,
                    "build_certificate: window consumed by the interval");
            eta = std::min(kPi / 8.0, 0.5 * remaining);
        }
    }

    cert.delta = delta;
    cert.eta = eta;
    cert.mu = build_test_function(cert.disc, delta, eta, interval_end);
    return cert;
}

KeyInequalityReport key_inequality_monitor(const NullConeModel& model,
                                           const FlowRun& run,
                                           const BarrierCertificate& cert) {
    require(!run.snapshots.empty(), ErrorKind::parameter,
            "key_inequality_monitor: run carries no snapshots");

    KeyInequalityReport rep;
    rep.min_margin = kInf;
    rep.min_reference = kInf;
    rep.min_ratio = kInf;
    const bool unit = cert.mu.kind == TestFunction::Kind::unit;
    for (const auto& snapshot : run.snapshots) {
        for (std::size_t j = 0; j < snapshot.size(); ++j) {
            const double s = snapshot[j];
            require(s < cert.mu.window_end, ErrorKind::interval,
                    "key_inequality_monitor: leaf leaves the mu window");
            const int cell = static_cast<int>(j);
            const double phi = phi_upper_bound(model, s, cell);
            double margin;
            if (unit) {
                margin = -phi;
            } else {
                const double psi =
                    psi_adverse_bound(model, s, cell, cert.disc.branch);
                margin = -(phi * cert.mu.mu(s) + psi * cert.mu.mu_p(s) +
                           cert.mu.mu_pp(s));
            }
            const double x = s + cert.disc.w_upper;
            const double reference =
                unit ? 0.0 : cert.delta * cert.mu.mu(s) / (x * x);
            rep.min_margin = std::min(rep.min_margin, margin);
            rep.min_reference = std::min(rep.min_reference, reference);
            if (reference > 0.0)
                rep.min_ratio = std::min(rep.min_ratio, margin / reference);
            ++rep.points_checked;
        }
    }
    rep.ok = rep.min_margin > 0.0;
    return rep;
}

} // namespace ncflow
