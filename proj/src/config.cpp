#include "ncflow/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ncflow/errors.hpp"

namespace ncflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']' && line.size() > 2,
                    ErrorKind::parameter,
                    "config line " + std::to_string(lineno) +
                        ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::parameter,
                "config line " + std::to_string(lineno) +
                    ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty() && !value.empty(), ErrorKind::parameter,
                "config line " + std::to_string(lineno) +
                    ": empty key or value");
        auto& sec = cfg.sections_[section];
        require(!sec.count(key), ErrorKind::parameter,
                "config: duplicate key [" + section + "] " + key);
        sec[key] = Entry{value, false};
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& section,
                         const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key);
}

std::string KeyValueConfig::get_string(const std::string& section,
                                       const std::string& key,
                                       const std::string& fallback) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto e = s->second.find(key);
    if (e == s->second.end()) return fallback;
    e->second.used = true;
    return e->second.value;
}

double KeyValueConfig::get_number(const std::string& section,
                                  const std::string& key, double fallback) {
    const std::string raw = get_string(section, key, "");
    if (raw.empty()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    require(end && *end == '\0' && std::isfinite(v), ErrorKind::parameter,
            "config: [" + section + "] " + key + " = " + raw +
                " is not a number");
    return v;
}

long KeyValueConfig::get_integer(const std::string& section,
                                 const std::string& key, long fallback) {
    const std::string raw = get_string(section, key, "");
    if (raw.empty()) return fallback;
    char* end = nullptr;
    const long v = std::strtol(raw.c_str(), &end, 10);
    require(end && *end == '\0', ErrorKind::parameter,
            "config: [" + section + "] " + key + " = " + raw +
                " is not an integer");
    return v;
}

bool KeyValueConfig::get_flag(const std::string& section,
                              const std::string& key, bool fallback) {
    const std::string raw = get_string(section, key, "");
    if (raw.empty()) return fallback;
    if (raw == "true" || raw == "yes" || raw == "1") return true;
    if (raw == "false" || raw == "no" || raw == "0") return false;
    fail(ErrorKind::parameter,
         "config: [" + section + "] " + key + " = " + raw +
             " is not a boolean");
}

void KeyValueConfig::require_consumed() const {
    for (const auto& [section, entries] : sections_)
        for (const auto& [key, entry] : entries)
            require(entry.used, ErrorKind::parameter,
                    "config: unknown key [" + section + "] " + key);
}

namespace {

Perturbations make_perturbations(KeyValueConfig& cfg, nlohmann::json& m) {
    const double shear_amp = cfg.get_number("model", "shear_amp", 0.0);
    const double ricci_amp = cfg.get_number("model", "ricci_amp", 0.0);
    const double ricci_cos = cfg.get_number("model", "ricci_cos", 0.0);
    const double ricci_lnu_amp =
        cfg.get_number("model", "ricci_lnu_amp", 0.0);
    const double zeta_amp = cfg.get_number("model", "zeta_amp", 0.0);
    const double weyl_extra_amp =
        cfg.get_number("model", "weyl_extra_amp", 0.0);
    const int n = int(cfg.get_integer("model", "n", 2));
    require(std::abs(ricci_cos) <= 1.0, ErrorKind::parameter,
            "config: |ricci_cos| must be <= 1 to keep ricci_LL one-signed");

    m["shear_amp"] = shear_amp;
    m["ricci_amp"] = ricci_amp;
    m["ricci_cos"] = ricci_cos;
    m["ricci_lnu_amp"] = ricci_lnu_amp;
    m["zeta_amp"] = zeta_amp;
    m["weyl_extra_amp"] = weyl_extra_amp;

    Perturbations p;
    if (shear_amp != 0.0)
        p.shear = [shear_amp](double s, double th) {
            const double sn = std::sin(th);
            return shear_amp * sn * sn / (1.0 + s);
        };
    if (ricci_amp != 0.0)
        p.ricci_LL = [ricci_amp, ricci_cos, n](double s, double th) {
            const double tb = n / (n + s);
            return ricci_amp * (1.0 + ricci_cos * std::cos(th)) * tb * tb;
        };
    if (ricci_lnu_amp != 0.0)
        p.ricci_Lnu = [ricci_lnu_amp](double s, double th) {
            return ricci_lnu_amp * (1.0 + 0.5 * std::cos(th)) /
                   ((1.0 + s) * (1.0 + s));
        };
    if (zeta_amp != 0.0)
        p.zeta_theta = [zeta_amp](double s, double th) {
            return zeta_amp * std::sin(th) / (1.0 + s);
        };
    if (weyl_extra_amp != 0.0)
        p.weyl_extra = [weyl_extra_amp](double s, double th) {
            const double c = 1.0 + s;
            return weyl_extra_amp * std::cos(th) / (c * c * c);
        };
    return p;
}

} // namespace

NullConeModel make_model(KeyValueConfig& cfg, nlohmann::json& manifest) {
    nlohmann::json& m = manifest["model"];
    const std::string family = cfg.get_string("model", "family", "");
    require(!family.empty(), ErrorKind::parameter,
            "config: [model] family is required");
    const double r0 = cfg.get_number("model", "r0", 1.0);
    const double lambda_height = cfg.get_number("model", "Lambda", 2.0);
    const int n_theta = int(cfg.get_integer("model", "n_theta", 1));
    m["family"] = family;
    m["r0"] = r0;
    m["Lambda"] = lambda_height;
    m["n_theta"] = n_theta;

    auto base_of = [&](const std::string& name) {
        if (name == "minkowski") {
            const int n = int(cfg.get_integer("model", "n", 2));
            m["n"] = n;
            return make_minkowski(n, r0, lambda_height, n_theta);
        }
        if (name == "schwarzschild") {
            const int n = int(cfg.get_integer("model", "n", 2));
            require(n == 2, ErrorKind::parameter,
                    "config: the schwarzschild family is two dimensional");
            const double mass = cfg.get_number("model", "M", 1.0);
            m["n"] = n;
            m["M"] = mass;
            return make_schwarzschild(mass, r0, lambda_height, n_theta);
        }
        fail(ErrorKind::parameter, "config: unknown model family " + name);
    };

    if (family == "minkowski" || family == "schwarzschild")
        return base_of(family);

    require(family == "perturbed", ErrorKind::parameter,
            "config: unknown model family " + family);
    const std::string base = cfg.get_string("model", "base", "schwarzschild");
    m["base"] = base;
    NullConeModel base_model = base_of(base);
    return make_perturbed_axisymmetric(base_model,
                                       make_perturbations(cfg, m));
}

Prescription make_prescription(KeyValueConfig& cfg,
                               const NullConeModel& model,
                               nlohmann::json& manifest) {
    nlohmann::json& m = manifest["prescription"];
    const std::string kind = cfg.get_string("prescription", "kind", "stcmc");
    m["kind"] = kind;
    if (kind == "stcmc") {
        const double lambda = cfg.get_number("prescription", "lambda", 0.0);
        require(lambda >= 0.0, ErrorKind::parameter,
                "config: [prescription] lambda must be >= 0");
        m["lambda"] = lambda;
        return Prescription::stcmc(lambda);
    }
    require(kind == "prescribed", ErrorKind::parameter,
            "config: [prescription] kind must be stcmc or prescribed");
    const std::string profile =
        cfg.get_string("prescription", "profile", "ramp");
    require(profile == "ramp", ErrorKind::parameter,
            "config: unknown prescription profile " + profile);
    const double a = cfg.get_number("prescription", "ramp_a", 1.2);
    const double b = cfg.get_number("prescription", "ramp_b", -0.4);
    m["profile"] = profile;
    m["ramp_a"] = a;
    m["ramp_b"] = b;
    const NullConeModel* mp = &model;
    auto rho = [mp, a, b](double s, int j) {
        return mp->hvec2_slice(s, j) * (a + b * s);
    };
    auto rho_ds = [mp, a, b](double s, int j) {
        const double p = mp->hvec2_slice(s, j);
        const double pp = 2.0 * (mp->theta_ds(s, j) * mp->theta_bar(s, j) +
                                 mp->theta(s, j) * mp->theta_bar_ds(s, j));
        return pp * (a + b * s) + p * b;
    };
    return Prescription::prescribed(rho, rho_ds);
}

FlowOptions make_flow_options(KeyValueConfig& cfg, nlohmann::json& manifest) {
    FlowOptions o;
    o.tol = cfg.get_number("flow", "tol", o.tol);
    o.dt_max = cfg.get_number("flow", "dt_max", o.dt_max);
    o.cfl = cfg.get_number("flow", "cfl", o.cfl);
    o.dt_min = cfg.get_number("flow", "dt_min", o.dt_min);
    o.growth = cfg.get_number("flow", "growth", o.growth);
    o.adaptive_dt = cfg.get_flag("flow", "adaptive_dt", o.adaptive_dt);
    o.max_time = cfg.get_number("flow", "max_time", o.max_time);
    o.max_steps = cfg.get_integer("flow", "max_steps", o.max_steps);
    o.record_stride =
        int(cfg.get_integer("flow", "record_stride", o.record_stride));
    nlohmann::json& m = manifest["flow"];
    m["tol"] = o.tol;
    m["dt_max"] = o.dt_max;
    m["cfl"] = o.cfl;
    m["dt_min"] = o.dt_min;
    m["growth"] = o.growth;
    m["adaptive_dt"] = o.adaptive_dt;
    m["max_time"] = o.max_time;
    m["max_steps"] = o.max_steps;
    m["record_stride"] = o.record_stride;
    return o;
}

FoliationOptions make_foliation_options(KeyValueConfig& cfg,
                                        nlohmann::json& manifest) {
    FoliationOptions o;
    o.flow = make_flow_options(cfg, manifest);
    o.lambda_max = cfg.get_number("foliation", "lambda_max", o.lambda_max);
    o.dlambda0 = cfg.get_number("foliation", "dlambda0", o.dlambda0);
    o.dlambda_min =
        cfg.get_number("foliation", "dlambda_min", o.dlambda_min);
    o.dlambda_cap =
        cfg.get_number("foliation", "dlambda_cap", o.dlambda_cap);
    o.stability_threshold = cfg.get_number("foliation", "stability_threshold",
                                           o.stability_threshold);
    o.instability_factor = cfg.get_number("foliation", "instability_factor",
                                          o.instability_factor);
    o.marginal_factor =
        cfg.get_number("foliation", "marginal_factor", o.marginal_factor);
    o.fast_steps = cfg.get_integer("foliation", "fast_steps", o.fast_steps);
    o.curvature_cap =
        cfg.get_number("foliation", "curvature_cap", o.curvature_cap);
    o.mots_tol = cfg.get_number("foliation", "mots_tol", o.mots_tol);
    o.keep_profiles =
        cfg.get_flag("foliation", "keep_profiles", o.keep_profiles);
    o.max_leaves =
        int(cfg.get_integer("foliation", "max_leaves", o.max_leaves));
    nlohmann::json& m = manifest["foliation"];
    m["lambda_max"] = o.lambda_max;
    m["dlambda0"] = o.dlambda0;
    m["dlambda_min"] = o.dlambda_min;
    m["dlambda_cap"] = o.dlambda_cap;
    m["stability_threshold"] = o.stability_threshold;
    m["instability_factor"] = o.instability_factor;
    m["marginal_factor"] = o.marginal_factor;
    m["fast_steps"] = o.fast_steps;
    m["curvature_cap"] = o.curvature_cap;
    m["mots_tol"] = o.mots_tol;
    m["keep_profiles"] = o.keep_profiles;
    m["max_leaves"] = o.max_leaves;
    return o;
}

std::vector<double> make_initial_omega(KeyValueConfig& cfg,
                                       const NullConeModel& model,
                                       nlohmann::json& manifest) {
    const double s0 = cfg.get_number("flow", "initial_s", 0.0);
    const double bump = cfg.get_number("flow", "initial_bump", 0.0);
    manifest["flow"]["initial_s"] = s0;
    manifest["flow"]["initial_bump"] = bump;
    std::vector<double> omega(model.grid.n_cells);
    for (int j = 0; j < model.grid.n_cells; ++j) {
        const double sn = std::sin(model.grid.theta[j]);
        omega[j] = s0 + bump * sn * sn;
    }
    return omega;
}

std::uint64_t config_seed(KeyValueConfig& cfg, nlohmann::json& manifest) {
    const long seed = cfg.get_integer("run", "seed", 0);
    require(seed >= 0, ErrorKind::parameter,
            "config: [run] seed must be nonnegative");
    manifest["run"]["seed"] = seed;
    return std::uint64_t(seed);
}

std::string config_output_dir(KeyValueConfig& cfg, nlohmann::json& manifest,
                              const std::string& fallback) {
    const std::string dir = cfg.get_string("output", "dir", fallback);
    require(!dir.empty(), ErrorKind::parameter,
            "config: [output] dir must not be empty");
    manifest["output"]["dir"] = dir;
    return dir;
}

} // namespace ncflow
