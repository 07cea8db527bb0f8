#pragma once

// Flat key = value configuration: parser, serializer, named presets, and the
// typed resolution into a RunConfig. Keys are dotted and lowercase. All
// rates and frequencies are in units of the total spontaneous decay rate.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sps/atomic.hpp"
#include "sps/errors.hpp"
#include "sps/models.hpp"

namespace sps {

using Config = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string fmt_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// Accepts plain "key = value" text with # comments. If the text contains a
// "# --- config ---" block (as written into every CSV header), only that
// block is read, with the leading "# " stripped, so any output file doubles
// as a config file.
inline Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    bool sentinel = false;
    while (std::getline(in, line)) {
        lines.push_back(line);
        if (line.find("# --- config ---") != std::string::npos) sentinel = true;
    }
    bool inside = !sentinel;
    for (auto& raw : lines) {
        std::string l = raw;
        if (sentinel) {
            if (l.find("# --- config ---") != std::string::npos) { inside = true; continue; }
            if (l.find("# --- end config ---") != std::string::npos) { inside = false; continue; }
            if (!inside) continue;
            size_t h = l.find('#');
            if (h == std::string::npos) continue;
            l = l.substr(h + 1);
        } else {
            size_t h = l.find('#');
            if (h != std::string::npos) l = l.substr(0, h);
        }
        l = detail::trim(l);
        if (l.empty()) continue;
        size_t eq = l.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line has no '=': \"" + l + "\"");
        std::string k = detail::trim(l.substr(0, eq));
        std::string v = detail::trim(l.substr(eq + 1));
        if (k.empty()) throw ConfigError("config line has empty key: \"" + l + "\"");
        cfg[k] = v;
    }
    return cfg;
}

inline std::string serialize_config(const Config& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg) out += k + " = " + v + "\n";
    return out;
}

inline Config preset_config(const std::string& name) {
    static const std::map<std::string, const char*> presets = {
        // Lambda emitter, slow-splitting spectrum: narrow line at w = 0
        {"fig2a", R"(
task = spectrum
model.kind = lambda
model.omega = 1e-2
model.omega_r = 1e-5
model.gamma1 = 1
model.gamma2 = 1
grid.kind = logdense
grid.centers = 0
grid.finest = 5e-6
grid.halfwidth = 1.06e-3
grid.per_decade = 60
)"},
        // Lambda emitter, fast-splitting spectrum: triplet at 0, +-2 omega_r
        {"fig2b", R"(
task = spectrum
model.kind = lambda
model.omega = 1e-2
model.omega_r = 1e-3
model.gamma1 = 1
model.gamma2 = 1
grid.kind = logdense
grid.centers = 0, 2e-3, -2e-3
grid.finest = 5e-6
grid.halfwidth = 7e-3
grid.per_decade = 60
)"},
        // Photon correlation of the same fast-splitting point
        {"fig2c", R"(
task = g2
model.kind = lambda
model.omega = 1e-2
model.omega_r = 1e-3
model.gamma1 = 1
model.gamma2 = 1
grid.kind = linear
grid.lo = 0
grid.hi = 2e5
grid.n = 2001
)"},
        // Emitter + filter mode on the e->a channel
        {"fig3", R"(
task = detector-g2
model.kind = lambda+detector
model.omega = 1e-2
model.omega_r = 1e-2
model.gamma1 = 1
model.gamma2 = 1
detector.g = 1e-3
detector.kappa = 0.1
detector.n_max = 3
)"},
        // F_g=1 -> F_e=0 line, pi-polarized detection channel
        {"figS3a", R"(
task = spectrum
model.kind = hyperfine
model.f_g = 1
model.f_e = 0
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-3
model.gamma = 1
detect.m_e = 0
detect.q = 0
grid.kind = logdense
grid.centers = 0, 1.4142135623730951e-3, -1.4142135623730951e-3, 2.8284271247461903e-3, -2.8284271247461903e-3
grid.finest = 6.6666666666666667e-6
grid.halfwidth = 6e-3
grid.per_decade = 60
)"},
        {"figS3b", R"(
task = g2
model.kind = hyperfine
model.f_g = 1
model.f_e = 0
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-3
model.gamma = 1
detect.m_e = 0
detect.q = 0
grid.kind = linear
grid.lo = 0
grid.hi = 5e4
grid.n = 2001
)"},
        {"figS3c", R"(
task = detector-g2
model.kind = hyperfine+detector
model.f_g = 1
model.f_e = 0
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-2
model.gamma = 1
detect.m_e = 0
detect.q = 0
detector.g = 1e-3
detector.kappa = 0.1
detector.n_max = 3
)"},
        // Same line, sigma- detection channel |0,0> -> |1,+1>
        {"figS3d", R"(
task = spectrum
model.kind = hyperfine
model.f_g = 1
model.f_e = 0
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-3
model.gamma = 1
detect.m_e = 0
detect.q = -1
grid.kind = logdense
grid.centers = 0, 1.4142135623730951e-3, -1.4142135623730951e-3, 2.8284271247461903e-3, -2.8284271247461903e-3
grid.finest = 6.6666666666666667e-6
grid.halfwidth = 6e-3
grid.per_decade = 60
)"},
        {"figS3e", R"(
task = g2
model.kind = hyperfine
model.f_g = 1
model.f_e = 0
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-3
model.gamma = 1
detect.m_e = 0
detect.q = -1
grid.kind = linear
grid.lo = 0
grid.hi = 5e4
grid.n = 2001
)"},
        {"figS3f", R"(
task = detector-g2
model.kind = hyperfine+detector
model.f_g = 1
model.f_e = 0
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-2
model.gamma = 1
detect.m_e = 0
detect.q = -1
detector.g = 1e-3
detector.kappa = 0.1
detector.n_max = 3
)"},
        // Multi-level ground manifolds
        {"figS4a", R"(
task = spectrum
model.kind = hyperfine
model.f_g = 2
model.f_e = 1
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-3
model.gamma = 1
detect.m_e = 1
detect.q = 0
grid.kind = logdense
grid.centers = 0, 1.4142135623730951e-3, -1.4142135623730951e-3, 2.8284271247461903e-3, -2.8284271247461903e-3
grid.finest = 6.6666666666666667e-6
grid.halfwidth = 8e-3
grid.per_decade = 60
)"},
        {"figS4b", R"(
task = spectrum
model.kind = hyperfine
model.f_g = 1
model.f_e = 1
model.omega_l = 1.7320508075688772e-2
model.q_l = 1
model.omega_b = 1e-3
model.gamma = 1
detect.m_e = 1
detect.q = 0
grid.kind = logdense
grid.centers = 0, 1.4142135623730951e-3, -1.4142135623730951e-3, 2.8284271247461903e-3, -2.8284271247461903e-3
grid.finest = 6.6666666666666667e-6
grid.halfwidth = 8e-3
grid.per_decade = 60
)"},
    };
    auto it = presets.find(name);
    if (it == presets.end()) {
        std::string known;
        for (const auto& [k, v] : presets) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("unknown preset \"" + name + "\" (known: " + known + ")");
    }
    return parse_config_text(it->second);
}

inline std::vector<std::string> preset_names() {
    return {"fig2a",  "fig2b",  "fig2c",  "fig3",   "figS3a", "figS3b", "figS3c",
            "figS3d", "figS3e", "figS3f", "figS4a", "figS4b"};
}

// Everything a task run needs, resolved and validated.
struct RunConfig {
    std::string task;        // steady | spectrum | g2 | detector-g2 | bandwidth | sweep
    std::string model_kind;  // lambda | lambda+detector | hyperfine | hyperfine+detector

    LambdaParams lambda;
    HyperfineSpec hyper;
    bool has_detector = false;
    DetectorParams det;       // lambda+detector
    DetectorAttachment att;   // hyperfine+detector
    double detect_m_e = 0.0;  // hyperfine detection channel
    int detect_q = 0;

    std::string grid_kind = "";  // logdense | linear | log
    std::vector<double> centers;
    double finest = 0.0, halfwidth = 0.0;
    int per_decade = 60;
    double lo = 0.0, hi = 0.0;
    int n = 0;

    std::string sweep_param;  // dotted key
    std::vector<double> sweep_values;
    std::string sweep_task;  // detector-g2 | bandwidth

    double mass = 0.99;  // bandwidth task
    bool strict = false;
    bool stamp = false;
    double gamma_mhz = 2.0 * M_PI * 6.0666;

    Config raw;  // the resolved flat map, echoed into output headers
};

namespace detail {

inline double to_number(const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    double x = std::strtod(s, &end);
    if (end == s || *end != '\0' || !std::isfinite(x))
        throw ConfigError("key " + key + ": \"" + v + "\" is not a number");
    return x;
}

inline int to_int(const std::string& key, const std::string& v) {
    double x = to_number(key, v);
    double r = std::round(x);
    if (std::abs(x - r) > 1e-9) throw ConfigError("key " + key + ": \"" + v + "\" is not an integer");
    return int(r);
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key " + key + ": \"" + v + "\" is not a boolean");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string cur;
    std::istringstream in(v);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (cur.empty()) throw ConfigError("key " + key + ": empty list element");
        out.push_back(to_number(key, cur));
    }
    if (out.empty()) throw ConfigError("key " + key + ": empty list");
    return out;
}

// "logspace(1e-3,1,25)", "linspace(0,1,11)" or a plain comma list.
inline std::vector<double> to_values(const std::string& key, const std::string& v) {
    auto call = [&](const std::string& fn) -> std::vector<double> {
        std::string inner = v.substr(fn.size() + 1, v.size() - fn.size() - 2);
        std::vector<double> args = to_list(key, inner);
        if (args.size() != 3) throw ConfigError("key " + key + ": " + fn + " needs (start,stop,n)");
        int n = int(std::round(args[2]));
        if (n < 2) throw ConfigError("key " + key + ": " + fn + " needs n >= 2");
        std::vector<double> out(n);
        if (fn == "logspace") {
            if (!(args[0] > 0.0) || !(args[1] > 0.0))
                throw ConfigError("key " + key + ": logspace bounds must be positive");
            for (int k = 0; k < n; ++k)
                out[k] = args[0] * std::pow(args[1] / args[0], double(k) / double(n - 1));
        } else {
            for (int k = 0; k < n; ++k)
                out[k] = args[0] + (args[1] - args[0]) * double(k) / double(n - 1);
        }
        return out;
    };
    if (v.rfind("logspace(", 0) == 0 && v.back() == ')') return call("logspace");
    if (v.rfind("linspace(", 0) == 0 && v.back() == ')') return call("linspace");
    return to_list(key, v);
}

}  // namespace detail

// Shorthand sweep-parameter names accepted on the command line.
inline std::string canonical_param_key(const std::string& name) {
    static const std::map<std::string, std::string> alias = {
        {"kappa", "detector.kappa"},   {"g", "detector.g"},
        {"n_max", "detector.n_max"},   {"omega", "model.omega"},
        {"omega_r", "model.omega_r"},  {"omega_b", "model.omega_b"},
        {"omega_l", "model.omega_l"},  {"delta_s", "detector.delta_s"},
    };
    auto it = alias.find(name);
    if (it != alias.end()) return it->second;
    return name;
}

inline RunConfig resolve_config(const Config& cfg) {
    static const std::set<std::string> known = {
        "task",           "model.kind",      "model.omega",    "model.omega_r",
        "model.gamma1",   "model.gamma2",    "model.delta_e",  "model.f_g",
        "model.f_e",      "model.omega_l",   "model.q_l",      "model.omega_b",
        "model.gamma",    "detect.m_e",      "detect.q",       "detector.g",
        "detector.kappa", "detector.delta_s","detector.n_max", "grid.kind",
        "grid.centers",   "grid.finest",     "grid.halfwidth", "grid.per_decade",
        "grid.lo",        "grid.hi",         "grid.n",         "sweep.param",
        "sweep.values",   "sweep.task",      "bandwidth.mass", "strict",
        "stamp",          "units.gamma_mhz",
    };
    for (const auto& [k, v] : cfg)
        if (!known.count(k)) throw ConfigError("unknown key: " + k);

    auto has = [&](const char* k) { return cfg.count(k) != 0; };
    auto str = [&](const char* k, const char* dflt) -> std::string {
        auto it = cfg.find(k);
        return it == cfg.end() ? dflt : it->second;
    };
    auto num = [&](const char* k, double dflt) {
        auto it = cfg.find(k);
        return it == cfg.end() ? dflt : detail::to_number(k, it->second);
    };
    auto integer = [&](const char* k, int dflt) {
        auto it = cfg.find(k);
        return it == cfg.end() ? dflt : detail::to_int(k, it->second);
    };

    RunConfig rc;
    rc.task = str("task", "");
    if (rc.task.empty()) throw ConfigError("missing key: task");
    static const std::set<std::string> tasks = {"steady", "spectrum", "g2", "detector-g2",
                                                "bandwidth", "sweep"};
    if (!tasks.count(rc.task)) throw ConfigError("key task: unknown task \"" + rc.task + "\"");

    rc.model_kind = str("model.kind", "");
    if (rc.model_kind.empty()) throw ConfigError("missing key: model.kind");

    const bool is_lambda = rc.model_kind == "lambda" || rc.model_kind == "lambda+detector";
    const bool is_hyper = rc.model_kind == "hyperfine" || rc.model_kind == "hyperfine+detector";
    if (!is_lambda && !is_hyper)
        throw ConfigError("key model.kind: unknown kind \"" + rc.model_kind + "\"");
    rc.has_detector = rc.model_kind.find("+detector") != std::string::npos;

    double gamma_total = 0.0;
    if (is_lambda) {
        rc.lambda.omega = num("model.omega", 0.0);
        rc.lambda.omega_r = num("model.omega_r", 0.0);
        rc.lambda.gamma1 = num("model.gamma1", 1.0);
        rc.lambda.gamma2 = num("model.gamma2", 1.0);
        rc.lambda.delta_e = num("model.delta_e", 0.0);
        rc.lambda.validate();
        gamma_total = rc.lambda.gamma1 + rc.lambda.gamma2;
        for (const char* k : {"model.f_g", "model.f_e", "model.omega_l", "model.q_l",
                              "model.omega_b", "model.gamma", "detect.m_e", "detect.q"})
            if (has(k)) throw ConfigError(std::string("key ") + k + ": not a lambda-model key");
    } else {
        rc.hyper.f_g = num("model.f_g", 1.0);
        rc.hyper.f_e = num("model.f_e", 0.0);
        rc.hyper.omega_l = num("model.omega_l", 0.0);
        rc.hyper.q_l = integer("model.q_l", 1);
        rc.hyper.omega_b = num("model.omega_b", 0.0);
        rc.hyper.gamma = num("model.gamma", 1.0);
        rc.hyper.delta_e = num("model.delta_e", 0.0);
        rc.hyper.validate();
        gamma_total = rc.hyper.gamma;
        rc.detect_m_e = num("detect.m_e", 0.0);
        rc.detect_q = integer("detect.q", 0);
        if (rc.detect_q < -1 || rc.detect_q > 1)
            throw ConfigError("key detect.q: must be -1, 0 or +1");
        for (const char* k : {"model.omega", "model.omega_r", "model.gamma1", "model.gamma2"})
            if (has(k)) throw ConfigError(std::string("key ") + k + ": not a hyperfine-model key");
    }

    if (rc.has_detector || has("detector.kappa") || has("detector.g") || has("detector.n_max")) {
        if (!rc.has_detector)
            throw ConfigError("detector.* keys require model.kind = ...+detector");
        const double kappa = num("detector.kappa", 0.0);
        std::string gs = str("detector.g", "auto");
        const double g = (gs == "auto") ? std::min(1e-3 * gamma_total, kappa / 10.0)
                                        : detail::to_number("detector.g", gs);
        const double ds = num("detector.delta_s", 0.0);
        const int nmax = integer("detector.n_max", 3);
        if (is_lambda) {
            rc.det = DetectorParams{g, kappa, ds, nmax};
            rc.det.validate();
        } else {
            rc.att.m_e = rc.detect_m_e;
            rc.att.m_g = rc.detect_m_e - rc.detect_q;
            rc.att.g = g;
            rc.att.kappa = kappa;
            rc.att.delta_s = ds;
            rc.att.n_max = nmax;
            rc.att.validate();
        }
    }

    rc.grid_kind = str("grid.kind", "");
    if (rc.grid_kind == "logdense") {
        rc.centers = detail::to_list("grid.centers", str("grid.centers", "0"));
        rc.finest = num("grid.finest", 0.0);
        rc.halfwidth = num("grid.halfwidth", 0.0);
        rc.per_decade = integer("grid.per_decade", 60);
    } else if (rc.grid_kind == "linear" || rc.grid_kind == "log") {
        rc.lo = num("grid.lo", 0.0);
        rc.hi = num("grid.hi", 0.0);
        rc.n = integer("grid.n", 0);
    } else if (!rc.grid_kind.empty()) {
        throw ConfigError("key grid.kind: unknown kind \"" + rc.grid_kind + "\"");
    }

    if (rc.task == "sweep" || has("sweep.param") || has("sweep.values") || has("sweep.task")) {
        if (rc.task != "sweep")
            throw ConfigError("sweep.* keys require task = sweep");
        rc.sweep_param = canonical_param_key(str("sweep.param", ""));
        if (rc.sweep_param.empty()) throw ConfigError("missing key: sweep.param");
        if (!known.count(rc.sweep_param))
            throw ConfigError("key sweep.param: unknown parameter \"" + rc.sweep_param + "\"");
        rc.sweep_values = detail::to_values("sweep.values", str("sweep.values", ""));
        rc.sweep_task = str("sweep.task", "detector-g2");
        if (rc.sweep_task != "detector-g2" && rc.sweep_task != "bandwidth")
            throw ConfigError("key sweep.task: must be detector-g2 or bandwidth");
    }

    rc.mass = num("bandwidth.mass", 0.99);
    if (!(rc.mass > 0.0) || !(rc.mass < 1.0))
        throw ConfigError("key bandwidth.mass: must be in (0,1)");
    rc.strict = has("strict") ? detail::to_bool("strict", cfg.at("strict")) : false;
    rc.stamp = has("stamp") ? detail::to_bool("stamp", cfg.at("stamp")) : false;
    rc.gamma_mhz = num("units.gamma_mhz", 2.0 * M_PI * 6.0666);

    rc.raw = cfg;
    // normalize the echoed config so reruns of an emitted header are
    // byte-identical even when a value was spelled differently
    for (auto& [k, v] : rc.raw) {
        if (k == "task" || k == "model.kind" || k == "grid.kind" || k == "sweep.param" ||
            k == "sweep.task" || k == "strict" || k == "stamp")
            continue;
        if (k == "detector.g" && v == "auto") continue;
        if (k == "grid.centers" || k == "sweep.values") continue;
        v = detail::fmt_exact(detail::to_number(k, v));
    }
    return rc;
}

}  // namespace sps
