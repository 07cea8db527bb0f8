#pragma once

// Task execution on top of a resolved RunConfig, and the CSV/JSON output
// format. Output is deterministic: 12-significant-digit scientific data
// rows, sorted config echo, no timestamps unless explicitly stamped.

#include <cstdio>
#include <ctime>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sps/config.hpp"
#include "sps/correl.hpp"
#include "sps/errors.hpp"
#include "sps/grids.hpp"
#include "sps/liouville.hpp"
#include "sps/models.hpp"
#include "sps/qops.hpp"

namespace sps {

namespace detail {

inline std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

inline std::string iso_now_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline int thread_budget(size_t njobs) {
    const char* env = std::getenv("SPS_THREADS");
    long t = 0;
    if (env) t = std::strtol(env, nullptr, 10);
    if (t < 1) t = long(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return int(std::min<size_t>(size_t(t), njobs ? njobs : 1));
}

}  // namespace detail

inline LindbladModel build_model(const RunConfig& rc) {
    if (rc.model_kind == "lambda") return build_lambda_emitter(rc.lambda);
    if (rc.model_kind == "lambda+detector") return build_emitter_detector(rc.lambda, rc.det);
    if (rc.model_kind == "hyperfine") return build_hyperfine_model(rc.hyper);
    return attach_detector(rc.hyper, rc.att);
}

// Lowering operator of the observed emission channel (e -> a for the Lambda
// system, the configured Zeeman channel for hyperfine models).
inline OperatorMatrix channel_lowering(const RunConfig& rc) {
    if (rc.model_kind == "lambda") return transition_op(LVL_A, LVL_E, 3);
    if (rc.model_kind == "hyperfine") {
        const HyperfineLevels lv = hyperfine_levels(rc.hyper);
        Mat op = Mat::Zero(lv.dim, lv.dim);
        op(lv.ground_index(rc.detect_m_e - rc.detect_q), lv.excited_index(rc.detect_m_e)) = 1.0;
        return OperatorMatrix(SpaceLayout{{lv.dim}}, op);
    }
    throw ConfigError("task requires a bare emitter model (got " + rc.model_kind + ")");
}

inline std::vector<double> make_frequency_grid(const RunConfig& rc) {
    if (rc.grid_kind == "logdense")
        return logdense_grid(rc.centers, rc.finest, rc.halfwidth, rc.per_decade);
    if (rc.grid_kind == "linear") return linear_grid(rc.lo, rc.hi, rc.n);
    if (rc.grid_kind == "log") return log_grid(rc.lo, rc.hi, rc.n);
    throw ConfigError("task " + rc.task + " requires grid.kind");
}

inline std::vector<double> make_delay_grid(const RunConfig& rc) {
    if (rc.grid_kind == "linear") return linear_grid(rc.lo, rc.hi, rc.n);
    if (rc.grid_kind.empty()) throw ConfigError("task g2 requires grid.kind = linear");
    throw ConfigError("task g2 requires grid.kind = linear (got " + rc.grid_kind + ")");
}

// detector-g2 evaluation with the optional strict cross-checks: the result
// must be stable under halving the probe coupling (weak-probe regime) and
// under raising the Fock cutoff (truncation converged).
inline double run_detector_g2(const RunConfig& rc) {
    const bool is_lambda = rc.model_kind == "lambda+detector";
    if (!rc.has_detector)
        throw ConfigError("task detector-g2 requires model.kind = ...+detector");
    const double v = detector_g2_zero(build_model(rc), 1);
    if (rc.strict) {
        RunConfig half = rc;
        (is_lambda ? half.det.g : half.att.g) *= 0.5;
        const double vh = detector_g2_zero(build_model(half), 1);
        if (std::abs(vh - v) > 0.01 * std::abs(v))
            throw ConvergenceFailure("strict: g2_0 moves by " +
                                     detail::fmt12(std::abs(vh - v) / std::abs(v)) +
                                     " (rel) under g -> g/2; probe coupling too strong");
        RunConfig more = rc;
        (is_lambda ? more.det.n_max : more.att.n_max) += 1;
        const double vc = detector_g2_zero(build_model(more), 1);
        if (std::abs(vc - v) > 0.005 * std::abs(v))
            throw ConvergenceFailure("strict: g2_0 moves by " +
                                     detail::fmt12(std::abs(vc - v) / std::abs(v)) +
                                     " (rel) under n_max + 1; Fock cutoff too small");
    }
    return v;
}

inline double run_bandwidth(const RunConfig& rc) {
    SpectrumResult sr = emission_spectrum(build_model(rc), channel_lowering(rc),
                                          make_frequency_grid(rc));
    return spectrum_bandwidth(sr, rc.mass);
}

struct RunResult {
    std::string csv;
    std::string json;
};

inline RunResult run_task(const RunConfig& rc) {
    std::vector<std::string> head;
    std::vector<std::string> columns;
    std::vector<std::string> rows;
    nlohmann::json extra = nlohmann::json::object();

    if (rc.task == "steady") {
        DensityMatrix rho = steady_state(build_model(rc));
        columns = {"i", "j", "re", "im"};
        const int d = rho.layout.total;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                rows.push_back(std::to_string(i) + "," + std::to_string(j) + "," +
                               detail::fmt12(rho.m(i, j).real()) + "," +
                               detail::fmt12(rho.m(i, j).imag()));
    } else if (rc.task == "spectrum") {
        SpectrumResult sr = emission_spectrum(build_model(rc), channel_lowering(rc),
                                              make_frequency_grid(rc));
        head.push_back("# convention = " + sr.convention);
        head.push_back("# coherent_weight = " + detail::fmt12(sr.coherent_weight));
        extra["convention"] = sr.convention;
        extra["coherent_weight"] = sr.coherent_weight;
        columns = {"omega", "s_incoherent"};
        for (size_t k = 0; k < sr.frequencies.size(); ++k)
            rows.push_back(detail::fmt12(sr.frequencies[k]) + "," + detail::fmt12(sr.incoherent[k]));
    } else if (rc.task == "g2") {
        LindbladModel m = build_model(rc);
        CorrelationTrace tr = g2_emitter(m, channel_lowering(rc), make_delay_grid(rc));
        columns = {"tau", "g2"};
        for (size_t k = 0; k < tr.delays.size(); ++k)
            rows.push_back(detail::fmt12(tr.delays[k]) + "," + detail::fmt12(tr.values[k].real()));
    } else if (rc.task == "detector-g2") {
        const double v = run_detector_g2(rc);
        const double kappa = (rc.model_kind == "lambda+detector") ? rc.det.kappa : rc.att.kappa;
        columns = {"kappa", "g2_0"};
        rows.push_back(detail::fmt12(kappa) + "," + detail::fmt12(v));
    } else if (rc.task == "bandwidth") {
        const double w2 = run_bandwidth(rc);
        columns = {"mass", "two_w"};
        rows.push_back(detail::fmt12(rc.mass) + "," + detail::fmt12(w2));
    } else if (rc.task == "sweep") {
        const std::string col = rc.sweep_param.substr(rc.sweep_param.rfind('.') + 1);
        const std::string val_col = (rc.sweep_task == "detector-g2") ? "g2_0" : "two_w";
        columns = {col, val_col};
        std::vector<double> xs = rc.sweep_values;
        std::sort(xs.begin(), xs.end());
        const size_t n = xs.size();
        std::vector<double> ys(n);
        std::vector<std::exception_ptr> errs(n);
        const int nt = detail::thread_budget(n);
        auto worker = [&](int t0) {
            for (size_t k = t0; k < n; k += size_t(nt)) {
                try {
                    Config c2 = rc.raw;
                    c2.erase("sweep.param");
                    c2.erase("sweep.values");
                    c2.erase("sweep.task");
                    c2["task"] = rc.sweep_task;
                    c2[rc.sweep_param] = detail::fmt_exact(xs[k]);
                    RunConfig point = resolve_config(c2);
                    point.strict = rc.strict;
                    ys[k] = (rc.sweep_task == "detector-g2") ? run_detector_g2(point)
                                                             : run_bandwidth(point);
                } catch (...) {
                    errs[k] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < nt; ++t) pool.emplace_back(worker, t);
        worker(0);
        for (auto& th : pool) th.join();
        for (size_t k = 0; k < n; ++k)
            if (errs[k]) std::rethrow_exception(errs[k]);
        for (size_t k = 0; k < n; ++k)
            rows.push_back(detail::fmt12(xs[k]) + "," + detail::fmt12(ys[k]));
    } else {
        throw ConfigError("unknown task: " + rc.task);
    }

    std::string out;
    out += "# sps " + std::string(kVersion) + "\n";
    out += "# task = " + rc.task + "\n";
    for (const auto& h : head) out += h + "\n";
    out += "# units: rates and frequencies in units of the total decay rate; gamma_mhz = " +
           detail::fmt12(rc.gamma_mhz) + "\n";
    if (rc.stamp) out += "# generated_at = " + detail::iso_now_utc() + "\n";
    out += "# --- config ---\n";
    for (const auto& [k, v] : rc.raw) out += "# " + k + " = " + v + "\n";
    out += "# --- end config ---\n";
    std::string cols;
    for (size_t k = 0; k < columns.size(); ++k) cols += (k ? "," : "") + columns[k];
    out += cols + "\n";
    for (const auto& r : rows) out += r + "\n";

    nlohmann::json j;
    j["version"] = kVersion;
    j["task"] = rc.task;
    j["columns"] = columns;
    j["rows"] = rows.size();
    for (auto& [k, v] : extra.items()) j[k] = v;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : rc.raw) j["config"][k] = v;

    RunResult res;
    res.csv = std::move(out);
    res.json = j.dump(2) + "\n";
    return res;
}

// Resolved-parameter report with dimension and cost bookkeeping; performs no
// solves, so it is safe on any configuration that merely parses.
inline std::string validate_report(const RunConfig& rc) {
    std::string out;
    for (const auto& [k, v] : rc.raw) out += k + " = " + v + "\n";
    int dim = 0;
    if (rc.model_kind == "lambda") dim = 3;
    else if (rc.model_kind == "lambda+detector") dim = 3 * (rc.det.n_max + 1);
    else {
        const HyperfineLevels lv = hyperfine_levels(rc.hyper);
        dim = rc.has_detector ? lv.dim * (rc.att.n_max + 1) : lv.dim;
    }
    out += "# derived\n";
    out += "hilbert_dim = " + std::to_string(dim) + "\n";
    out += "liouville_dim = " + std::to_string(dim * dim) + "\n";
    size_t solves = 1;
    if (rc.task == "spectrum" || rc.task == "bandwidth") solves = make_frequency_grid(rc).size();
    else if (rc.task == "g2") solves = make_delay_grid(rc).size();
    else if (rc.task == "sweep") solves = rc.sweep_values.size() * (rc.strict ? 3 : 1);
    else if (rc.task == "detector-g2") solves = rc.strict ? 3 : 1;
    out += "linear_solves = " + std::to_string(solves) + "\n";
    return out;
}

}  // namespace sps
