// sps: steady states, spectra and photon correlations of driven dissipative
// emitters, from the command line.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
// 4 I/O failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sps/config.hpp"
#include "sps/run.hpp"

namespace {

struct CliState {
    std::string preset;
    std::string config_file;
    std::vector<std::string> sets;
    std::string out;
    std::string task_override;  // `run` subcommand only
    std::string grid_expr;
    std::string sweep_expr;
    bool strict = false;
    bool stamp = false;
    bool json_header = false;
};

void add_common(CLI::App* cmd, CliState& st) {
    cmd->add_option("--preset", st.preset, "start from a named preset");
    cmd->add_option("--config", st.config_file, "read key = value pairs from a file");
    cmd->add_option("--set", st.sets, "override a single key, key=value; repeatable")
        ->take_all();
    cmd->add_option("--out", st.out, "write CSV here instead of stdout");
    cmd->add_flag("--strict", st.strict, "cross-check detector results (g/2, n_max+1)");
    cmd->add_flag("--stamp", st.stamp, "add a generated_at header line");
    cmd->add_flag("--json-header", st.json_header, "also write <out>.json metadata (needs --out)");
    cmd->add_option("--grid", st.grid_expr,
                    "grid shorthand, e.g. tau=linear(0,5e4,2000) or omega=linear(-1,1,401)");
    cmd->add_option("--sweep", st.sweep_expr,
                    "sweep shorthand, e.g. kappa=logspace(1e-3,1,25); the configured task "
                    "becomes the per-point task");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sps::IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

sps::Config assemble(const CliState& st, const std::string& task) {
    sps::Config cfg;
    if (!st.preset.empty()) cfg = sps::preset_config(st.preset);
    if (!st.config_file.empty()) {
        sps::Config file = sps::parse_config_text(read_file(st.config_file));
        for (auto& [k, v] : file) cfg[k] = v;
    }
    for (const auto& s : st.sets) {
        size_t eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw sps::ConfigError("--set expects key=value, got \"" + s + "\"");
        cfg[sps::detail::trim(s.substr(0, eq))] = sps::detail::trim(s.substr(eq + 1));
    }
    if (task == "sweep") {
        // the per-point task comes from the configuration; --sweep fills sweep.*
        if (st.sweep_expr.empty() && cfg.find("sweep.values") == cfg.end())
            throw sps::ConfigError("the sweep subcommand needs --sweep param=values");
        if (st.sweep_expr.empty()) cfg["task"] = "sweep";
    } else if (!task.empty()) {
        cfg["task"] = task;
    }

    if (!st.grid_expr.empty()) {
        size_t eq = st.grid_expr.find('=');
        if (eq == std::string::npos)
            throw sps::ConfigError("--grid expects name=kind(args), got \"" + st.grid_expr + "\"");
        std::string name = st.grid_expr.substr(0, eq);
        std::string expr = st.grid_expr.substr(eq + 1);
        if (name != "tau" && name != "omega")
            throw sps::ConfigError("--grid name must be tau or omega, got \"" + name + "\"");
        size_t par = expr.find('(');
        if (par == std::string::npos || expr.back() != ')')
            throw sps::ConfigError("--grid expects kind(lo,hi,n), got \"" + expr + "\"");
        std::string kind = expr.substr(0, par);
        if (kind != "linear" && kind != "log")
            throw sps::ConfigError("--grid kind must be linear or log, got \"" + kind + "\"");
        std::vector<double> args =
            sps::detail::to_list("--grid", expr.substr(par + 1, expr.size() - par - 2));
        if (args.size() != 3) throw sps::ConfigError("--grid expects kind(lo,hi,n)");
        cfg["grid.kind"] = kind;
        cfg["grid.lo"] = sps::detail::fmt_exact(args[0]);
        cfg["grid.hi"] = sps::detail::fmt_exact(args[1]);
        cfg["grid.n"] = std::to_string(int(std::round(args[2])));
    }

    if (!st.sweep_expr.empty()) {
        size_t eq = st.sweep_expr.find('=');
        if (eq == std::string::npos || eq == 0)
            throw sps::ConfigError("--sweep expects param=values, got \"" + st.sweep_expr + "\"");
        auto it = cfg.find("task");
        const std::string base = (it == cfg.end()) ? "" : it->second;
        if (base != "detector-g2" && base != "bandwidth")
            throw sps::ConfigError("--sweep needs a detector-g2 or bandwidth task to iterate");
        cfg["sweep.task"] = base;
        cfg["sweep.param"] = st.sweep_expr.substr(0, eq);
        cfg["sweep.values"] = st.sweep_expr.substr(eq + 1);
        cfg["task"] = "sweep";
    }

    if (st.strict) cfg["strict"] = "true";
    if (st.stamp) cfg["stamp"] = "true";
    return cfg;
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sps::IoError("cannot write " + path);
    out << content;
    if (!out) throw sps::IoError("short write to " + path);
}

int dispatch(const CliState& st, const std::string& task, bool validate_only) {
    sps::Config cfg = assemble(st, task);
    sps::RunConfig rc = sps::resolve_config(cfg);
    if (validate_only) {
        write_out(st.out, sps::validate_report(rc));
        return 0;
    }
    if (st.json_header && st.out.empty())
        throw sps::ConfigError("--json-header requires --out");
    sps::RunResult res = sps::run_task(rc);
    write_out(st.out, res.csv);
    if (st.json_header) write_out(st.out + ".json", res.json);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven dissipative emitter simulator"};
    app.require_subcommand(1);

    const std::vector<std::string> tasks = {"steady", "spectrum", "g2", "detector-g2",
                                            "bandwidth", "sweep"};
    std::map<std::string, CliState> states;
    std::string chosen;

    for (const auto& t : tasks) {
        CLI::App* sub = app.add_subcommand(t, "run the " + t + " task");
        add_common(sub, states[t]);
        sub->callback([&chosen, t] { chosen = t; });
    }
    CLI::App* run = app.add_subcommand("run", "run the task named by the configuration");
    add_common(run, states["run"]);
    run->add_option("--task", states["run"].task_override, "override the configured task");
    run->callback([&chosen] { chosen = "run"; });

    CLI::App* val = app.add_subcommand("validate", "resolve and report without solving");
    add_common(val, states["validate"]);
    val->callback([&chosen] { chosen = "validate"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        const CliState& st = states[chosen];
        if (chosen == "validate") return dispatch(st, "", true);
        if (chosen == "run") return dispatch(st, st.task_override, false);
        return dispatch(st, chosen, false);
    } catch (const sps::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sps::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sps::ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sps::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
