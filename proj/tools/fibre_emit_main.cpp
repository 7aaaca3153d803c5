#include "fibre_emit/config.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/sweep.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int)
{
    g_stop.store(true);
}

struct Overrides {
    std::string config_path;
    std::vector<std::string> states;
    std::string sweep;
    bool detail = false;
    std::string output;
    std::string format;
    int jobs = 0;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-c,--config", o.config_path, "key = value run configuration");
    cmd->add_option("-s,--state", o.states, "state label, e.g. 10s1/2:+1/2 (repeatable)");
    cmd->add_option("--sweep", o.sweep, "axis:min:max:count[:linear|log], axis r|a|n");
    cmd->add_option("--set", o.sets, "override any config key, key=value (repeatable)");
}

fibre_emit::RunConfig build_config(const Overrides& o, bool run_flags)
{
    using fibre_emit::ConfigError;
    fibre_emit::RunConfig cfg =
        o.config_path.empty() ? fibre_emit::RunConfig{} : fibre_emit::RunConfig::load(o.config_path);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.states.empty()) {
        std::string joined;
        for (const auto& s : o.states)
            joined += (joined.empty() ? "" : ",") + s;
        cfg.set("state", joined);
    }
    if (!o.sweep.empty())
        cfg.set("sweep", o.sweep);
    if (run_flags) {
        if (o.detail)
            cfg.detail = true;
        if (!o.output.empty())
            cfg.set("output", o.output);
        if (!o.format.empty())
            cfg.set("format", o.format);
        if (o.jobs != 0)
            cfg.set("jobs", std::to_string(o.jobs));
    }
    if (cfg.states.empty())
        throw ConfigError("no state given (config key 'state' or --state)");
    return cfg;
}

int report(const std::vector<fibre_emit::Diagnostic>& diags, bool quiet = false)
{
    int errors = 0;
    for (const auto& d : diags) {
        const bool err = d.level == fibre_emit::Diagnostic::Level::Error;
        errors += err;
        if (err || !quiet)
            std::cerr << (err ? "error: " : "warning: ") << d.message << "\n";
    }
    return errors;
}

int do_validate(const Overrides& o)
{
    const auto cfg = build_config(o, false);
    const int errors = report(fibre_emit::validate(cfg));
    if (errors == 0)
        std::cerr << "ok: configuration " << cfg.hash_hex() << " is valid\n";
    return errors ? kExitConfig : 0;
}

int do_run(const Overrides& o, const std::string& cutoffs_path, bool quiet)
{
    const auto cfg = build_config(o, true);
    if (report(fibre_emit::validate(cfg), quiet) > 0)
        return kExitConfig;

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file)
            throw fibre_emit::ConfigError("cannot write output file " + cfg.output);
    }
    std::ostream& out = cfg.output.empty() ? std::cout : file;

    std::signal(SIGINT, on_sigint);
    const auto result = fibre_emit::run_sweep(cfg, &g_stop);
    std::signal(SIGINT, SIG_DFL);

    if (cfg.format == fibre_emit::OutputFormat::Json)
        fibre_emit::write_json(out, cfg, result);
    else
        fibre_emit::write_csv(out, cfg, result);
    out.flush();

    std::string sidecar = cutoffs_path;
    if (sidecar.empty() && !cfg.output.empty())
        sidecar = cfg.output + ".cutoffs.csv";
    if (!sidecar.empty() && sidecar != "none") {
        std::ofstream side(sidecar);
        if (!side)
            throw fibre_emit::ConfigError("cannot write cutoff sidecar " + sidecar);
        fibre_emit::write_cutoffs(side, cfg, fibre_emit::find_cutoffs(cfg, result));
    }
    if (result.interrupted) {
        std::cerr << "interrupted: wrote " << result.rows.size() << " of " << result.planned
                  << " rows\n";
        return kExitInterrupted;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spontaneous emission of a sodium atom near an optical nanofibre"};
    app.set_version_flag("--version", std::string(FIBRE_EMIT_VERSION));
    app.require_subcommand(1);

    Overrides run_o;
    std::string cutoffs_path;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "compute a sweep and write CSV or JSON");
    add_common(run, run_o);
    run->add_flag("--detail", run_o.detail, "per-channel and per-branch columns");
    run->add_option("-o,--output", run_o.output, "output file (default stdout)");
    run->add_option("--format", run_o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("-j,--jobs", run_o.jobs, "concurrent sweep points")
        ->check(CLI::PositiveNumber);
    run->add_option("--cutoffs", cutoffs_path,
                    "branch cutoff sidecar path ('none' to skip; default <output>.cutoffs.csv)");
    run->add_flag("-q,--quiet", quiet, "suppress warnings");

    Overrides val_o;
    auto* val = app.add_subcommand("validate", "check a configuration without computing");
    add_common(val, val_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*val)
            return do_validate(val_o);
        return do_run(run_o, cutoffs_path, quiet);
    } catch (const fibre_emit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fibre_emit::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fibre_emit::SweepPointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    }
}
