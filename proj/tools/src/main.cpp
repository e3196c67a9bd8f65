#include "teleop/config_io.hpp"
#include "teleop_cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace teleop;

namespace {

struct ScenarioArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string mode;
    bool force = false;
};

void add_scenario_args(CLI::App* cmd, ScenarioArgs& a, bool with_mode) {
    cmd->add_option("config", a.config_path, "scenario file (built-in defaults when omitted)");
    cmd->add_option("--set", a.overrides, "override one key, e.g. --set simulation.dt=0.0005");
    if (with_mode) {
        cmd->add_option("--mode", a.mode, "output_feedback or state_feedback");
        cmd->add_flag("--force", a.force, "run even if the gain condition fails");
    }
}

ScenarioConfig build_config(const ScenarioArgs& a) {
    ScenarioConfig c = a.config_path.empty() ? ScenarioConfig::teleoperation_default() : load_config(a.config_path);
    for (const auto& o : a.overrides) apply_override(c, o);
    if (!a.mode.empty()) {
        try {
            c.mode = parse_controller_mode(a.mode);
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what(), 0, "simulation.mode");
        }
    }
    if (a.force) c.force = true;
    try {
        c.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::string default_out_dir() {
    const char* env = std::getenv("OUTPUT_DIR");
    return env && *env ? env : ".";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed bilateral teleoperation simulator"};
    app.require_subcommand(1);

    ScenarioArgs run_args, gain_args, cmp_args;
    std::string run_out = default_out_dir(), cmp_out = default_out_dir();
    std::string stem = "run";

    auto* run = app.add_subcommand("run", "simulate a scenario and write CSV, summary and plot script");
    add_scenario_args(run, run_args, true);
    run->add_option("--out-dir", run_out, "artifact directory (default $OUTPUT_DIR or .)");
    run->add_option("--name", stem, "artifact file stem");

    auto* gains = app.add_subcommand("verify-gains", "check the P+d gain condition; exit 0 iff it holds");
    add_scenario_args(gains, gain_args, false);

    auto* cmp = app.add_subcommand("compare", "run output and state feedback and report their discrepancy");
    add_scenario_args(cmp, cmp_args, false);
    cmp->add_option("--out-dir", cmp_out, "artifact directory (default $OUTPUT_DIR or .)");

    ScenarioArgs dump_args;
    auto* dump = app.add_subcommand("print-config", "print the resolved scenario file");
    add_scenario_args(dump, dump_args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kOk : cli::kConfigError;
    }

    try {
        if (*run) {
            const auto art = cli::cmd_run(build_config(run_args), run_out, stem);
            std::cout << art.summary << "wrote " << art.csv_path.string() << ", " << art.summary_path.string()
                      << ", " << art.plot_script_path.string() << '\n';
            return cli::kOk;
        }
        if (*gains) {
            const auto check = cli::cmd_verify_gains(build_config(gain_args));
            std::cout << check.text;
            return check.report.satisfied ? cli::kOk : cli::kGainViolation;
        }
        if (*cmp) {
            ScenarioConfig c = build_config(cmp_args);
            const auto rep = cli::cmd_compare(c);
            std::filesystem::create_directories(cmp_out);
            for (auto* pair : {&rep.ofb, &rep.sfb}) {
                const std::string file = pair == &rep.ofb ? "compare_ofb.csv" : "compare_sfb.csv";
                std::ofstream out(std::filesystem::path(cmp_out) / file, std::ios::binary);
                cli::write_csv(out, pair->log);
            }
            std::ofstream gp(std::filesystem::path(cmp_out) / "compare.gp");
            gp << cli::plot_script("compare_ofb.csv", "compare", "compare_sfb.csv");
            std::cout << rep.text;
            return cli::kOk;
        }
        if (*dump) {
            std::cout << serialize_config(build_config(dump_args));
            return cli::kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const GainConditionError& e) {
        std::cerr << "error: " << e.what() << " (use --force to run anyway)\n";
        return cli::kGainViolation;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kOtherError;
    }
    return cli::kOtherError;
}
