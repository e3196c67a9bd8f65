// Run orchestration and artifact writers behind the teleopsim executable.
#pragma once

#include "teleop/simulator.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace teleop::cli {

enum ExitCode : int {
    kOk = 0,
    kOtherError = 1,
    kConfigError = 2,
    kGainViolation = 3,
    kDivergence = 4,
};

struct RunArtifacts {
    std::filesystem::path csv_path;
    std::filesystem::path summary_path;
    std::filesystem::path plot_script_path;
    std::string summary;
};

/// Writes the log as CSV (header plus one line per row, round-trip doubles).
void write_csv(std::ostream& out, const RunLog& log);

/// Max and RMS of |q_m - q_s| per joint over the log.
struct TrackingError {
    std::vector<double> max_abs;
    std::vector<double> rms;
};

TrackingError tracking_error(const RunLog& log, int dof);

std::string summarize(const ScenarioConfig& config, const RunResult& result);

/// gnuplot script drawing joint-1 positions, and true/estimated velocity with
/// its error for each robot. `overlay_csv` (optional) is a second run drawn
/// dashed on the position plot.
std::string plot_script(const std::string& csv_name, const std::string& stem,
                        const std::string& overlay_csv = {});

/// Runs the scenario and writes <stem>.csv, <stem>_summary.txt and <stem>.gp into out_dir.
RunArtifacts cmd_run(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                     const std::string& stem = "run");

struct GainCheck {
    GainReport report;
    std::string text;
};

GainCheck cmd_verify_gains(const ScenarioConfig& config);

struct CompareReport {
    std::vector<double> max_discrepancy;  // per joint, over both robots
    std::vector<double> rms_discrepancy;
    double max_overall = 0.0;
    TrackingError tracking_ofb;
    TrackingError tracking_sfb;
    RunResult ofb;
    RunResult sfb;
    std::string text;
};

/// Runs output and state feedback on the same config (in parallel) and
/// compares joint positions row by row.
CompareReport cmd_compare(const ScenarioConfig& config);

}  // namespace teleop::cli
