#include "teleop_cli/cli.hpp"

#include "teleop/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

namespace teleop::cli {
namespace {

std::string joint_name(const char* prefix, Side s, int j) {
    return std::string(prefix) + (s == Side::master ? "_m" : "_s") + std::to_string(j + 1);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

std::string fmt_vec(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s + ")";
}

}  // namespace

void write_csv(std::ostream& out, const RunLog& log) {
    for (std::size_t c = 0; c < log.columns.size(); ++c) out << (c ? "," : "") << log.columns[c];
    out << '\n';
    const std::size_t nc = log.columns.size();
    for (std::size_t r = 0; r < log.rows(); ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            if (c) out << ',';
            out << format_double(log.data[r * nc + c]);
        }
        out << '\n';
    }
}

TrackingError tracking_error(const RunLog& log, int dof) {
    TrackingError e{std::vector<double>(dof, 0.0), std::vector<double>(dof, 0.0)};
    const std::size_t rows = log.rows();
    for (int j = 0; j < dof; ++j) {
        const int cm = log.column(joint_name("q", Side::master, j));
        const int cs = log.column(joint_name("q", Side::slave, j));
        double sq = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = log.at(r, cm) - log.at(r, cs);
            e.max_abs[j] = std::max(e.max_abs[j], std::abs(d));
            sq += d * d;
        }
        e.rms[j] = rows ? std::sqrt(sq / static_cast<double>(rows)) : 0.0;
    }
    return e;
}

std::string summarize(const ScenarioConfig& config, const RunResult& result) {
    const int n = config.side(Side::master).robot.dof();
    const TrackingError te = tracking_error(result.log, n);
    std::ostringstream s;
    s << "mode                 " << to_string(config.mode) << '\n'
      << "duration / dt        " << format_double(config.duration) << " s / " << format_double(config.dt) << " s\n"
      << "rows logged          " << result.log.rows() << " (decimation " << config.decimation << ")\n"
      << "gain margin rho_m    " << format_double(result.gain_report.rho_master) << '\n'
      << "gain margin rho_s    " << format_double(result.gain_report.rho_slave) << '\n'
      << "gain condition       " << (result.gain_report.satisfied ? "satisfied" : "VIOLATED")
      << (result.gain_report.strict ? " (strict)" : "") << '\n'
      << "decay certificate    " << (result.decay.pass ? "pass" : "FAIL") << " (max ratio "
      << format_double(result.decay.max_ratio) << " at t = " << format_double(result.decay.t_at_max) << " s)\n"
      << "tracking |q_m - q_s| max " << fmt_vec(te.max_abs) << " rms " << fmt_vec(te.rms) << '\n'
      << "min r - c_r          " << format_double(result.min_r_margin) << '\n'
      << "min sigma_hat + eps  " << format_double(result.min_sigma_margin) << '\n'
      << "sigma_hat clamps     " << result.sigma_clamps << '\n'
      << "rk4 substeps         max " << result.max_substeps << ", total " << result.total_substeps << '\n';
    return s.str();
}

std::string plot_script(const std::string& csv_name, const std::string& stem, const std::string& overlay_csv) {
    std::ostringstream g;
    g << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set terminal pngcairo size 900,500\n"
      << "set xlabel 't (s)'\n"
      << "data = '" << csv_name << "'\n\n"
      << "set output '" << stem << "_positions.png'\n"
      << "set ylabel 'joint 1 position (rad)'\n";
    if (overlay_csv.empty()) {
        g << "plot data using 't':'q_m1' with lines title 'master', \\\n"
          << "     data using 't':'q_s1' with lines title 'slave'\n\n";
    } else {
        g << "ref = '" << overlay_csv << "'\n"
          << "plot data using 't':'q_m1' with lines title 'master (OFB)', \\\n"
          << "     data using 't':'q_s1' with lines title 'slave (OFB)', \\\n"
          << "     ref using 't':'q_m1' with lines dt 2 title 'master (SFB)', \\\n"
          << "     ref using 't':'q_s1' with lines dt 2 title 'slave (SFB)'\n\n";
    }
    for (const char* side : {"m", "s"}) {
        const std::string sfx = std::string("_") + side + "1";
        g << "set output '" << stem << "_velocity_" << side << ".png'\n"
          << "set ylabel 'joint 1 velocity (rad/s)'\n"
          << "plot data using 't':'qd" << sfx << "' with lines title 'true', \\\n"
          << "     data using 't':'xhat" << sfx << "' with lines dt 2 title 'estimate', \\\n"
          << "     data using 't':'xtilde" << sfx << "' with lines title 'error'\n\n";
    }
    return g.str();
}

RunArtifacts cmd_run(const ScenarioConfig& config, const std::filesystem::path& out_dir, const std::string& stem) {
    const RunResult result = run_scenario(config);
    std::filesystem::create_directories(out_dir);
    RunArtifacts a;
    a.csv_path = out_dir / (stem + ".csv");
    a.summary_path = out_dir / (stem + "_summary.txt");
    a.plot_script_path = out_dir / (stem + ".gp");
    std::ostringstream csv;
    write_csv(csv, result.log);
    write_file(a.csv_path, csv.str());
    a.summary = summarize(config, result);
    write_file(a.summary_path, a.summary);
    write_file(a.plot_script_path, plot_script(a.csv_path.filename().string(), stem));
    return a;
}

GainCheck cmd_verify_gains(const ScenarioConfig& config) {
    config.gains.validate();
    GainCheck c{verify_gain_condition(config.gains), {}};
    const ControllerGains& g = config.gains;
    std::ostringstream s;
    s << "p = " << format_double(g.p) << '\n';
    for (Side side : {Side::master, Side::slave}) {
        const int i = index(side);
        s << name(side) << ": k = " << format_double(g.k_damp[i]) << ", alpha = " << format_double(g.alpha[i])
          << ", omega = " << format_double(g.omega[i]) << ", dbar = " << format_double(g.dbar[i])
          << ", rho = " << format_double(side == Side::master ? c.report.rho_master : c.report.rho_slave) << '\n';
    }
    s << "condition " << (c.report.satisfied ? "satisfied" : "violated");
    if (c.report.satisfied) s << (c.report.strict ? " (strict)" : " (with equality)");
    s << '\n';
    c.text = s.str();
    return c;
}

CompareReport cmd_compare(const ScenarioConfig& config) {
    ScenarioConfig ofb = config;
    ofb.mode = ControllerMode::output_feedback;
    ScenarioConfig sfb = config;
    sfb.mode = ControllerMode::state_feedback;

    auto fut = std::async(std::launch::async, [sfb] { return run_scenario(sfb); });
    CompareReport rep;
    rep.ofb = run_scenario(ofb);
    rep.sfb = fut.get();

    const int n = config.side(Side::master).robot.dof();
    const RunLog& a = rep.ofb.log;
    const RunLog& b = rep.sfb.log;
    if (a.rows() != b.rows()) throw Error("compare: runs logged different row counts");
    rep.max_discrepancy.assign(n, 0.0);
    rep.rms_discrepancy.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double sq = 0.0;
        std::size_t count = 0;
        for (Side side : {Side::master, Side::slave}) {
            const int ca = a.column(joint_name("q", side, j));
            const int cb = b.column(joint_name("q", side, j));
            for (std::size_t r = 0; r < a.rows(); ++r) {
                const double d = a.at(r, ca) - b.at(r, cb);
                rep.max_discrepancy[j] = std::max(rep.max_discrepancy[j], std::abs(d));
                sq += d * d;
                ++count;
            }
        }
        rep.rms_discrepancy[j] = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
        rep.max_overall = std::max(rep.max_overall, rep.max_discrepancy[j]);
    }
    rep.tracking_ofb = tracking_error(a, n);
    rep.tracking_sfb = tracking_error(b, n);

    std::ostringstream s;
    s << "OFB vs SFB joint positions over " << a.rows() << " rows\n"
      << "max discrepancy per joint " << fmt_vec(rep.max_discrepancy) << '\n'
      << "rms discrepancy per joint " << fmt_vec(rep.rms_discrepancy) << '\n'
      << "tracking |q_m - q_s| OFB max " << fmt_vec(rep.tracking_ofb.max_abs) << " rms "
      << fmt_vec(rep.tracking_ofb.rms) << '\n'
      << "tracking |q_m - q_s| SFB max " << fmt_vec(rep.tracking_sfb.max_abs) << " rms "
      << fmt_vec(rep.tracking_sfb.rms) << '\n';
    rep.text = s.str();
    return rep;
}

}  // namespace teleop::cli
