// Scenario files: flat `[section]` blocks of `key = value` lines, '#' comments.
//
//   [simulation]        duration dt mode decimation substeps force
//   [robot.<side>]      link_masses link_lengths gravity_accel lambda1 lambda2 c_bound q0 qdot0
//   [observer.<side>]   k_r c_r eps xhat0 r0 sigma_hat0 (number or "auto" = ||xhat0||^2)
//   [controller]        p k_damp alpha omega   (per-side values as "master, slave")
//   [delay.<side>]      kind dbar freq phase hold seed   (delay.master is d_m, master -> slave)
//   [operator]          amplitude bias angular_freq stop_time ("inf" for never)
//   [environment]       stiffness damping wall_y
//
// Keys missing from a file keep their teleoperation_default() values.
#pragma once

#include "teleop/simulator.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace teleop {

ScenarioConfig parse_config(std::string_view text);

/// Reads and parses a file; errors carry the path, line and key.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Applies one `section.key=value` override, e.g. "simulation.dt=0.0005".
void apply_override(ScenarioConfig& config, std::string_view assignment);

/// Full text form of the config; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace teleop
