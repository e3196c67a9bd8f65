#include "teleop/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace teleop {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Value errors are rethrown by the caller with line and key attached.
struct ValueError {
    std::string message;
};

double to_double(std::string_view s) {
    s = trim(s);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) throw ValueError{"expected a number, got '" + std::string(s) + "'"};
    return v;
}

long long to_integer(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) throw ValueError{"expected an integer, got '" + std::string(s) + "'"};
    return v;
}

std::uint64_t to_unsigned(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) throw ValueError{"expected an unsigned integer, got '" + std::string(s) + "'"};
    return v;
}

bool to_bool(std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ValueError{"expected true/false, got '" + std::string(s) + "'"};
}

std::vector<double> to_list(std::string_view s) {
    std::vector<double> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(to_double(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

Vector to_vector(std::string_view s) {
    const auto list = to_list(s);
    if (list.size() > static_cast<std::size_t>(kMaxDof)) throw ValueError{"too many entries"};
    Vector v(static_cast<Eigen::Index>(list.size()));
    for (std::size_t i = 0; i < list.size(); ++i) v[static_cast<Eigen::Index>(i)] = list[i];
    return v;
}

std::array<double, 2> to_pair(std::string_view s) {
    const auto list = to_list(s);
    if (list.size() == 1) return {list[0], list[0]};
    if (list.size() != 2) throw ValueError{"expected 'master, slave' values"};
    return {list[0], list[1]};
}

template <typename Range>
std::string join(const Range& values) {
    std::string out;
    bool first = true;
    for (double v : values) {
        if (!first) out += ", ";
        out += format_double(v);
        first = false;
    }
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

std::vector<Field> build_fields() {
    std::vector<Field> f;
    auto num = [&](std::string section, std::string key, auto member) {
        f.push_back({std::move(section), std::move(key),
                     [member](ScenarioConfig& c, std::string_view v) { member(c) = to_double(v); },
                     [member](const ScenarioConfig& c) {
                         return format_double(member(c));
                     }});
    };

    num("simulation", "duration", [](auto& c) -> auto& { return c.duration; });
    num("simulation", "dt", [](auto& c) -> auto& { return c.dt; });
    f.push_back({"simulation", "mode",
                 [](ScenarioConfig& c, std::string_view v) {
                     try {
                         c.mode = parse_controller_mode(trim(v));
                     } catch (const InvalidInput& e) {
                         throw ValueError{e.what()};
                     }
                 },
                 [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); }});
    f.push_back({"simulation", "decimation",
                 [](ScenarioConfig& c, std::string_view v) { c.decimation = static_cast<int>(to_integer(v)); },
                 [](const ScenarioConfig& c) { return std::to_string(c.decimation); }});
    f.push_back({"simulation", "substeps",
                 [](ScenarioConfig& c, std::string_view v) { c.substeps = static_cast<int>(to_integer(v)); },
                 [](const ScenarioConfig& c) { return std::to_string(c.substeps); }});
    f.push_back({"simulation", "force", [](ScenarioConfig& c, std::string_view v) { c.force = to_bool(v); },
                 [](const ScenarioConfig& c) { return std::string(c.force ? "true" : "false"); }});

    for (Side side : {Side::master, Side::slave}) {
        const int i = index(side);
        const std::string robot = std::string("robot.") + name(side);
        auto list_field = [&](std::string section, std::string key, auto member) {
            f.push_back({std::move(section), std::move(key),
                         [member](ScenarioConfig& c, std::string_view v) {
                             const auto l = to_list(v);
                             member(c).assign(l.begin(), l.end());
                         },
                         [member](const ScenarioConfig& c) { return join(member(c)); }});
        };
        auto vec_field = [&](std::string section, std::string key, auto member) {
            f.push_back({std::move(section), std::move(key),
                         [member](ScenarioConfig& c, std::string_view v) { member(c) = to_vector(v); },
                         [member](const ScenarioConfig& c) { return join(member(c)); }});
        };
        list_field(robot, "link_masses", [side](auto& c) -> auto& { return c.side(side).robot.link_masses; });
        list_field(robot, "link_lengths", [side](auto& c) -> auto& { return c.side(side).robot.link_lengths; });
        num(robot, "gravity_accel", [side](auto& c) -> auto& { return c.side(side).robot.gravity_accel; });
        num(robot, "lambda1", [side](auto& c) -> auto& { return c.side(side).robot.lambda1; });
        num(robot, "lambda2", [side](auto& c) -> auto& { return c.side(side).robot.lambda2; });
        num(robot, "c_bound", [side](auto& c) -> auto& { return c.side(side).robot.c_bound; });
        vec_field(robot, "q0", [side](auto& c) -> auto& { return c.side(side).q0; });
        vec_field(robot, "qdot0", [side](auto& c) -> auto& { return c.side(side).qdot0; });

        const std::string obs = std::string("observer.") + name(side);
        num(obs, "k_r", [side](auto& c) -> auto& { return c.side(side).observer.k_r; });
        num(obs, "c_r", [side](auto& c) -> auto& { return c.side(side).observer.c_r; });
        num(obs, "eps", [side](auto& c) -> auto& { return c.side(side).observer.eps; });
        vec_field(obs, "xhat0", [side](auto& c) -> auto& { return c.side(side).observer.xhat0; });
        num(obs, "r0", [side](auto& c) -> auto& { return c.side(side).observer.r0; });
        f.push_back({obs, "sigma_hat0",
                     [side](ScenarioConfig& c, std::string_view v) {
                         auto& target = c.side(side).observer.sigma_hat0;
                         if (trim(v) == "auto") {
                             target.reset();
                         } else {
                             target = to_double(v);
                         }
                     },
                     [side](const ScenarioConfig& c) {
                         const auto& s = c.side(side).observer.sigma_hat0;
                         return s ? format_double(*s) : std::string("auto");
                     }});

        const std::string delay = std::string("delay.") + name(side);
        f.push_back({delay, "kind",
                     [i](ScenarioConfig& c, std::string_view v) {
                         try {
                             c.delays[i].kind = parse_delay_kind(trim(v));
                         } catch (const InvalidInput& e) {
                             throw ValueError{e.what()};
                         }
                     },
                     [i](const ScenarioConfig& c) { return std::string(to_string(c.delays[i].kind)); }});
        f.push_back({delay, "dbar",
                     [i](ScenarioConfig& c, std::string_view v) {
                         c.delays[i].dbar = to_double(v);
                         c.gains.dbar[i] = c.delays[i].dbar;
                     },
                     [i](const ScenarioConfig& c) { return format_double(c.delays[i].dbar); }});
        num(delay, "freq", [i](auto& c) -> auto& { return c.delays[i].freq; });
        num(delay, "phase", [i](auto& c) -> auto& { return c.delays[i].phase; });
        num(delay, "hold", [i](auto& c) -> auto& { return c.delays[i].hold; });
        f.push_back({delay, "seed", [i](ScenarioConfig& c, std::string_view v) { c.delays[i].seed = to_unsigned(v); },
                     [i](const ScenarioConfig& c) { return std::to_string(c.delays[i].seed); }});
    }

    num("controller", "p", [](auto& c) -> auto& { return c.gains.p; });
    auto pair_field = [&](std::string key, auto member) {
        f.push_back({"controller", std::move(key),
                     [member](ScenarioConfig& c, std::string_view v) { member(c) = to_pair(v); },
                     [member](const ScenarioConfig& c) { return join(member(c)); }});
    };
    pair_field("k_damp", [](auto& c) -> auto& { return c.gains.k_damp; });
    pair_field("alpha", [](auto& c) -> auto& { return c.gains.alpha; });
    pair_field("omega", [](auto& c) -> auto& { return c.gains.omega; });

    num("operator", "amplitude", [](auto& c) -> auto& { return c.operator_force.amplitude; });
    num("operator", "bias", [](auto& c) -> auto& { return c.operator_force.bias; });
    num("operator", "angular_freq", [](auto& c) -> auto& { return c.operator_force.angular_freq; });
    num("operator", "stop_time", [](auto& c) -> auto& { return c.operator_force.stop_time; });

    num("environment", "stiffness", [](auto& c) -> auto& { return c.environment.stiffness; });
    num("environment", "damping", [](auto& c) -> auto& { return c.environment.damping; });
    num("environment", "wall_y", [](auto& c) -> auto& { return c.environment.wall_y; });
    return f;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = build_fields();
    return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
    for (const Field& fd : fields()) {
        if (fd.section == section && fd.key == key) return &fd;
    }
    return nullptr;
}

void assign(ScenarioConfig& c, std::string_view section, std::string_view key, std::string_view value, int line) {
    const std::string full = std::string(section) + "." + std::string(key);
    const Field* fd = find_field(section, key);
    if (!fd) throw ConfigError("unknown key", line, full);
    try {
        fd->set(c, value);
    } catch (const ValueError& e) {
        throw ConfigError(e.message, line, full);
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string_view key = trim(line.substr(0, eq));
        if (section.empty()) throw ConfigError("key outside of any section", line_no, std::string(key));
        assign(c, section, key, trim(line.substr(eq + 1)), line_no);
    }
    try {
        c.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(e.detail(), e.line(), e.key(), path.string());
    }
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override must look like section.key=value");
    const std::string_view path = trim(assignment.substr(0, eq));
    const auto dot = path.rfind('.');
    if (dot == std::string_view::npos) throw ConfigError("override key needs a section", 0, std::string(path));
    try {
        assign(config, path.substr(0, dot), path.substr(dot + 1), trim(assignment.substr(eq + 1)), 0);
    } catch (const ConfigError& e) {
        throw ConfigError(e.detail(), 0, e.key(), "override");
    }
}

std::string serialize_config(const ScenarioConfig& config) {
    std::string out;
    std::string section;
    for (const Field& fd : fields()) {
        if (fd.section != section) {
            if (!section.empty()) out += "\n";
            section = fd.section;
            out += "[" + section + "]\n";
        }
        out += fd.key + " = " + fd.get(config) + "\n";
    }
    return out;
}

}  // namespace teleop
