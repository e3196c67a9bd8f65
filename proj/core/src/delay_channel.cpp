#include "teleop/delay_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace teleop {
namespace {

// splitmix64 finalizer: stateless mixing of (seed, interval) into 64 bits.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_interval(std::uint64_t seed, std::uint64_t k) {
    const std::uint64_t bits = mix64(mix64(seed) ^ k);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace

DelayKind parse_delay_kind(std::string_view s) {
    if (s == "constant") return DelayKind::constant;
    if (s == "sinusoidal") return DelayKind::sinusoidal;
    if (s == "piecewise_random") return DelayKind::piecewise_random;
    throw InvalidInput("unknown delay kind '" + std::string(s) + "'");
}

std::string_view to_string(DelayKind k) {
    switch (k) {
        case DelayKind::constant: return "constant";
        case DelayKind::sinusoidal: return "sinusoidal";
        case DelayKind::piecewise_random: return "piecewise_random";
    }
    return "constant";
}

void DelayProfile::validate() const {
    if (!(dbar >= 0.0) || !std::isfinite(dbar)) throw InvalidInput("delay: dbar must be finite and non-negative");
    if (kind == DelayKind::sinusoidal && !(freq >= 0.0)) throw InvalidInput("delay: freq must be non-negative");
    if (kind == DelayKind::piecewise_random && !(hold > 0.0)) throw InvalidInput("delay: hold must be positive");
    if (!std::isfinite(phase)) throw InvalidInput("delay: phase must be finite");
}

double delay_at(const DelayProfile& profile, double t) {
    switch (profile.kind) {
        case DelayKind::constant:
            return profile.dbar;
        case DelayKind::sinusoidal: {
            const double d = 0.5 * profile.dbar * (1.0 + std::sin(2.0 * std::numbers::pi * profile.freq * t + profile.phase));
            return std::clamp(d, 0.0, profile.dbar);
        }
        case DelayKind::piecewise_random: {
            const auto k = static_cast<std::uint64_t>(std::floor(std::max(t, 0.0) / profile.hold));
            return profile.dbar * unit_interval(profile.seed, k);
        }
    }
    return profile.dbar;
}

HistoryBuffer::HistoryBuffer(double horizon, double nominal_step) : horizon_(horizon), nominal_step_(nominal_step) {
    if (!(horizon >= 0.0) || !(nominal_step > 0.0)) {
        throw InvalidInput("history: horizon must be non-negative and step positive");
    }
}

void HistoryBuffer::push_sample(double t, const Vector& value) {
    if (!samples_.empty() && !(t > samples_.back().t)) {
        throw ContractViolation("history: timestamp " + std::to_string(t) + " does not advance past " +
                                std::to_string(samples_.back().t));
    }
    samples_.push_back({t, value});
    // Keep one sample at or before t - horizon so the window stays bracketed.
    while (samples_.size() > 2 && samples_[1].t <= t - horizon_) {
        samples_.pop_front();
        trimmed_ = true;
    }
}

double HistoryBuffer::newest_time() const {
    if (samples_.empty()) throw ContractViolation("history: empty buffer");
    return samples_.back().t;
}

double HistoryBuffer::oldest_time() const {
    if (samples_.empty()) throw ContractViolation("history: empty buffer");
    return samples_.front().t;
}

Vector HistoryBuffer::delayed_value(double t_query) const {
    if (samples_.empty()) throw ContractViolation("history: empty buffer");
    const Sample& last = samples_.back();
    if (t_query > last.t) {
        throw ContractViolation("history: query at " + std::to_string(t_query) + " is past newest sample " +
                                std::to_string(last.t));
    }
    const Sample& first = samples_.front();
    if (t_query <= first.t) {
        if (trimmed_ && t_query < first.t) {
            throw StaleHistory("history: query at " + std::to_string(t_query) + " precedes retained window");
        }
        return first.value;
    }
    auto hi = std::lower_bound(samples_.begin(), samples_.end(), t_query,
                               [](const Sample& s, double t) { return s.t < t; });
    if (hi->t == t_query) return hi->value;
    auto lo = std::prev(hi);
    const double gap = hi->t - lo->t;
    if (gap > 2.0 * nominal_step_ * (1.0 + 1e-9)) {
        throw StaleHistory("history: gap of " + std::to_string(gap) + " s around t = " + std::to_string(t_query));
    }
    const double w = (t_query - lo->t) / gap;
    return (1.0 - w) * lo->value + w * hi->value;
}

}  // namespace teleop
