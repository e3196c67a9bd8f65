// Bounded time-varying communication delay and the position history used to
// realize q_j(t - d_j(t)).
#pragma once

#include "teleop/common.hpp"

#include <cstdint>
#include <deque>
#include <string_view>

namespace teleop {

enum class DelayKind { constant, sinusoidal, piecewise_random };

DelayKind parse_delay_kind(std::string_view s);
std::string_view to_string(DelayKind k);

struct DelayProfile {
    DelayKind kind = DelayKind::constant;
    double dbar = 0.0;   // upper bound, s
    double freq = 0.0;   // Hz, sinusoidal
    double phase = 0.0;  // rad, sinusoidal
    double hold = 0.1;   // dwell per level, s, piecewise_random
    std::uint64_t seed = 0;

    void validate() const;
};

/// d(t) in [0, dbar]. Pure: piecewise_random levels are a hash of (seed, interval index).
double delay_at(const DelayProfile& profile, double t);

/// Timestamped n-vector samples with linear interpolation.
class HistoryBuffer {
public:
    struct Sample {
        double t;
        Vector value;
    };

    /// `horizon` is how far back samples are kept; `nominal_step` sets the
    /// staleness limit (bracketing samples more than two steps apart).
    HistoryBuffer(double horizon, double nominal_step);

    /// Timestamps must be strictly increasing.
    void push_sample(double t, const Vector& value);

    /// Linear interpolation at t_query. Queries at or before the first sample
    /// ever pushed return that sample (rest pre-history). Throws
    /// ContractViolation past the newest sample, StaleHistory for gaps or
    /// queries older than the retained window.
    Vector delayed_value(double t_query) const;

    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    double newest_time() const;
    double oldest_time() const;
    const Sample& newest() const { return samples_.back(); }
    const std::deque<Sample>& samples() const { return samples_; }
    double horizon() const { return horizon_; }

private:
    std::deque<Sample> samples_;
    double horizon_;
    double nominal_step_;
    bool trimmed_ = false;
};

}  // namespace teleop
