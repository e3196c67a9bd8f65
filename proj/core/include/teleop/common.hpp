#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace teleop {

/// Upper bound on joint count; vectors are stack-allocated up to this size.
inline constexpr int kMaxDof = 6;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
using Vector2 = Eigen::Vector2d;
using TaskJacobian = Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, kMaxDof>;

enum class Side { master = 0, slave = 1 };

constexpr int index(Side s) { return static_cast<int>(s); }
constexpr Side opposite(Side s) { return s == Side::master ? Side::slave : Side::master; }
constexpr const char* name(Side s) { return s == Side::master ? "master" : "slave"; }

// Error hierarchy. Each failure class maps to a distinct CLI exit code.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed a value outside the operation's domain (non-finite, wrong size, bad params).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown, e.g. an ill-conditioned inertia matrix.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A state invariant (r >= c_r, sigma_hat >= -eps, causal delay) was found broken.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// History lookup outside the contract (query in the future, out of order push).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Delayed lookup fell into a gap or before the retained window.
class StaleHistory : public Error {
public:
    using Error::Error;
};

/// Integrated state became non-finite.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Scenario rejected because the P+d gain condition does not hold.
class GainConditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    /// Message reads "<source>:<line> [<key>]: <msg>"; line 0 and an empty key are omitted.
    ConfigError(const std::string& msg, int line = 0, std::string key = {}, std::string source = "config")
        : Error(format(msg, line, key, source)), detail_(msg), line_(line), key_(std::move(key)) {}

    const std::string& detail() const { return detail_; }
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    static std::string format(const std::string& msg, int line, const std::string& key, const std::string& source) {
        std::string out = source;
        if (line > 0) out += ":" + std::to_string(line);
        if (!key.empty()) out += " [" + key + "]";
        return out + ": " + msg;
    }

    std::string detail_;
    int line_;
    std::string key_;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

}  // namespace teleop
