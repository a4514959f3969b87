#pragma once

#include <stdexcept>
#include <string>

namespace formcount {

/// Malformed or inconsistent input (dimension mismatch, zero form where a
/// nonzero one is required, bad file, ...). Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed its hard size limit. Maps to CLI exit code 3.
class GuardExceeded : public std::runtime_error {
public:
    GuardExceeded(const std::string& what, double estimated_cost, double limit)
        : std::runtime_error(what + ": estimated cost " + std::to_string(estimated_cost) +
                             " exceeds guard " + std::to_string(limit)),
          estimated_cost_(estimated_cost),
          limit_(limit) {}

    double estimated_cost() const noexcept { return estimated_cost_; }
    double limit() const noexcept { return limit_; }

private:
    double estimated_cost_;
    double limit_;
};

}  // namespace formcount
