#pragma once

#include <stdexcept>
#include <string>

namespace htopt {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A density with no mass left to normalize.
struct DegenerateDistribution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The spectral reconstruction of a horizon failed its aliasing guard.
class HorizonUnavailable : public std::runtime_error {
public:
    HorizonUnavailable(int horizon_days, const std::string& reason)
        : std::runtime_error("horizon unavailable (" + std::to_string(horizon_days) +
                             " days): " + reason),
          horizon_days_(horizon_days), reason_(reason) {}

    int horizon_days() const noexcept { return horizon_days_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int horizon_days_;
    std::string reason_;
};

/// Contract incompatible with the grid it is priced against.
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// File-level input error (missing columns, unreadable header).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every strike of a calibration chain was excluded.
struct EmptyObjective : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace htopt
