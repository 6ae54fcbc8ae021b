#pragma once

#include <stdexcept>
#include <string>

namespace svi {

/// Invalid construction parameters (grid shape, time grid, catalog entries).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Field or parameter sizes that do not agree.
class SizeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A solve that could not be completed: Newton stall, overflow guard, non-finite values.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time step too large for the explicit transport term on this path.
class StabilityViolation : public NumericalFailure {
public:
    StabilityViolation(const std::string& what, double margin)
        : NumericalFailure(what), margin_(margin) {}

    /// dt * sup|g| / h, the quantity that exceeded 1.
    double margin() const { return margin_; }

private:
    double margin_;
};

}  // namespace svi
