#pragma once

#include <stdexcept>
#include <string>

namespace gapline {

// Raised when a combinatorial enumeration or truncation would exceed a
// configured cap. The message says which knob to turn.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a numerical routine cannot certify the requested tolerance.
// `best_bound` is the tightest relative error bound that was reached.
class ToleranceNotMet : public std::runtime_error {
public:
    ToleranceNotMet(const std::string& what, double best_bound)
        : std::runtime_error(what), best_bound_(best_bound) {}

    double best_bound() const noexcept { return best_bound_; }

private:
    double best_bound_;
};

}  // namespace gapline
