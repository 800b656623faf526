#pragma once

#include <stdexcept>
#include <string>

namespace fin {

/// Base class for all errors raised by the library. Carries a stable
/// machine-readable code next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct NonFiniteError : Error {
    explicit NonFiniteError(const std::string& msg) : Error("NonFinite", msg) {}
};
struct ZeroVelocityError : Error {
    explicit ZeroVelocityError(const std::string& msg) : Error("ZeroVelocity", msg) {}
};
struct ZeroSpeedError : Error {
    explicit ZeroSpeedError(const std::string& msg) : Error("ZeroSpeed", msg) {}
};
struct DegenerateMetricError : Error {
    explicit DegenerateMetricError(const std::string& msg) : Error("DegenerateMetric", msg) {}
};
struct ConvexityLostError : Error {
    explicit ConvexityLostError(const std::string& msg) : Error("ConvexityLost", msg) {}
};
struct ChartMismatchError : Error {
    explicit ChartMismatchError(const std::string& msg) : Error("ChartMismatch", msg) {}
};
struct StepRejectedError : Error {
    explicit StepRejectedError(const std::string& msg) : Error("StepRejected", msg) {}
};
struct OutOfMemoryError : Error {
    explicit OutOfMemoryError(const std::string& msg) : Error("OutOfMemory", msg) {}
};
struct SubcriticalEnergyError : Error {
    explicit SubcriticalEnergyError(const std::string& msg) : Error("SubcriticalEnergy", msg) {}
};
struct TooShortError : Error {
    explicit TooShortError(const std::string& msg) : Error("TooShort", msg) {}
};
struct BadAsymptoticsError : Error {
    explicit BadAsymptoticsError(const std::string& msg) : Error("BadAsymptotics", msg) {}
};
struct NoGapError : Error {
    explicit NoGapError(const std::string& msg) : Error("NoGap", msg) {}
};
struct NoConvergenceError : Error {
    explicit NoConvergenceError(const std::string& msg) : Error("NoConvergence", msg) {}
};
struct ConstraintInfeasibleError : Error {
    explicit ConstraintInfeasibleError(const std::string& msg) : Error("ConstraintInfeasible", msg) {}
};
struct MultiValuedError : Error {
    explicit MultiValuedError(const std::string& msg) : Error("MultiValued", msg) {}
};
struct BudgetExceededError : Error {
    explicit BudgetExceededError(const std::string& msg) : Error("BudgetExceeded", msg) {}
};
struct BlowUpError : Error {
    explicit BlowUpError(const std::string& msg) : Error("BlowUp", msg) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error("Validation", msg) {}
};

}  // namespace fin
