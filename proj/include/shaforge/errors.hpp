#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace shaforge {

// every failure carries a stable machine-readable kind so callers (CLI, scan)
// can dispatch on it without matching message text
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct SingularCurve : Error {
    explicit SingularCurve(const std::string& m) : Error("singular-curve", m) {}
};
struct BadReduction : Error {
    explicit BadReduction(const std::string& m) : Error("bad-reduction", m) {}
};
struct FactorTooHard : Error {
    explicit FactorTooHard(const std::string& m) : Error("factor-too-hard", m) {}
};
struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& m) : Error("budget-exceeded", m) {}
};
struct DegenerateParameters : Error {
    explicit DegenerateParameters(const std::string& m) : Error("degenerate-parameters", m) {}
};
struct ClassInconsistent : Error {
    explicit ClassInconsistent(const std::string& m) : Error("class-inconsistent", m) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error("parse-error", m) {}
};
struct CheckpointCorrupt : Error {
    explicit CheckpointCorrupt(const std::string& m) : Error("checkpoint-corrupt", m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io-error", m) {}
};
// reached only on violated internal invariants; a throw here is a bug
struct InternalError : Error {
    explicit InternalError(const std::string& m) : Error("internal-error", m) {}
};

}  // namespace shaforge
