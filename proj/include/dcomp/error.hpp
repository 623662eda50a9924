#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dcomp {

// Base of the toolkit's exception hierarchy. The CLI maps subtrees to
// exit codes: validation/config -> 1, infeasible design -> 2, numerical -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Input data failed a structural check. Carries one message per violation so
// callers can report every offending run_id at once.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}
    explicit ValidationError(std::string issue)
        : ValidationError(std::vector<std::string>{std::move(issue)}) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& s : issues) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out.empty() ? std::string("validation failed") : out;
    }

    std::vector<std::string> issues_;
};

// A split design whose targets cannot be met by the provided superset.
// The message names the binding constraint.
struct InfeasibleDesignError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct SingularDesignError : NumericalError {
    using NumericalError::NumericalError;
};

struct SeparationError : NumericalError {
    using NumericalError::NumericalError;
};

struct NonConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace dcomp
