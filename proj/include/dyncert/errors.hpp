#pragma once

#include <stdexcept>
#include <string>

namespace dyncert {

// Every library failure carries a stable machine code and the CLI exit status it maps to.
class Error : public std::runtime_error {
public:
    Error(std::string code, int exit_code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)), exit_code_(exit_code) {}
    const std::string& code() const { return code_; }
    int exit_code() const { return exit_code_; }

private:
    std::string code_;
    int exit_code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain_error", 2, w) {}
};
struct LibrationError : Error {
    explicit LibrationError(const std::string& w) : Error("libration", 2, w) {}
};
struct UsageError : Error {
    explicit UsageError(const std::string& w) : Error("usage_error", 2, w) {}
};
struct EmptyWindowError : Error {
    explicit EmptyWindowError(const std::string& w) : Error("empty_window", 2, w) {}
};
struct ModelMismatchError : Error {
    explicit ModelMismatchError(const std::string& w) : Error("model_mismatch", 2, w) {}
};
struct ConvergenceError : Error {
    ConvergenceError(const std::string& w, double residual = 0.0)
        : Error("convergence_failure", 3, w), residual(residual) {}
    double residual;
};
struct NumericalInstabilityError : Error {
    explicit NumericalInstabilityError(const std::string& w) : Error("numerical_instability", 3, w) {}
};
struct GridCoverageError : Error {
    explicit GridCoverageError(const std::string& w) : Error("grid_coverage", 3, w) {}
};

} // namespace dyncert
