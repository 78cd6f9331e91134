#pragma once

#include <stdexcept>
#include <string>

namespace perifide {

// Error codes: domain-error, no-convergence, singular-jacobian, hyperbolicity-violated,
// non-simple-eigenvalue, unsupported-model, not-a-pitchfork, solvability-violated,
// start-at-singularity, localization-failed, degenerate-unclassified, eigensolver-failure.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class DomainError : public Error {
public:
    DomainError(int node, const std::string& what)
        : Error("domain-error", what + " at node " + std::to_string(node)), node_(node) {}
    int node() const noexcept { return node_; }

private:
    int node_;
};

} // namespace perifide
