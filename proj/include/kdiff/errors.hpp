#pragma once

#include <stdexcept>
#include <string>

namespace kdiff {

/// Rejected configuration input: unknown key, type mismatch, range violation.
/// Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical budget (leak budget, branch budget) was exhausted mid-run.
/// Maps to CLI exit code 3.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, int kick) : std::runtime_error(what), kick_(kick) {}
    int kick() const { return kick_; }

private:
    int kick_;
};

/// A structural invariant was violated (basis mismatch, empty input, ...).
/// Maps to CLI exit code 4.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kdiff
